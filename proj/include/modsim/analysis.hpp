#pragma once

#include <cstddef>
#include <filesystem>
#include <ostream>
#include <vector>

#include "modsim/road_network.hpp"
#include "modsim/sim_engine.hpp"

namespace modsim {

/// Half-open time interval [begin, end).
struct TimeWindow {
  double begin = 0.0;
  double end = 0.0;

  double length() const { return end - begin; }
  /// Length of [a, b] intersected with the window, never negative.
  double overlap(double a, double b) const;
};

/// [stat_start, end] of the trace.
TimeWindow statistics_window(const SimTrace& trace);

/// Density thresholds in vehicles per metre.
struct DensityThresholds {
  double critical = 0.08;
  double heavy = 0.04;
  double bin_width = 0.004;
};

struct SegmentDensity {
  SegmentId segment = 0;
  NodeId from = 0;
  NodeId to = 0;
  double length_m = 0.0;
  double density = 0.0;         // veh/m, time-averaged over the window
  double vehicle_seconds = 0.0; // summed overlap of traversals with the window
};

struct DensityReport {
  TimeWindow window;
  DensityThresholds thresholds;
  std::vector<SegmentDensity> segments;  // every network segment, by index
  std::size_t used = 0;            // density > 0
  std::size_t heavily_loaded = 0;  // density > thresholds.heavy
  std::size_t congested = 0;       // density > thresholds.critical
  double average_density = 0.0;    // over used segments
  /// Counts per bin [k*w, (k+1)*w) of the nonzero densities.
  std::vector<std::size_t> histogram;
};

/// Throws Error on an empty window or a traversal of an unknown segment.
DensityReport edge_densities(const SimTrace& trace, TimeWindow window,
                             const RoadNetwork& network,
                             DensityThresholds thresholds = {});

struct OccupancyReport {
  double interval = 60.0;
  std::vector<OccupancySample> samples;  // inside the window, on the grid
  std::vector<std::size_t> histogram;    // histogram[k] = samples with k aboard
  double mean = 0.0;
};

/// Occupancy samples of non-parked vehicles at begin + k*interval inside the
/// window. Uses the samples recorded by the simulation, so `interval` must be
/// a multiple of the simulation's sampling interval for the grid to be hit.
OccupancyReport occupancy_series(const SimTrace& trace, TimeWindow window,
                                 double interval = 60.0);

struct DelayStats {
  std::size_t count = 0;
  double mean = 0.0;
  double max = 0.0;
  std::size_t above_q_max = 0;  // > trace q_max; always 0 when q_max is 0

  double violation_fraction() const {
    return count == 0 ? 0.0 : static_cast<double>(above_q_max) / count;
  }
};

struct SummaryReport {
  TimeWindow window;
  double total_distance_km = 0.0;
  double average_distance_km = 0.0;  // per vehicle that moved in the window
  std::size_t vehicles_moved = 0;
  double vehicle_seconds = 0.0;
  double average_density = 0.0;
  std::size_t used_segments = 0;
  std::size_t heavily_loaded = 0;
  std::size_t congested = 0;
  std::size_t requests = 0;  // announced inside the window
  std::size_t unserved = 0;  // of those
  DelayStats realized_delay;
  DelayStats estimated_delay;
  double mean_occupancy = 0.0;
};

/// Distance inside the window is prorated by the overlap of each traversal.
/// Request statistics cover requests announced inside the window.
SummaryReport summarize(const SimTrace& trace, TimeWindow window,
                        const RoadNetwork& network);

/// Per-edge CSV: segment,from,to,length_m,density_veh_per_m,class.
void write_density_csv(const DensityReport& report, std::ostream& out);
/// bin_low,bin_high,count.
void write_density_histogram_csv(const DensityReport& report, std::ostream& out);
/// occupancy,count.
void write_occupancy_csv(const OccupancyReport& report, std::ostream& out);
void write_summary_json(const SummaryReport& report, std::ostream& out);

/// Writes summary.json, edge_density.csv, density_histogram.csv and
/// occupancy_histogram.csv into `dir`. Returns the paths in that order.
std::vector<std::filesystem::path> write_reports(
    const SimTrace& trace, const RoadNetwork& network,
    const std::filesystem::path& dir);

}  // namespace modsim
