#include "modsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <unordered_set>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "json.hpp"
#include "modsim/errors.hpp"

namespace modsim {

double TimeWindow::overlap(double a, double b) const {
  return std::max(0.0, std::min(b, end) - std::max(a, begin));
}

TimeWindow statistics_window(const SimTrace& trace) {
  return {trace.stat_start, trace.end};
}

DensityReport edge_densities(const SimTrace& trace, TimeWindow window,
                             const RoadNetwork& network,
                             DensityThresholds thresholds) {
  if (!(window.length() > 0.0)) {
    throw Error(fmt::format("empty analysis window [{}, {})", window.begin,
                            window.end));
  }
  DensityReport report;
  report.window = window;
  report.thresholds = thresholds;
  const auto& segs = network.segments();
  report.segments.resize(segs.size());
  for (std::size_t i = 0; i < segs.size(); ++i) {
    report.segments[i].segment = segs[i].id;
    report.segments[i].from = segs[i].from;
    report.segments[i].to = segs[i].to;
    report.segments[i].length_m = segs[i].length_m;
  }
  for (const auto& t : trace.traversals) {
    std::size_t idx = 0;
    try {
      idx = network.segment_index(t.segment);
    } catch (const std::out_of_range&) {
      throw Error(fmt::format("trace references unknown segment {}", t.segment));
    }
    report.segments[idx].vehicle_seconds += window.overlap(t.enter, t.exit);
  }

  double density_sum = 0.0;
  for (auto& s : report.segments) {
    s.density = s.vehicle_seconds / (window.length() * s.length_m);
    if (s.density <= 0.0) continue;
    ++report.used;
    density_sum += s.density;
    if (s.density > thresholds.heavy) ++report.heavily_loaded;
    if (s.density > thresholds.critical) ++report.congested;
    const auto bin = static_cast<std::size_t>(s.density / thresholds.bin_width);
    if (report.histogram.size() <= bin) report.histogram.resize(bin + 1, 0);
    ++report.histogram[bin];
  }
  if (report.used > 0) report.average_density = density_sum / report.used;
  return report;
}

OccupancyReport occupancy_series(const SimTrace& trace, TimeWindow window,
                                 double interval) {
  OccupancyReport report;
  report.interval = interval;
  double sum = 0.0;
  for (const auto& s : trace.occupancy) {
    if (s.time < window.begin || s.time >= window.end) continue;
    const double steps = (s.time - window.begin) / interval;
    if (std::abs(steps - std::round(steps)) > 1e-9) continue;
    report.samples.push_back(s);
    const auto k = static_cast<std::size_t>(std::max(0, s.occupancy));
    if (report.histogram.size() <= k) report.histogram.resize(k + 1, 0);
    ++report.histogram[k];
    sum += s.occupancy;
  }
  if (!report.samples.empty()) report.mean = sum / report.samples.size();
  return report;
}

namespace {

void add(DelayStats& stats, double value, double q_max) {
  ++stats.count;
  stats.mean += value;  // normalised in finish()
  stats.max = stats.count == 1 ? value : std::max(stats.max, value);
  if (q_max > 0.0 && value > q_max) ++stats.above_q_max;
}

void finish(DelayStats& stats) {
  if (stats.count > 0) stats.mean /= static_cast<double>(stats.count);
}

}  // namespace

SummaryReport summarize(const SimTrace& trace, TimeWindow window,
                        const RoadNetwork& network) {
  SummaryReport report;
  report.window = window;
  if (!(window.length() > 0.0)) return report;

  double distance_m = 0.0;
  std::unordered_set<VehicleId> moved;
  for (const auto& t : trace.traversals) {
    const double overlap = window.overlap(t.enter, t.exit);
    if (overlap <= 0.0) continue;
    const double length = network.segment(t.segment).length_m;
    const bool inside = t.enter >= window.begin && t.exit <= window.end;
    distance_m += inside ? length : length * (overlap / (t.exit - t.enter));
    report.vehicle_seconds += overlap;
    moved.insert(t.vehicle);
  }
  report.total_distance_km = distance_m / 1000.0;
  report.vehicles_moved = moved.size();
  if (!moved.empty()) {
    report.average_distance_km =
        report.total_distance_km / static_cast<double>(moved.size());
  }

  const auto density = edge_densities(trace, window, network);
  report.average_density = density.average_density;
  report.used_segments = density.used;
  report.heavily_loaded = density.heavily_loaded;
  report.congested = density.congested;

  for (const auto& r : trace.requests) {
    if (r.announce < window.begin || r.announce >= window.end) continue;
    ++report.requests;
    if (!r.served()) {
      ++report.unserved;
      continue;
    }
    add(report.realized_delay, *r.realized_delay(), trace.q_max);
    if (r.estimated_delay) {
      add(report.estimated_delay, *r.estimated_delay, trace.q_max);
    }
  }
  finish(report.realized_delay);
  finish(report.estimated_delay);

  report.mean_occupancy = occupancy_series(trace, window).mean;
  return report;
}

void write_density_csv(const DensityReport& report, std::ostream& out) {
  out << "segment,from,to,length_m,density_veh_per_m,class\n";
  for (const auto& s : report.segments) {
    const char* cls = s.density > report.thresholds.critical ? "congested"
                      : s.density > report.thresholds.heavy  ? "heavy"
                      : s.density > 0.0                      ? "used"
                                                             : "unused";
    fmt::print(out, "{},{},{},{},{},{}\n", s.segment, s.from, s.to, s.length_m,
               s.density, cls);
  }
}

void write_density_histogram_csv(const DensityReport& report,
                                 std::ostream& out) {
  out << "bin_low,bin_high,count\n";
  const double w = report.thresholds.bin_width;
  for (std::size_t k = 0; k < report.histogram.size(); ++k) {
    fmt::print(out, "{},{},{}\n", static_cast<double>(k) * w,
               static_cast<double>(k + 1) * w, report.histogram[k]);
  }
}

void write_occupancy_csv(const OccupancyReport& report, std::ostream& out) {
  out << "occupancy,count\n";
  for (std::size_t k = 0; k < report.histogram.size(); ++k) {
    fmt::print(out, "{},{}\n", k, report.histogram[k]);
  }
}

namespace {

nlohmann::ordered_json to_json(const DelayStats& s) {
  nlohmann::ordered_json j;
  j["count"] = s.count;
  j["mean_s"] = s.mean;
  j["max_s"] = s.max;
  j["above_q_max"] = s.above_q_max;
  j["violation_fraction"] = s.violation_fraction();
  return j;
}

}  // namespace

void write_summary_json(const SummaryReport& r, std::ostream& out) {
  nlohmann::ordered_json j;
  j["window_begin_s"] = r.window.begin;
  j["window_end_s"] = r.window.end;
  j["total_distance_km"] = r.total_distance_km;
  j["average_distance_km"] = r.average_distance_km;
  j["vehicles_moved"] = r.vehicles_moved;
  j["vehicle_seconds"] = r.vehicle_seconds;
  j["average_density_veh_per_m"] = r.average_density;
  j["used_segments"] = r.used_segments;
  j["heavily_loaded_segments"] = r.heavily_loaded;
  j["congested_segments"] = r.congested;
  j["requests"] = r.requests;
  j["unserved"] = r.unserved;
  j["realized_delay"] = to_json(r.realized_delay);
  j["estimated_delay"] = to_json(r.estimated_delay);
  j["mean_occupancy"] = r.mean_occupancy;
  out << j.dump(2) << '\n';
}

std::vector<std::filesystem::path> write_reports(
    const SimTrace& trace, const RoadNetwork& network,
    const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto window = statistics_window(trace);
  std::vector<std::filesystem::path> paths{
      dir / "summary.json", dir / "edge_density.csv",
      dir / "density_histogram.csv", dir / "occupancy_histogram.csv"};
  auto open = [](const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write " + p.string());
    return out;
  };
  const auto density = edge_densities(trace, window, network);
  {
    auto out = open(paths[0]);
    write_summary_json(summarize(trace, window, network), out);
  }
  {
    auto out = open(paths[1]);
    write_density_csv(density, out);
  }
  {
    auto out = open(paths[2]);
    write_density_histogram_csv(density, out);
  }
  {
    auto out = open(paths[3]);
    write_occupancy_csv(occupancy_series(trace, window), out);
  }
  return paths;
}

}  // namespace modsim
