// Acceptance checks: one PASS/FAIL line per criterion, exit status 0 only
// when every criterion passes. Tolerances are the constants below.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "instances.hpp"
#include "modsim/analysis.hpp"
#include "modsim/experiment.hpp"
#include "modsim/matching.hpp"
#include "modsim/rebalancing.hpp"
#include "modsim/sim_engine.hpp"
#include "support.hpp"
#include "transport_oracle.hpp"

using namespace modsim;
namespace fs = std::filesystem;

namespace {

constexpr int kMatchingInstances = 500;
constexpr double kMatchingSeconds = 10.0;
constexpr int kTransportUnitLimit = 4;
constexpr double kFixtureSeconds = 60.0;
constexpr double kRealizedViolationLimit = 0.10;
constexpr double kRelativeTolerance = 1e-9;
constexpr double kDensityTolerance = 1e-9;
constexpr double kBoundaryOffset = 1e-12;
const std::vector<double> kSweep{420, 600, 720, 900};

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

double vmt_km(const SimTrace& t, const RoadNetwork& net) {
  double m = 0;
  for (const auto& r : t.traversals) m += net.segment(r.segment).length_m;
  return m / 1000.0;
}

// Runs on the standard fixture, shared by criteria 3 to 6.
struct FixtureRuns {
  PreparedExperiment prepared;
  SimTrace present, mod, rideshare;
  std::vector<SimTrace> sweep;
  double seconds = 0;
};

FixtureRuns run_fixture() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto config = load_experiment(fs::path(MODSIM_DATA_DIR) / "commute.json");
  FixtureRuns f{prepare_experiment(config), {}, {}, {}, {}, 0};
  const auto& p = f.prepared;
  auto run = [&](Mode mode, double q_max) {
    auto sc = p.scenario;
    sc.mode = mode;
    sc.q_max = q_max;
    return run_scenario(sc, p.network, p.demand, p.layout, p.estimator);
  };
  f.present = run(Mode::present, 600);
  f.mod = run(Mode::mod, 600);
  f.rideshare = run(Mode::mod_rideshare, 600);
  f.seconds = seconds_since(t0);
  for (double q : kSweep) f.sweep.push_back(run(Mode::mod_rideshare, q));
  return f;
}

Outcome matching_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  int mismatches = 0;
  for (int seed = 1; seed <= kMatchingInstances; ++seed) {
    const auto inst = testing::random_instance(static_cast<std::uint64_t>(seed));
    const auto ctx = inst.context();
    if (match_request(inst.fleet, inst.fresh, ctx) !=
        brute_force_oracle(inst.fleet, inst.fresh, ctx)) {
      ++mismatches;
    }
  }
  const double s = seconds_since(t0);
  return {mismatches == 0 && s < kMatchingSeconds,
          fmt::format("{} instances, {} mismatches, {:.2f} s", kMatchingInstances,
                      mismatches, s)};
}

Outcome transport_equivalence() {
  // Three cost structures: distances on a line and two random integer matrices.
  std::vector<CostMatrix> costs;
  CostMatrix line(3, 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) line.at(i, j) = 60.0 * std::abs(int(i) - int(j));
  costs.push_back(line);
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> u(0, 40);
  for (int k = 0; k < 2; ++k) {
    CostMatrix c(3, 3);
    for (auto& v : c.values) v = u(rng);
    costs.push_back(c);
  }

  int instances = 0, mismatches = 0;
  const int base = kTransportUnitLimit + 1;
  int total_combos = 1;
  for (int k = 0; k < 6; ++k) total_combos *= base;
  for (int code = 0; code < total_combos; ++code) {
    std::vector<int> s(3), d(3);
    int c = code;
    for (auto& x : s) x = c % base, c /= base;
    for (auto& x : d) x = c % base, c /= base;
    for (const auto& m : costs) {
      ++instances;
      const double got = total_cost(solve_transportation(s, d, m));
      if (!close_rel(got, testing::enumerate_min_transport_cost(s, d, m),
                     kRelativeTolerance)) {
        ++mismatches;
      }
    }
  }
  return {mismatches == 0, fmt::format("{} instances, {} mismatches", instances, mismatches)};
}

Outcome vmt_ordering(const FixtureRuns& f) {
  const auto& net = f.prepared.network;
  const double present = vmt_km(f.present, net), mod = vmt_km(f.mod, net),
               shared = vmt_km(f.rideshare, net);
  const bool order = mod > present && shared < mod && shared < present;
  return {order && f.seconds < kFixtureSeconds,
          fmt::format("VMT present {:.1f} km, mod {:.1f} km, rideshare {:.1f} km "
                      "(ratios {:.2f} / {:.2f} / {:.2f}), {:.1f} s",
                      present, mod, shared, mod / present, shared / mod, shared / present,
                      f.seconds)};
}

double mean_occupancy(const SimTrace& t, const RoadNetwork& net) {
  return summarize(t, statistics_window(t), net).mean_occupancy;
}

Outcome occupancy_ordering(const FixtureRuns& f) {
  const auto& net = f.prepared.network;
  const double shared = mean_occupancy(f.rideshare, net), mod = mean_occupancy(f.mod, net);
  bool monotone = true;
  std::string series;
  double prev = -1;
  for (const auto& t : f.sweep) {
    const double m = mean_occupancy(t, net);
    series += fmt::format("{}{:.3f}", series.empty() ? "" : ", ", m);
    if (m < prev) monotone = false;
    prev = m;
  }
  return {shared > 1.0 && 1.0 > mod && monotone,
          fmt::format("rideshare {:.3f}, mod {:.3f}; sweep 420/600/720/900 s: {}", shared,
                      mod, series)};
}

Outcome delay_bound(const FixtureRuns& f) {
  std::size_t estimated_violations = 0, served = 0;
  std::vector<const SimTrace*> runs{&f.rideshare};
  for (const auto& t : f.sweep) runs.push_back(&t);
  for (const auto* t : runs) {
    for (const auto& r : t->requests) {
      if (!r.served()) continue;
      ++served;
      if (!r.estimated_delay || *r.estimated_delay > t->q_max) ++estimated_violations;
    }
  }
  const auto s = summarize(f.rideshare, statistics_window(f.rideshare), f.prepared.network);
  const double frac = s.realized_delay.violation_fraction();
  return {estimated_violations == 0 && frac < kRealizedViolationLimit,
          fmt::format("{} estimated violations over {} served requests in {} runs; "
                      "realized {} of {} above q_max ({:.1f} %), mean {:.1f} s, max {:.1f} s",
                      estimated_violations, served, runs.size(), s.realized_delay.above_q_max,
                      s.realized_delay.count, 100.0 * frac, s.realized_delay.mean,
                      s.realized_delay.max)};
}

// Fleet audits, pickup/drop-off pairing and density vehicle-time on one run.
std::string conservation_failure(const SimTrace& t, const RoadNetwork& net) {
  for (const auto& a : t.audits) {
    if (!a.balanced()) return fmt::format("unbalanced audit at {}", a.time);
    if (t.mode != Mode::present && a.total != static_cast<int>(t.fleet_size)) {
      return fmt::format("audit total {} vs fleet {}", a.total, t.fleet_size);
    }
  }
  std::size_t unserved = 0;
  for (const auto& r : t.requests) {
    if (!r.served()) {
      if (r.pickup) return fmt::format("request {} picked up, never dropped", r.request);
      ++unserved;
      continue;
    }
    if (!r.pickup || !r.vehicle || *r.pickup > *r.dropoff || *r.pickup < r.announce) {
      return fmt::format("request {} pickup/drop-off unpaired", r.request);
    }
  }
  if (unserved != t.unserved) return "unserved count mismatch";

  const auto w = statistics_window(t);
  const auto d = edge_densities(t, w, net);
  double from_density = 0, clipped = 0;
  for (const auto& s : d.segments) from_density += s.density * s.length_m * w.length();
  for (const auto& r : t.traversals) clipped += w.overlap(r.enter, r.exit);
  if (!close_rel(from_density, clipped, kRelativeTolerance)) {
    return fmt::format("vehicle-seconds {} vs {}", from_density, clipped);
  }
  return {};
}

Outcome conservation(const FixtureRuns& f) {
  std::vector<const SimTrace*> runs{&f.present, &f.mod, &f.rideshare};
  for (const auto& t : f.sweep) runs.push_back(&t);
  std::size_t audits = 0;
  for (const auto* t : runs) {
    audits += t->audits.size();
    if (auto why = conservation_failure(*t, f.prepared.network); !why.empty()) {
      return {false, fmt::format("{} run: {}", to_string(t->mode), why)};
    }
  }
  return {true, fmt::format("{} runs, {} fleet audits balanced", runs.size(), audits)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  const auto root = fs::path(testing::temp_dir("acceptance_determinism"));
  const auto config = (fs::path(MODSIM_DATA_DIR) / "commute.json").string();
  for (const char* run : {"a", "b"}) {
    const auto cmd = fmt::format("{} simulate --config {} --out {} > /dev/null 2>&1",
                                 MODSIM_CLI_PATH, config, (root / run).string());
    const int status = std::system(cmd.c_str());
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
      return {false, fmt::format("simulate run {} failed", run)};
    }
  }
  std::size_t files = 0;
  for (const char* sub : {"trace", "reports"}) {
    for (const auto& e : fs::directory_iterator(root / "a" / sub)) {
      const auto other = root / "b" / sub / e.path().filename();
      if (!fs::exists(other) || slurp(e.path()) != slurp(other)) {
        return {false, fmt::format("{} differs", e.path().filename().string())};
      }
      ++files;
    }
  }
  return {files > 0, fmt::format("{} trace and report files byte-identical", files)};
}

Outcome density_fixtures() {
  const auto net = testing::line_network(2, 100.0, 10.0);
  const TimeWindow w{0, 100};
  SimTrace t;
  t.stat_start = 0;
  t.end = 100;
  std::vector<std::string> failures;
  auto density_of = [&](const DensityReport& r) { return r.segments[0].density; };

  t.traversals = {{0, 0, 0, 100, 1}};
  if (std::abs(density_of(edge_densities(t, w, net)) - 0.01) > kDensityTolerance)
    failures.push_back("full window");
  t.traversals = {{0, 0, 50, 150, 1}};
  if (std::abs(density_of(edge_densities(t, w, net)) - 0.005) > kDensityTolerance)
    failures.push_back("half window");
  t.traversals = {{0, 0, -20, 30, 1}, {1, 0, 10, 60, 1}, {2, 0, 90, 100, 1}};
  if (std::abs(density_of(edge_densities(t, w, net)) - 0.009) > kDensityTolerance)
    failures.push_back("overlapping vehicles");

  // Exactly at a threshold is not above it; 1e-12 below the threshold is.
  auto vehicles = [&](int n) {
    t.traversals.clear();
    for (int k = 0; k < n; ++k) t.traversals.push_back({VehicleId(k), 0, 0, 100, 0});
  };
  auto classify = [&](double heavy, double critical) {
    DensityThresholds thr;
    thr.heavy = heavy;
    thr.critical = critical;
    const auto r = edge_densities(t, w, net, thr);
    return std::pair(r.heavily_loaded, r.congested);
  };
  const DensityThresholds def;
  vehicles(4);  // 0.04 veh/m
  if (classify(def.heavy, def.critical) != std::pair<std::size_t, std::size_t>(0, 0))
    failures.push_back("0.04 at heavy threshold");
  if (classify(def.heavy - kBoundaryOffset, def.critical).first != 1)
    failures.push_back("0.04 above lowered heavy threshold");
  if (classify(def.heavy + kBoundaryOffset, def.critical).first != 0)
    failures.push_back("0.04 below raised heavy threshold");
  vehicles(8);  // 0.08 veh/m
  if (classify(def.heavy, def.critical) != std::pair<std::size_t, std::size_t>(1, 0))
    failures.push_back("0.08 at critical threshold");
  if (classify(def.heavy, def.critical - kBoundaryOffset).second != 1)
    failures.push_back("0.08 above lowered critical threshold");
  if (classify(def.heavy, def.critical + kBoundaryOffset).second != 0)
    failures.push_back("0.08 below raised critical threshold");

  std::string detail = "analytic densities and threshold boundaries";
  for (const auto& f : failures) detail += "; failed: " + f;
  return {failures.empty(), detail};
}

}  // namespace

int main() {
  bool all = true;
  auto report = [&](int id, const char* name, const Outcome& o) {
    all = all && o.pass;
    fmt::print("criterion {}: {} {} ({})\n", id, o.pass ? "PASS" : "FAIL", name, o.detail);
    std::fflush(stdout);
  };
  auto guarded = [&](const std::function<Outcome()>& f) -> Outcome {
    try {
      return f();
    } catch (const std::exception& e) {
      return {false, std::string("exception: ") + e.what()};
    }
  };

  report(1, "matching equals brute-force oracle", guarded(matching_equivalence));
  report(2, "transportation solver equals enumeration", guarded(transport_equivalence));

  std::optional<FixtureRuns> fixture;
  std::string fixture_error;
  try {
    fixture = run_fixture();
  } catch (const std::exception& e) {
    fixture_error = std::string("exception: ") + e.what();
  }
  auto on_fixture = [&](Outcome (*f)(const FixtureRuns&)) {
    return fixture ? guarded([&] { return f(*fixture); }) : Outcome{false, fixture_error};
  };
  report(3, "VMT ordering on the standard fixture", on_fixture(vmt_ordering));
  report(4, "occupancy ordering and q_max sweep", on_fixture(occupancy_ordering));
  report(5, "delay bound enforcement", on_fixture(delay_bound));
  report(6, "conservation", on_fixture(conservation));
  report(7, "simulate determinism", guarded(determinism));
  report(8, "density fixtures", guarded(density_fixtures));
  return all ? 0 : 1;
}
