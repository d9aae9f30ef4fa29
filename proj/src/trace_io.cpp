#include "modsim/trace_io.hpp"

#include <fstream>
#include <optional>
#include <string>

#include <fmt/format.h>

#include "json.hpp"
#include "modsim/csv.hpp"
#include "modsim/errors.hpp"

namespace modsim {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

template <class T>
ordered_json opt_json(const std::optional<T>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

// A table is described once and written in either format.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<ordered_json>> rows;
};

std::string csv_cell(const ordered_json& v) {
  if (v.is_null()) return {};
  if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
  if (v.is_number_integer()) return fmt::format("{}", v.get<long long>());
  if (v.is_number_float()) return fmt::format("{}", v.get<double>());
  return v.get<std::string>();
}

fs::path write_table(const Table& table, const fs::path& dir, TraceFormat fmt) {
  const auto path =
      dir / (table.name + (fmt == TraceFormat::csv ? ".csv" : ".jsonl"));
  auto out = open_output(path);
  if (fmt == TraceFormat::csv) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      out << (c ? "," : "") << table.columns[c];
    }
    out << '\n';
    for (const auto& row : table.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        out << (c ? "," : "") << csv_cell(row[c]);
      }
      out << '\n';
    }
  } else {
    for (const auto& row : table.rows) {
      ordered_json obj = ordered_json::object();
      for (std::size_t c = 0; c < row.size(); ++c) obj[table.columns[c]] = row[c];
      out << obj.dump() << '\n';
    }
  }
  return path;
}

/// Rows of a table as name -> text, from whichever format exists.
class TableReader {
 public:
  TableReader(const fs::path& dir, const std::string& name) {
    csv_path_ = dir / (name + ".csv");
    jsonl_path_ = dir / (name + ".jsonl");
    if (fs::exists(csv_path_)) {
      in_.open(csv_path_);
      reader_.emplace(in_, csv_path_.string());
    } else if (fs::exists(jsonl_path_)) {
      in_.open(jsonl_path_);
    } else {
      throw LoadError("trace table missing: " + csv_path_.string());
    }
  }

  bool next() {
    if (reader_) return reader_->next();
    std::string line;
    while (std::getline(in_, line)) {
      if (line.empty()) continue;
      row_ = nlohmann::json::parse(line);
      return true;
    }
    return false;
  }

  bool has(const std::string& column) const {
    if (reader_) return !reader_->field(column).empty();
    return row_.contains(column) && !row_[column].is_null();
  }

  double number(const std::string& column) const {
    if (reader_) return reader_->as_double(column);
    return row_.at(column).get<double>();
  }

  long long integer(const std::string& column) const {
    if (reader_) return reader_->as_int(column);
    return row_.at(column).get<long long>();
  }

  std::optional<double> maybe_number(const std::string& column) const {
    if (!has(column)) return std::nullopt;
    return number(column);
  }

  bool flag(const std::string& column) const {
    if (reader_) return reader_->field(column) == "1";
    return row_.at(column).get<bool>();
  }

 private:
  fs::path csv_path_, jsonl_path_;
  std::ifstream in_;
  std::optional<csv::Reader> reader_;
  nlohmann::json row_;
};

}  // namespace

TraceFormat parse_trace_format(std::string_view text) {
  if (text == "csv") return TraceFormat::csv;
  if (text == "jsonl") return TraceFormat::jsonl;
  throw ConfigError(fmt::format("unknown trace format '{}'", text));
}

std::vector<fs::path> write_trace(const SimTrace& trace, const fs::path& dir,
                                  TraceFormat format) {
  fs::create_directories(dir);
  std::vector<fs::path> written;

  Table traversals{"traversals",
                   {"vehicle", "segment", "enter_s", "exit_s", "occupancy"},
                   {}};
  traversals.rows.reserve(trace.traversals.size());
  for (const auto& t : trace.traversals) {
    traversals.rows.push_back(
        {t.vehicle, t.segment, t.enter, t.exit, t.occupancy});
  }
  written.push_back(write_table(traversals, dir, format));

  Table requests{"requests",
                 {"request", "announce_s", "pickup_s", "dropoff_s", "vehicle",
                  "baseline_s", "est_delay_s", "via_station"},
                 {}};
  for (const auto& r : trace.requests) {
    requests.rows.push_back({r.request, r.announce, opt_json(r.pickup),
                             opt_json(r.dropoff), opt_json(r.vehicle),
                             r.baseline, opt_json(r.estimated_delay),
                             r.via_station});
  }
  written.push_back(write_table(requests, dir, format));

  Table rebalancing{"rebalancing", {"tick_s", "from", "to", "count"}, {}};
  for (const auto& f : trace.rebalancing) {
    rebalancing.rows.push_back({f.tick, f.from, f.to, f.count});
  }
  written.push_back(write_table(rebalancing, dir, format));

  Table occupancy{"occupancy", {"time_s", "vehicle", "occupancy"}, {}};
  for (const auto& s : trace.occupancy) {
    occupancy.rows.push_back({s.time, s.vehicle, s.occupancy});
  }
  written.push_back(write_table(occupancy, dir, format));

  Table audits{"audits",
               {"time_s", "parked", "empty_moving", "serving", "total",
                "depot_consistent"},
               {}};
  for (const auto& a : trace.audits) {
    audits.rows.push_back({a.time, a.parked, a.empty_moving, a.serving,
                           a.total, a.depot_consistent});
  }
  written.push_back(write_table(audits, dir, format));

  ordered_json meta;
  meta["mode"] = std::string(to_string(trace.mode));
  meta["start_s"] = trace.start;
  meta["stat_start_s"] = trace.stat_start;
  meta["end_s"] = trace.end;
  meta["finish_s"] = trace.finish;
  meta["q_max_s"] = trace.q_max;
  meta["fleet_size"] = trace.fleet_size;
  meta["unserved"] = trace.unserved;
  meta["rebalancing_shortfall"] = trace.rebalancing_shortfall;
  meta["format"] = format == TraceFormat::csv ? "csv" : "jsonl";
  const auto meta_path = dir / "trace_meta.json";
  open_output(meta_path) << meta.dump(2) << '\n';
  written.push_back(meta_path);
  return written;
}

SimTrace read_trace(const fs::path& dir) {
  SimTrace trace;
  {
    std::ifstream in(dir / "trace_meta.json");
    if (!in) throw LoadError("missing " + (dir / "trace_meta.json").string());
    try {
      const auto meta = nlohmann::json::parse(in);
      trace.mode = parse_mode(meta.at("mode").get<std::string>());
      trace.start = meta.at("start_s").get<double>();
      trace.stat_start = meta.at("stat_start_s").get<double>();
      trace.end = meta.at("end_s").get<double>();
      trace.finish = meta.at("finish_s").get<double>();
      trace.q_max = meta.at("q_max_s").get<double>();
      trace.fleet_size = meta.at("fleet_size").get<std::size_t>();
      trace.unserved = meta.at("unserved").get<std::size_t>();
      trace.rebalancing_shortfall = meta.at("rebalancing_shortfall").get<int>();
    } catch (const nlohmann::json::exception& e) {
      throw LoadError("trace_meta.json: " + std::string(e.what()));
    }
  }
  {
    TableReader t(dir, "traversals");
    while (t.next()) {
      trace.traversals.push_back({t.integer("vehicle"), t.integer("segment"),
                                  t.number("enter_s"), t.number("exit_s"),
                                  static_cast<int>(t.integer("occupancy"))});
    }
  }
  {
    TableReader t(dir, "requests");
    while (t.next()) {
      RequestRecord r;
      r.request = t.integer("request");
      r.announce = t.number("announce_s");
      r.pickup = t.maybe_number("pickup_s");
      r.dropoff = t.maybe_number("dropoff_s");
      if (t.has("vehicle")) r.vehicle = t.integer("vehicle");
      r.baseline = t.number("baseline_s");
      r.estimated_delay = t.maybe_number("est_delay_s");
      r.via_station = t.flag("via_station");
      trace.requests.push_back(r);
    }
  }
  {
    TableReader t(dir, "rebalancing");
    while (t.next()) {
      trace.rebalancing.push_back({t.number("tick_s"), t.integer("from"),
                                   t.integer("to"),
                                   static_cast<int>(t.integer("count"))});
    }
  }
  {
    TableReader t(dir, "occupancy");
    while (t.next()) {
      trace.occupancy.push_back({t.number("time_s"), t.integer("vehicle"),
                                 static_cast<int>(t.integer("occupancy"))});
    }
  }
  {
    TableReader t(dir, "audits");
    while (t.next()) {
      ConservationAudit a;
      a.time = t.number("time_s");
      a.parked = static_cast<int>(t.integer("parked"));
      a.empty_moving = static_cast<int>(t.integer("empty_moving"));
      a.serving = static_cast<int>(t.integer("serving"));
      a.total = static_cast<int>(t.integer("total"));
      a.depot_consistent = t.flag("depot_consistent");
      trace.audits.push_back(a);
    }
  }
  return trace;
}

}  // namespace modsim
