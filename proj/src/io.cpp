#include "robsched/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace robsched {

using nlohmann::json;

namespace {

template <class T>
T field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw IoError(std::string("missing field \"") + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw IoError(std::string("bad field \"") + key + "\": " + e.what());
  }
}

}  // namespace

json instance_to_json(const Instance& instance) {
  json jobs = json::array();
  for (std::size_t j = 0; j < instance.jobs.size(); ++j) {
    const Job& job = instance.jobs[j];
    json o = {{"id", j},
              {"p", job.p},
              {"r", job.r},
              {"dist", {{"kind", std::string(to_string(job.dist.kind))}, {"mean", job.dist.mean}, {"cv", job.dist.cv}}}};
    if (job.due) o["due"] = *job.due;
    jobs.push_back(std::move(o));
  }
  json prec = json::array();
  for (const Arc& a : instance.precedence) prec.push_back({a.from, a.to});
  return {{"n", instance.n()}, {"m", instance.m}, {"deadline", instance.deadline}, {"jobs", jobs}, {"precedence", prec}};
}

Instance instance_from_json(const json& j) {
  Instance inst;
  inst.m = field<int>(j, "m");
  inst.deadline = field<double>(j, "deadline");
  const int n = field<int>(j, "n");
  const json& jobs = j.contains("jobs") ? j.at("jobs") : throw IoError("missing field \"jobs\"");
  if (!jobs.is_array() || static_cast<int>(jobs.size()) != n) throw IoError("\"jobs\" must be an array of n entries");
  inst.jobs.resize(static_cast<std::size_t>(n));
  for (const json& o : jobs) {
    const int id = field<int>(o, "id");
    if (id < 0 || id >= n) throw IoError("job id out of range: " + std::to_string(id));
    Job& job = inst.jobs[static_cast<std::size_t>(id)];
    job.p = field<double>(o, "p");
    job.r = o.contains("r") ? field<double>(o, "r") : 0.0;
    if (o.contains("due") && !o.at("due").is_null()) job.due = field<double>(o, "due");
    if (o.contains("dist")) {
      const json& d = o.at("dist");
      try {
        job.dist.kind = parse_dist_kind(field<std::string>(d, "kind"));
      } catch (const std::invalid_argument& e) {
        throw IoError(e.what());
      }
      job.dist.mean = d.contains("mean") ? field<double>(d, "mean") : job.p;
      job.dist.cv = d.contains("cv") ? field<double>(d, "cv") : 0.0;
    } else {
      job.dist = DistributionSpec{DistKind::deterministic, job.p, 0.0};
    }
  }
  if (j.contains("precedence")) {
    for (const json& a : j.at("precedence")) {
      if (!a.is_array() || a.size() != 2) throw IoError("precedence entries must be [from, to] pairs");
      inst.precedence.push_back({a[0].get<int>(), a[1].get<int>()});
    }
  }
  const auto problems = check_instance(inst);
  if (!problems.empty()) throw IoError("invalid instance: " + problems.front());
  return inst;
}

json schedule_to_json(const ScheduleRecord& rec) {
  return {{"instance_id", rec.instance_id},
          {"schedule_id", rec.schedule_id},
          {"machine_order", rec.machine_order},
          {"start", rec.start}};
}

ScheduleRecord schedule_from_json(const json& j) {
  ScheduleRecord rec;
  rec.instance_id = field<std::string>(j, "instance_id");
  rec.schedule_id = field<int>(j, "schedule_id");
  rec.machine_order = field<MachineOrder>(j, "machine_order");
  rec.start = field<std::vector<double>>(j, "start");
  return rec;
}

Schedule to_schedule(const ScheduleRecord& rec, std::shared_ptr<const Instance> instance) {
  if (static_cast<int>(rec.start.size()) != instance->n())
    throw IoError("schedule " + std::to_string(rec.schedule_id) + " has the wrong number of start times");
  if (static_cast<int>(rec.machine_order.size()) != instance->m)
    throw IoError("schedule " + std::to_string(rec.schedule_id) + " has the wrong number of machines");
  return Schedule{std::move(instance), rec.machine_order, rec.start};
}

json interval_to_json(const IntervalSolution& sol) {
  json rows = json::array();
  for (std::size_t j = 0; j < sol.e.size(); ++j) rows.push_back({{"job", j}, {"e", sol.e[j]}, {"l", sol.l[j]}});
  return {{"objective", sol.objective}, {"intervals", rows}};
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

Instance read_instance(const std::filesystem::path& path) {
  try {
    return instance_from_json(json::parse(read_text(path)));
  } catch (const json::parse_error& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void write_instance(const std::filesystem::path& path, const Instance& instance) {
  write_text(path, instance_to_json(instance).dump(2) + "\n");
}

std::vector<ScheduleRecord> read_schedules(const std::filesystem::path& path) {
  std::istringstream in(read_text(path));
  std::vector<ScheduleRecord> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(schedule_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_schedules(const std::filesystem::path& path, const std::vector<ScheduleRecord>& records) {
  std::string text;
  for (const auto& rec : records) text += schedule_to_json(rec).dump() + "\n";
  write_text(path, text);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::optional<std::size_t> CsvTable::find_column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  return std::nullopt;
}

std::size_t CsvTable::column(std::string_view name) const {
  if (auto i = find_column(name)) return *i;
  throw SchemaError("missing column \"" + std::string(name) + "\"");
}

std::vector<double> CsvTable::numeric(std::string_view name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    const std::string& cell = c < row.size() ? row[c] : std::string();
    if (cell.empty()) {
      out.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(cell, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != cell.size()) throw SchemaError("column \"" + std::string(name) + "\": not a number: " + cell);
    out.push_back(v);
  }
  return out;
}

std::string to_csv(const CsvTable& table) {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(table.header);
  for (const auto& row : table.rows) line(row);
  return out;
}

CsvTable parse_csv(std::string_view text) {
  CsvTable t;
  bool first = true;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = end + 1;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t p = 0;
    for (;;) {
      const std::size_t comma = line.find(',', p);
      cells.emplace_back(line.substr(p, comma == std::string_view::npos ? std::string_view::npos : comma - p));
      if (comma == std::string_view::npos) break;
      p = comma + 1;
    }
    if (first) {
      t.header = std::move(cells);
      first = false;
    } else {
      if (cells.size() != t.header.size()) throw SchemaError("row width does not match header");
      t.rows.push_back(std::move(cells));
    }
  }
  if (first) throw SchemaError("empty CSV input");
  return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
  try {
    return parse_csv(read_text(path));
  } catch (const SchemaError& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) { write_text(path, to_csv(table)); }

}  // namespace robsched
