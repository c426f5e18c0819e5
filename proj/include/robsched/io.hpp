#pragma once

#include <cstdio>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "robsched/core.hpp"
#include "robsched/lp.hpp"

namespace robsched {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Missing or malformed columns in an input CSV.
class SchemaError : public IoError {
 public:
  using IoError::IoError;
};

nlohmann::json instance_to_json(const Instance& instance);
/// Throws IoError on missing fields, wrong types or invariant violations.
Instance instance_from_json(const nlohmann::json& j);

struct ScheduleRecord {
  std::string instance_id;
  int schedule_id = 0;
  MachineOrder machine_order;
  std::vector<double> start;
};

nlohmann::json schedule_to_json(const ScheduleRecord& rec);
ScheduleRecord schedule_from_json(const nlohmann::json& j);
Schedule to_schedule(const ScheduleRecord& rec, std::shared_ptr<const Instance> instance);

nlohmann::json interval_to_json(const IntervalSolution& sol);

std::string read_text(const std::filesystem::path& path);
/// Creates parent directories.
void write_text(const std::filesystem::path& path, std::string_view text);

Instance read_instance(const std::filesystem::path& path);
void write_instance(const std::filesystem::path& path, const Instance& instance);
std::vector<ScheduleRecord> read_schedules(const std::filesystem::path& path);
void write_schedules(const std::filesystem::path& path, const std::vector<ScheduleRecord>& records);

/// Shortest round-trip decimal ("%.17g").
std::string format_double(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Throws SchemaError when the column is missing.
  std::size_t column(std::string_view name) const;
  std::optional<std::size_t> find_column(std::string_view name) const;
  /// Parses a numeric column; blank cells become NaN. Throws SchemaError on junk.
  std::vector<double> numeric(std::string_view name) const;
};

/// Minimal CSV without quoting: fields must not contain commas or newlines.
std::string to_csv(const CsvTable& table);
CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

}  // namespace robsched
