#pragma once

// Subcommand implementations shared by the command-line tool and the Python
// module, plus the persisted RunRecord.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "puncvol/fields.hpp"
#include "puncvol/vec.hpp"

namespace puncvol::cli {

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericFailure = 3 };

struct Options {
  std::string command;
  std::vector<int> n{1};            // chain-table takes a list, everything else one value
  std::optional<std::string> field;
  std::optional<Vec> pole;
  int d = 1;
  double eps = 0.2;
  std::optional<std::uint64_t> seed;
  std::optional<nlohmann::json> grid;
  std::optional<std::vector<double>> thetas;
  std::optional<Vec> point;
  double radius = 0.1;
  std::vector<int> indices;
  std::size_t trials = 1000000;
  int levels = 4;
  std::string format = "json";
  std::optional<std::string> out;

  nlohmann::json to_json() const;
  static Options from_json(const nlohmann::json& j);
  friend bool operator==(const Options&, const Options&) = default;
};

struct RunRecord {
  int schema = kSchemaVersion;
  std::string command;
  nlohmann::json config;
  nlohmann::json results;
  std::string version;
  std::string timestamp;
  std::vector<std::uint64_t> seeds;
  nlohmann::json grids = nlohmann::json::array();
  double duration_s = 0.0;
  int exit_code = kOk;

  nlohmann::json to_json() const;
  static RunRecord from_json(const nlohmann::json& j);
  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

/// Runs one subcommand. Seeds that were drawn are written back into the
/// recorded config, so from_json(record.config) reproduces the payload.
/// Throws the library's error types on failure.
RunRecord execute(const Options& opts);

/// CSV rendering of a record's payload (header row first).
std::string to_csv(const RunRecord& r);

/// Writes via a temporary file in the same directory and renames it over `path`.
void write_atomic(const std::string& path, const std::string& contents);

/// Parses argv, executes, writes --out (or `out`). Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Field spec assembled from the field flags; kind defaults to hopf.
fields::VectorFieldSpec field_spec(const Options& opts);

}  // namespace puncvol::cli
