#pragma once

// Command-line front end: resolves an experiment from flags and an optional
// key-value config file, runs it, and writes the per-iteration CSV tables.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "crowdcharge/balancing.hpp"
#include "crowdcharge/metrics.hpp"
#include "crowdcharge/model.hpp"

namespace crowdcharge {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown for --help; carries the usage text.
class HelpRequested : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitIo = 2;

inline constexpr const char* kCsvHeader =
    "method,rep_count,iteration,total_energy,variation_distance,meetings,balanced_count,"
    "exec_time_us";

struct ExperimentSpec {
  SimParams params;
  std::vector<StrategyKind> methods;
  std::vector<double> betas;             // one output file per (beta, users)
  std::vector<std::size_t> user_counts;
  std::size_t reps = 50;
  std::size_t threads = 1;
  std::filesystem::path output = "crowdcharge.csv";
  std::filesystem::path social_graph;    // empty: random graph per run
  std::filesystem::path mobility_trace;  // empty: no visit dump
  bool paper_suite = false;
};

// args excludes the program name. seed_override (CROWDCHARGE_SEED) wins over
// --seed. Throws ConfigError or HelpRequested.
ExperimentSpec parse_config(std::span<const std::string> args,
                            std::optional<std::string> seed_override = std::nullopt);

// The resolved configuration in the same key = value form --config reads.
void write_resolved_config(const ExperimentSpec& spec, std::ostream& out);

void write_csv(std::ostream& out, std::span<const MetricsTrace> traces);

// First iteration whose mean balanced count reaches `fraction` of the users.
std::optional<std::size_t> iteration_reaching(const MetricsTrace& trace, std::size_t users,
                                              double fraction);

// Runs every (beta, users) combination of the spec, or the full reproduction
// suite when paper_suite is set. Returns the written CSV paths. Throws
// IoError when an output cannot be written.
std::vector<std::filesystem::path> run_and_emit(const ExperimentSpec& spec,
                                                std::ostream& console);

// Seven experiment groups: two ablations and five benchmark comparisons.
std::vector<std::filesystem::path> paper_suite(const ExperimentSpec& spec,
                                               std::ostream& console);

// Process entry point shared by the binary and the tests.
int run_cli(std::span<const std::string> args, std::optional<std::string> seed_override,
            std::ostream& out, std::ostream& err);

}  // namespace crowdcharge
