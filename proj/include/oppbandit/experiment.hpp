#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace oppbandit {

// Thrown for malformed specs and bad command-line values; mapped to exit
// code 1 by the CLI.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// One experiment description: a command plus the parameter grid it runs
// over. Specs load from flat key = value files (lists are comma separated,
// '#' starts a comment) and individual fields can then be overridden by
// command-line flags.
struct ExperimentSpec {
  std::string command; // simulate | analyze | verify-optimality | bounds | rate | sweep
  std::vector<double> p01s{0.2};
  std::vector<double> p11s{0.8};
  std::vector<int> ns{2};
  long long horizon = 10000;
  std::uint64_t seed = 1;
  std::string policy = "structural"; // structural | argmax | random | fixed
  int fixed_channel = 0;
  int replications = 1;
  std::string format = "csv"; // csv | json
  std::string output;         // empty writes to stdout
  int jobs = 1;
};

ExperimentSpec parse_spec_file(const std::string& path);
void apply_spec_line(ExperimentSpec& spec, const std::string& key,
                     const std::string& value);
void validate_spec(const ExperimentSpec& spec);

using Cell = std::variant<std::monostate, double, long long, bool, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  int exit_code = 0; // 0 ok, 2 computation error in some cell, 3 counterexample found
};

// Runs the spec's command over its grid. Grid cells are dispatched to
// spec.jobs workers and rows always come back in grid order, so the rendered
// bytes are identical for any jobs value.
Table run_experiment(const ExperimentSpec& spec);

// Fixed columns per command, header row, 12 significant digits, LF endings.
std::string render_csv(const Table& table);
std::string render_json(const Table& table);

// Formats one double exactly the way the CSV renderer does.
std::string format_number(double v);

} // namespace oppbandit
