#include "oppbandit/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "oppbandit/channel.hpp"
#include "oppbandit/common.hpp"
#include "oppbandit/dp.hpp"
#include "oppbandit/monte_carlo.hpp"
#include "oppbandit/parallel.hpp"
#include "oppbandit/steady_state.hpp"

namespace oppbandit {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(s);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& s) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw UsageError("not a number: '" + s + "'");
  }
  if (pos != s.size()) throw UsageError("not a number: '" + s + "'");
  return v;
}

long long parse_int(const std::string& s) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    throw UsageError("not an integer: '" + s + "'");
  }
  if (pos != s.size()) throw UsageError("not an integer: '" + s + "'");
  return v;
}

PolicyKind parse_policy(const std::string& name) {
  if (name == "structural") return PolicyKind::Structural;
  if (name == "argmax") return PolicyKind::Argmax;
  if (name == "random") return PolicyKind::Random;
  if (name == "fixed") return PolicyKind::Fixed;
  throw UsageError("unknown policy '" + name + "'");
}

} // namespace

void apply_spec_line(ExperimentSpec& spec, const std::string& key,
                     const std::string& value) {
  if (key == "command") {
    spec.command = value;
  } else if (key == "p01") {
    spec.p01s.clear();
    for (const auto& v : split_list(value)) spec.p01s.push_back(parse_double(v));
  } else if (key == "p11") {
    spec.p11s.clear();
    for (const auto& v : split_list(value)) spec.p11s.push_back(parse_double(v));
  } else if (key == "n") {
    spec.ns.clear();
    for (const auto& v : split_list(value))
      spec.ns.push_back(static_cast<int>(parse_int(v)));
  } else if (key == "t") {
    spec.horizon = parse_int(value);
  } else if (key == "seed") {
    spec.seed = static_cast<std::uint64_t>(parse_int(value));
  } else if (key == "policy") {
    spec.policy = value;
  } else if (key == "fixed_channel") {
    spec.fixed_channel = static_cast<int>(parse_int(value));
  } else if (key == "replications") {
    spec.replications = static_cast<int>(parse_int(value));
  } else if (key == "format") {
    spec.format = value;
  } else if (key == "output") {
    spec.output = value;
  } else if (key == "jobs") {
    spec.jobs = static_cast<int>(parse_int(value));
  } else {
    throw UsageError("unknown spec key '" + key + "'");
  }
}

ExperimentSpec parse_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open spec file '" + path + "'");
  ExperimentSpec spec;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError(path + ":" + std::to_string(line_no) +
                       ": expected 'key = value'");
    apply_spec_line(spec, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return spec;
}

void validate_spec(const ExperimentSpec& spec) {
  static const std::vector<std::string> commands = {
      "simulate", "analyze", "verify-optimality", "bounds", "rate", "sweep"};
  if (std::find(commands.begin(), commands.end(), spec.command) == commands.end())
    throw UsageError("unknown command '" + spec.command + "'");
  if (spec.p01s.empty() || spec.p11s.empty() || spec.ns.empty())
    throw UsageError("grids must be non-empty");
  if (spec.horizon < 1) throw UsageError("t must be >= 1");
  if (spec.replications < 1) throw UsageError("replications must be >= 1");
  if (spec.jobs < 1) throw UsageError("jobs must be >= 1");
  if (spec.format != "csv" && spec.format != "json")
    throw UsageError("format must be csv or json");
  parse_policy(spec.policy);
  for (int n : spec.ns)
    if (n < 1) throw UsageError("n must be >= 1");
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

namespace {

struct GridCell {
  double p01, p11;
  int n;
  std::size_t index;
};

std::vector<GridCell> expand_grid(const ExperimentSpec& spec) {
  std::vector<GridCell> cells;
  std::size_t idx = 0;
  for (double a : spec.p01s)
    for (double b : spec.p11s)
      for (int n : spec.ns) cells.push_back({a, b, n, idx++});
  return cells;
}

Cell opt_cell(const std::optional<double>& v) {
  if (v) return Cell{*v};
  return Cell{std::monostate{}};
}

// Runs body(cell) over the grid with rows emitted in grid order. Any
// exception from a cell marks the run as a computation error; the row's
// value cells stay empty and the error text lands in the trailing status
// column when the command has one.
template <typename Body>
Table run_grid(const ExperimentSpec& spec, std::vector<std::string> columns,
               bool status_column, Body&& body) {
  Table table;
  table.columns = std::move(columns);
  if (status_column) table.columns.push_back("status");
  const std::vector<GridCell> cells = expand_grid(spec);
  std::vector<std::vector<Cell>> rows(cells.size());
  std::vector<std::string> errors(cells.size());
  parallel_for(cells.size(), spec.jobs, [&](std::size_t i) {
    try {
      rows[i] = body(cells[i]);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < cells.size(); ++i) {
    std::vector<Cell>& row = rows[i];
    const bool failed = !errors[i].empty();
    if (failed) {
      row.assign(table.columns.size() - (status_column ? 1 : 0), Cell{});
      row[0] = cells[i].p01;
      row[1] = cells[i].p11;
      row[2] = static_cast<long long>(cells[i].n);
      table.exit_code = std::max(table.exit_code, 2);
    }
    if (status_column) row.push_back(failed ? "error: " + errors[i] : "ok");
    table.rows.push_back(std::move(row));
  }
  return table;
}

Table cmd_simulate(const ExperimentSpec& spec, bool sweep) {
  std::vector<std::string> columns = {"p01",    "p11",   "N",      "T",
                                      "policy", "U_hat", "stderr", "L_bar_hat"};
  if (sweep) {
    columns.push_back("U_exact");
    columns.push_back("U_lower");
    columns.push_back("U_upper");
  }
  return run_grid(spec, std::move(columns), false, [&](const GridCell& cell) {
    SimConfig cfg(ChannelParams(cell.p01, cell.p11));
    cfg.num_channels = cell.n;
    cfg.horizon = spec.horizon;
    cfg.policy = parse_policy(spec.policy);
    cfg.fixed_channel = spec.fixed_channel;
    cfg.seed = derive_seed(spec.seed, cell.index);
    cfg.replications = spec.replications;
    cfg.jobs = 1; // cells are already parallel
    const SimResult res = simulate(cfg);

    std::vector<Cell> row{cell.p01,
                          cell.p11,
                          static_cast<long long>(cell.n),
                          static_cast<long long>(spec.horizon),
                          spec.policy,
                          res.mean_reward,
                          res.batches >= 2 ? Cell{res.stderr_batch} : Cell{},
                          Cell{}};
    if (res.tp_count > 0) row[7] = tp_statistics(res).l_bar;
    if (sweep) {
      const ThroughputReport rep = analyze_cell(cfg.params, cell.n);
      row.push_back(opt_cell(rep.u_exact));
      row.push_back(rep.u_lower);
      row.push_back(rep.u_upper);
    }
    return row;
  });
}

Table cmd_analyze(const ExperimentSpec& spec) {
  return run_grid(
      spec,
      {"p01", "p11", "N", "U_exact", "U_closed", "U_lower", "U_upper",
       "omega_bar", "omega_bar_prime", "C", "D", "E", "F", "G", "H", "p01_2",
       "p11_2", "p10_2"},
      false, [&](const GridCell& cell) {
        const ThroughputReport rep =
            analyze_cell(ChannelParams(cell.p01, cell.p11), cell.n);
        return std::vector<Cell>{cell.p01,
                                 cell.p11,
                                 static_cast<long long>(cell.n),
                                 opt_cell(rep.u_exact),
                                 opt_cell(rep.u_closed),
                                 rep.u_lower,
                                 rep.u_upper,
                                 opt_cell(rep.omega_bar),
                                 opt_cell(rep.omega_bar_prime),
                                 opt_cell(rep.c),
                                 opt_cell(rep.d),
                                 opt_cell(rep.e),
                                 opt_cell(rep.f),
                                 opt_cell(rep.g),
                                 opt_cell(rep.h),
                                 rep.p01_2,
                                 rep.p11_2,
                                 rep.p10_2};
      });
}

Table cmd_verify_optimality(const ExperimentSpec& spec) {
  Table table = run_grid(
      spec,
      {"p01", "p11", "N", "T", "V_opt", "V_myopic", "gap", "lemma2_holds"},
      true, [&](const GridCell& cell) {
        const ChannelParams params(cell.p01, cell.p11);
        const Belief omega1(cell.n, params.omega_o());
        DpLimits limits;
        limits.jobs = 1;
        const DpSolution sol = solve_dp(params, cell.n,
                                        static_cast<int>(spec.horizon), omega1,
                                        limits);
        return std::vector<Cell>{cell.p01,
                                 cell.p11,
                                 static_cast<long long>(cell.n),
                                 static_cast<long long>(spec.horizon),
                                 sol.v_opt,
                                 sol.v_myopic,
                                 sol.v_opt - sol.v_myopic,
                                 sol.deviation_holds};
      });
  // A found counterexample outranks per-cell computation errors.
  for (const auto& row : table.rows) {
    if (row.size() > 6 && std::holds_alternative<double>(row[6]) &&
        std::get<double>(row[6]) > 1e-9)
      table.exit_code = 3;
  }
  return table;
}

Table cmd_bounds(const ExperimentSpec& spec) {
  return run_grid(
      spec, {"p01", "p11", "N", "U_lower", "U_exact", "U_upper", "rel_gap"},
      false, [&](const GridCell& cell) {
        const ThroughputReport rep =
            analyze_cell(ChannelParams(cell.p01, cell.p11), cell.n);
        const double rel_gap =
            rep.u_upper > 0.0 ? (rep.u_upper - rep.u_lower) / rep.u_upper : 0.0;
        return std::vector<Cell>{cell.p01,
                                 cell.p11,
                                 static_cast<long long>(cell.n),
                                 rep.u_lower,
                                 opt_cell(rep.u_exact),
                                 rep.u_upper,
                                 rel_gap};
      });
}

Table cmd_rate(const ExperimentSpec& spec) {
  // One ratio row per (p01, p11, N); the rate normalization uses each pair's
  // own correlation sign.
  Table table;
  table.columns = {"p01", "p11", "N", "gap", "ratio"};
  for (double a : spec.p01s) {
    for (double b : spec.p11s) {
      int n_min = spec.ns.front();
      int n_max = spec.ns.front();
      for (int n : spec.ns) {
        n_min = std::min(n_min, n);
        n_max = std::max(n_max, n);
      }
      try {
        const RateReport rep = rate_check(ChannelParams(a, b), n_min, n_max);
        for (const RatePoint& pt : rep.points) {
          if (std::find(spec.ns.begin(), spec.ns.end(), pt.num_channels) ==
              spec.ns.end())
            continue;
          table.rows.push_back({a, b, static_cast<long long>(pt.num_channels),
                                pt.gap_to_limit, pt.ratio});
        }
      } catch (const std::exception&) {
        table.rows.push_back({a, b, Cell{}, Cell{}, Cell{}});
        table.exit_code = std::max(table.exit_code, 2);
      }
    }
  }
  return table;
}

} // namespace

Table run_experiment(const ExperimentSpec& spec) {
  validate_spec(spec);
  if (spec.command == "simulate") return cmd_simulate(spec, false);
  if (spec.command == "sweep") return cmd_simulate(spec, true);
  if (spec.command == "analyze") return cmd_analyze(spec);
  if (spec.command == "verify-optimality") return cmd_verify_optimality(spec);
  if (spec.command == "bounds") return cmd_bounds(spec);
  if (spec.command == "rate") return cmd_rate(spec);
  throw UsageError("unknown command '" + spec.command + "'");
}

namespace {

std::string cell_to_csv(const Cell& cell) {
  if (std::holds_alternative<std::monostate>(cell)) return "";
  if (std::holds_alternative<double>(cell))
    return format_number(std::get<double>(cell));
  if (std::holds_alternative<long long>(cell))
    return std::to_string(std::get<long long>(cell));
  if (std::holds_alternative<bool>(cell))
    return std::get<bool>(cell) ? "true" : "false";
  return std::get<std::string>(cell);
}

} // namespace

std::string render_csv(const Table& table) {
  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ',';
    out += table.columns[c];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += cell_to_csv(row[c]);
    }
    out += '\n';
  }
  return out;
}

std::string render_json(const Table& table) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json obj;
    for (std::size_t c = 0; c < row.size() && c < table.columns.size(); ++c) {
      const Cell& cell = row[c];
      if (std::holds_alternative<std::monostate>(cell))
        obj[table.columns[c]] = nullptr;
      else if (std::holds_alternative<double>(cell))
        obj[table.columns[c]] = std::get<double>(cell);
      else if (std::holds_alternative<long long>(cell))
        obj[table.columns[c]] = std::get<long long>(cell);
      else if (std::holds_alternative<bool>(cell))
        obj[table.columns[c]] = std::get<bool>(cell);
      else
        obj[table.columns[c]] = std::get<std::string>(cell);
    }
    rows.push_back(std::move(obj));
  }
  return rows.dump(2) + "\n";
}

} // namespace oppbandit
