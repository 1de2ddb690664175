// Command-line front end: experiment orchestration with machine-readable
// CSV/JSON output.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "oppbandit/experiment.hpp"

namespace {

struct Overrides {
  std::string spec_file;
  std::string p01, p11, n;
  long long horizon = 0;
  long long seed = -1;
  std::string policy;
  int fixed_channel = -1;
  int replications = 0;
  std::string format;
  std::string output;
  int jobs = 0;
};

int run(const std::string& command, const Overrides& ov, CLI::App* sub) {
  using namespace oppbandit;
  ExperimentSpec spec;
  if (!ov.spec_file.empty()) spec = parse_spec_file(ov.spec_file);
  spec.command = command;

  if (const char* env = std::getenv("OPP_BANDIT_JOBS")) {
    try {
      spec.jobs = std::max(1, std::stoi(env));
    } catch (const std::exception&) {
      throw UsageError("OPP_BANDIT_JOBS is not an integer");
    }
  }

  if (sub->count("--p01")) apply_spec_line(spec, "p01", ov.p01);
  if (sub->count("--p11")) apply_spec_line(spec, "p11", ov.p11);
  if (sub->count("--n")) apply_spec_line(spec, "n", ov.n);
  if (sub->count("--t")) spec.horizon = ov.horizon;
  if (sub->count("--seed")) spec.seed = static_cast<std::uint64_t>(ov.seed);
  if (sub->count("--policy")) spec.policy = ov.policy;
  if (sub->count("--fixed-channel")) spec.fixed_channel = ov.fixed_channel;
  if (sub->count("--replications")) spec.replications = ov.replications;
  if (sub->count("--format")) spec.format = ov.format;
  if (sub->count("--output")) spec.output = ov.output;
  if (sub->count("--jobs")) spec.jobs = ov.jobs;

  const Table table = run_experiment(spec);
  const std::string text =
      spec.format == "json" ? render_json(table) : render_csv(table);
  if (spec.output.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(spec.output, std::ios::binary);
    if (!out) throw UsageError("cannot write output file '" + spec.output + "'");
    out << text;
  }
  return table.exit_code;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Myopic multi-channel opportunistic access: simulation and analysis"};
  app.require_subcommand(1);

  const std::vector<std::string> commands = {"simulate", "analyze",
                                             "verify-optimality", "bounds",
                                             "rate", "sweep"};
  Overrides ov;
  std::vector<CLI::App*> subs;
  for (const std::string& name : commands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("spec", ov.spec_file, "experiment spec file (key = value)");
    sub->add_option("--p01", ov.p01, "comma-separated p01 grid");
    sub->add_option("--p11", ov.p11, "comma-separated p11 grid");
    sub->add_option("--n", ov.n, "comma-separated channel counts");
    sub->add_option("--t", ov.horizon, "horizon in slots");
    sub->add_option("--seed", ov.seed, "master seed");
    sub->add_option("--policy", ov.policy,
                    "structural | argmax | random | fixed");
    sub->add_option("--fixed-channel", ov.fixed_channel,
                    "channel used by the fixed policy");
    sub->add_option("--replications", ov.replications, "independent runs per cell");
    sub->add_option("--format", ov.format, "csv | json");
    sub->add_option("--output", ov.output, "output path (default stdout)");
    sub->add_option("--jobs", ov.jobs,
                    "worker count (default $OPP_BANDIT_JOBS or 1)");
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    for (std::size_t i = 0; i < commands.size(); ++i)
      if (subs[i]->parsed()) return run(commands[i], ov, subs[i]);
    return 1;
  } catch (const oppbandit::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
