#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "coagfrag/config.hpp"
#include "coagfrag/diagnostics.hpp"
#include "coagfrag/errors.hpp"
#include "coagfrag/oracle.hpp"
#include "coagfrag/output.hpp"
#include "coagfrag/simd.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace coagfrag;

namespace {

enum Exit { kOk = 0, kValidation = 1, kNumerical = 2 };

struct Options {
  std::string config;
  std::string builtin;
  std::string out;
  bool allow_unvalidated = false;
  std::size_t doublings = 3;
  std::optional<double> eps;
  double delta = 1e-2;
  std::size_t samples = 20;
  std::size_t cases = 1000;
  std::uint64_t seed = 20240611;
};

// Shared state of one invocation; run.json is assembled from it on exit.
struct Run {
  std::string command;
  json summary = json::object();
  std::optional<SimConfig> cfg;
  fs::path out_dir = "results";
};

SimConfig load(const Options& o, bool allow_unvalidated) {
  if (!o.builtin.empty()) {
    if (!o.config.empty()) throw ConfigError("--config and --builtin are mutually exclusive");
    SimConfig cfg = builtin_config(o.builtin);
    cfg.allow_unvalidated = allow_unvalidated;
    return cfg;
  }
  if (o.config.empty()) throw ConfigError("--config (or --builtin) is required");
  return parse_config_file(o.config, allow_unvalidated);
}

void attach_config(Run& run, const Options& o, SimConfig cfg) {
  run.out_dir = o.out.empty() ? fs::path(cfg.outputs.directory) : fs::path(o.out);
  run.summary["config_hash"] = cfg.hash();
  run.summary["defaults_applied"] = cfg.defaults_applied;
  const auto grid = cfg.make_grid();
  const auto g0 = cfg.initial_density(grid);
  const auto b = apriori_bounds(g0, cfg.kernels, cfg.time.t_end);
  run.summary["apriori"] = {{"V1", b.overflow ? json(nullptr) : json(b.V1)},
                            {"V", b.overflow ? json(nullptr) : json(b.V)},
                            {"N", b.N},
                            {"k2", b.k2},
                            {"T", b.T},
                            {"norm_dz", b.norm_dz},
                            {"norm_zdz", b.norm_zdz},
                            {"overflow", b.overflow}};
  run.summary["grid"] = {{"z_min", grid->edge(0)},
                         {"z_max", grid->edge(grid->cells())},
                         {"cells", grid->cells()},
                         {"ratio", grid->ratio()}};
  run.cfg = std::move(cfg);
}

void print_hypotheses(const HypothesisReport& r) {
  std::printf("%-6s %-5s %-14s %s\n", "id", "state", "worst_margin", "witness");
  for (const auto& c : r.checks) {
    std::printf("%-6s %-5s %-14.6g %s\n", c.id.c_str(), c.passed ? "PASS" : "FAIL", c.worst_margin,
                c.witness.c_str());
  }
}

int cmd_simulate(Run& run, const Options& o) {
  attach_config(run, o, load(o, o.allow_unvalidated));
  const SimConfig& cfg = *run.cfg;
  if (!cfg.hypotheses.all_passed()) {
    std::fprintf(stderr, "warning: structural hypothesis checks failed; results carry no guarantee\n");
    print_hypotheses(cfg.hypotheses);
  }
  run.summary["final_mass_residual"] = nullptr;
  const auto traj = simulate(cfg);
  output::write_moments_csv(run.out_dir / "moments.csv", cfg, traj);
  output::write_snapshots_csv(run.out_dir / "snapshots.csv", cfg, traj);
  output::write_steps_csv(run.out_dir / "steps.csv", cfg, traj);
  const auto& last = traj.moments.rows.back();
  const double m1_0 = traj.moments.rows.front()[1];
  run.summary["final_mass_residual"] = m1_0 > 0.0 ? std::abs(last[1] - m1_0) / m1_0 : 0.0;
  run.summary["max_mass_residual"] = traj.max_mass_residual();
  run.summary["max_weighted_norm"] = max_weighted_norm(traj);
  run.summary["accepted_steps"] = traj.accepted_steps();
  run.summary["rejected_steps"] = traj.rejected_steps();
  run.summary["files"] = {"moments.csv", "snapshots.csv", "steps.csv"};
  std::printf("simulate: %zu accepted / %zu rejected steps, max mass residual %.3g, output in %s\n",
              traj.accepted_steps(), traj.rejected_steps(), traj.max_mass_residual(), run.out_dir.c_str());
  return kOk;
}

int cmd_validate(Run& run, const Options& o) {
  // parameter-range violations become table rows here instead of refusals
  attach_config(run, o, load(o, true));
  const SimConfig& cfg = *run.cfg;
  const auto ranges = check_parameter_ranges(cfg.kernels);
  for (const auto& v : ranges) std::printf("%-6s %-5s kernels.%s: %s\n", "range", "FAIL", v.key.c_str(), v.message.c_str());
  print_hypotheses(cfg.hypotheses);
  json checks = json::array();
  for (const auto& c : cfg.hypotheses.checks) {
    checks.push_back({{"id", c.id}, {"passed", c.passed}, {"worst_margin", c.worst_margin}, {"witness", c.witness}});
  }
  run.summary["hypotheses"] = checks;
  json rv = json::array();
  for (const auto& v : ranges) rv.push_back({{"key", v.key}, {"message", v.message}, {"fatal", v.fatal}});
  run.summary["range_violations"] = rv;
  const bool ok = ranges.empty() && cfg.hypotheses.all_passed();
  if (!ok) run.summary["error"] = "kernel hypothesis validation failed";
  return ok ? kOk : kValidation;
}

int cmd_converge(Run& run, const Options& o) {
  attach_config(run, o, load(o, o.allow_unvalidated));
  const SimConfig& cfg = *run.cfg;
  const auto study = truncation_study(cfg, o.doublings);
  output::write_truncation_csv(run.out_dir / "truncation.csv", cfg, study);
  run.summary["distances"] = study.distances();
  json files = {"truncation.csv"};
  std::printf("%-6s %-12s %-8s %s\n", "level", "n", "cells", "distance");
  for (std::size_t l = 0; l + 1 < study.levels.size(); ++l) {
    const auto& lv = study.levels[l];
    std::printf("%-6zu %-12.6g %-8zu %.6g\n", l, lv.n, lv.cells, lv.distance);
  }
  if (o.eps) {
    const auto integrals = higher_moment_integrals(cfg, *o.eps, o.doublings);
    auto out = output::csv_preamble(cfg, *cfg.make_grid());
    out += "level,n,order,integral\n";
    const double order = 2.0 + cfg.kernels.eta() - *o.eps;
    for (std::size_t l = 0; l < integrals.size(); ++l) {
      out += std::to_string(l) + "," + output::number(study.levels[l].n) + "," + output::number(order) + "," +
             output::number(integrals[l]) + "\n";
    }
    fs::create_directories(run.out_dir);
    std::ofstream(run.out_dir / "higher_moments.csv", std::ios::binary) << out;
    run.summary["higher_moment_integrals"] = integrals;
    files.push_back("higher_moments.csv");
  }
  run.summary["files"] = files;
  return kOk;
}

int cmd_perturb(Run& run, const Options& o) {
  attach_config(run, o, load(o, o.allow_unvalidated));
  const SimConfig& cfg = *run.cfg;
  const auto r = perturbation_closeness(cfg, o.delta, o.samples);
  output::write_perturbation_csv(run.out_dir / "perturbation.csv", cfg, r);
  run.summary["perturbation"] = {{"delta", r.delta},
                                 {"lambda", r.lambda},
                                 {"lambda_ls", r.lambda_ls},
                                 {"max_u", r.max_u()},
                                 {"envelope_holds", r.envelope_holds}};
  run.summary["files"] = {"perturbation.csv"};
  std::printf("perturb: delta=%g max u=%.6g lambda=%.6g (least squares %.6g)\n", r.delta, r.max_u(), r.lambda,
              r.lambda_ls);
  return kOk;
}

int cmd_oracle(Run& run, const Options& o) {
  if (!o.out.empty()) run.out_dir = o.out;
  const auto results = oracle::run_certification(o.cases, o.seed);
  json rows = json::array();
  bool ok = true;
  for (const auto& r : results) {
    std::printf("%s  %s  (%s)\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
    rows.push_back({{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
    ok = ok && r.passed;
  }
  run.summary["certification"] = rows;
  run.summary["seed"] = o.seed;
  if (!ok) run.summary["error"] = "certification battery has failing checks";
  return ok ? kOk : kValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sectional solver for coagulation with collision-induced multiple fragmentation"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    if (needs_config) {
      sub->add_option("--config", o.config, "configuration file (JSON)");
      sub->add_option("--builtin", o.builtin, "named built-in configuration instead of --config")
          ->check(CLI::IsMember(builtin_config_names()));
      sub->add_flag("--allow-unvalidated", o.allow_unvalidated, "run despite kernel parameter-range violations");
    }
    sub->add_option("--out", o.out, "output directory (default: outputs.directory of the config)");
  };

  auto* simulate_cmd = app.add_subcommand("simulate", "integrate a configuration and write trajectory files");
  add_common(simulate_cmd, true);
  auto* validate_cmd = app.add_subcommand("validate-kernels", "check the kernel hypotheses and print a table");
  add_common(validate_cmd, true);
  auto* converge_cmd = app.add_subcommand("converge", "truncation self-convergence study");
  add_common(converge_cmd, true);
  converge_cmd->add_option("--doublings", o.doublings, "number of domain doublings")->check(CLI::Range(2, 12));
  converge_cmd->add_option("--eps", o.eps, "also integrate the moment of order 2 + eta - eps per level");
  auto* perturb_cmd = app.add_subcommand("perturb", "twin runs from g0 and g0 (1 + delta cos z)");
  add_common(perturb_cmd, true);
  perturb_cmd->add_option("--delta", o.delta, "perturbation amplitude");
  perturb_cmd->add_option("--samples", o.samples, "uniform sample intervals on [0, t_end]");
  auto* oracle_cmd = app.add_subcommand("oracle", "run the certification battery");
  add_common(oracle_cmd, false);
  oracle_cmd->add_option("--cases", o.cases, "randomized 8-cell cases");
  oracle_cmd->add_option("--seed", o.seed, "seed for the randomized cases");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  Run run;
  CLI::App* sub = app.get_subcommands().front();
  run.command = sub->get_name();
  if (!o.out.empty()) run.out_dir = o.out;
  const auto start = std::chrono::steady_clock::now();

  int code = kOk;
  std::string status = "ok";
  try {
    if (sub == simulate_cmd) code = cmd_simulate(run, o);
    else if (sub == validate_cmd) code = cmd_validate(run, o);
    else if (sub == converge_cmd) code = cmd_converge(run, o);
    else if (sub == perturb_cmd) code = cmd_perturb(run, o);
    else code = cmd_oracle(run, o);
    if (code == kValidation) status = "validation_failure";
  } catch (const ConfigError& e) {
    code = kValidation;
    status = "validation_failure";
    run.summary["error"] = e.what();
  } catch (const DomainError& e) {
    code = kValidation;
    status = "validation_failure";
    run.summary["error"] = e.what();
  } catch (const NumericalError& e) {
    code = kNumerical;
    status = "numerical_failure";
    run.summary["error"] = e.what();
  } catch (const std::exception& e) {
    code = kNumerical;
    status = "numerical_failure";
    run.summary["error"] = std::string("unexpected failure: ") + e.what();
  }
  if (code != kOk && run.summary.contains("error")) {
    std::fprintf(stderr, "error: %s\n", run.summary["error"].get<std::string>().c_str());
  }

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json doc = {{"schema", kSchema},
              {"command", run.command},
              {"status", status},
              {"exit_code", code},
              {"config_hash", nullptr},
              {"apriori", {{"V1", nullptr}, {"V", nullptr}}},
              {"final_mass_residual", nullptr},
              {"isa", std::string(simd::name(simd::active().isa))},
              {"wall_time_s", wall}};
  doc.update(run.summary);
  try {
    output::write_json(run.out_dir / "run.json", doc);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: could not write run.json: %s\n", e.what());
    if (code == kOk) code = kNumerical;
  }
  return code;
}
