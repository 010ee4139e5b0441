// missing-mass: command-line front end for the mmass library.
//
// Exit codes: 0 ok, 1 an experiment cell failed its check, 2 unreadable or
// malformed input (including unknown flags), 3 precondition violation.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mmass/mmass.hpp"

namespace {

using mmass::Json;

constexpr int kExitCellFailed = 1;
constexpr int kExitInput = 2;
constexpr int kExitPrecondition = 3;

struct InputOptions {
  std::string path;
  std::string format = "raw";

  void add_to(CLI::App* cmd) {
    cmd->add_option("--input", path, "sample file (raw) or counts CSV")->required();
    cmd->add_option("--format", format, "raw: one symbol per line; counts: CSV with header symbol,count")
        ->check(CLI::IsMember({"raw", "counts"}));
  }

  mmass::SampleProfile load() const {
    std::ifstream in(path);
    if (!in) throw mmass::parse_error("cannot open input file '" + path + "'");
    return format == "counts" ? mmass::read_counts_csv(in) : mmass::read_raw_sample(in);
  }
};

unsigned checked_order(std::int64_t r) {
  mmass::require(r >= 1, "r must be >= 1");
  return static_cast<unsigned>(r);
}

void print(const Json& j) { std::cout << j.dump(2) << '\n'; }

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw mmass::parse_error("cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct ExperimentOptions {
  std::string config_path;
  std::string kind;
  std::string dist;
  std::vector<std::uint64_t> ns;
  std::vector<unsigned> rs;
  std::vector<double> xs;
  std::uint64_t reps = 0;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string csv_path;
  CLI::App* cmd = nullptr;

  void add_to(CLI::App* c) {
    cmd = c;
    c->add_option("--config", config_path, "key = value experiment file");
    c->add_option("--kind", kind, "experiment kind");
    c->add_option("--dist", dist, "distribution spec, e.g. uniform:k=100");
    c->add_option("--n", ns, "sample sizes")->delimiter(',');
    c->add_option("--r", rs, "orders")->delimiter(',');
    c->add_option("--x", xs, "confidence exponents")->delimiter(',');
    c->add_option("--reps", reps, "replicates per cell (>= 100)");
    c->add_option("--seed", seed, "master seed");
    c->add_option("--threads", threads, "worker threads (default: all cores)");
    c->add_option("--csv", csv_path, "also write the cells as CSV");
  }

  int run(std::string_view default_kind, std::initializer_list<std::string_view> allowed) const {
    mmass::ExperimentConfig cfg;
    cfg.kind = mmass::parse_experiment_kind(default_kind);
    if (!config_path.empty()) cfg = mmass::parse_config(read_file(config_path), cfg.kind);
    if (cmd->count("--kind")) cfg.kind = mmass::parse_experiment_kind(kind);
    if (cmd->count("--dist")) cfg.dist = dist;
    if (cmd->count("--n")) cfg.ns = ns;
    if (cmd->count("--r")) cfg.rs = rs;
    if (cmd->count("--x")) cfg.xs = xs;
    if (cmd->count("--reps")) cfg.reps = reps;
    if (cmd->count("--seed")) cfg.seed = seed;
    if (cmd->count("--threads")) cfg.threads = threads;

    bool ok_kind = false;
    for (const auto a : allowed) ok_kind = ok_kind || mmass::to_string(cfg.kind) == a;
    if (!ok_kind)
      throw mmass::parse_error("experiment kind '" + std::string(mmass::to_string(cfg.kind)) +
                               "' does not belong to this command");

    const auto report = mmass::run_experiment(cfg);
    print(mmass::to_json(report));
    if (!csv_path.empty()) {
      std::ofstream out(csv_path);
      if (!out) throw mmass::parse_error("cannot write CSV file '" + csv_path + "'");
      out << mmass::to_csv(report);
    }
    return report.all_pass() ? 0 : kExitCellFailed;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Missing-mass estimation, confidence intervals, and Monte Carlo certification"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "missing-mass 1.0");

  // estimate
  InputOptions est_in;
  std::int64_t est_r = 1;
  auto* estimate = app.add_subcommand("estimate", "Good-Turing estimate of the r-order missing mass");
  est_in.add_to(estimate);
  estimate->add_option("--r", est_r, "order r >= 1")->required();

  // interval
  InputOptions int_in;
  std::int64_t int_r = 1;
  double int_x = 0.0;
  auto* interval = app.add_subcommand("interval", "confidence bounds for the r-order missing mass");
  int_in.add_to(interval);
  interval->add_option("--r", int_r, "order r >= 1")->required();
  interval->add_option("--x", int_x, "confidence exponent x > 0")->required();

  // match
  InputOptions match_in;
  double match_x = 0.0;
  auto* match = app.add_subcommand("match", "rare-type match ratio and its interval");
  match_in.add_to(match);
  match->add_option("--x", match_x, "confidence exponent x > 0")->required();

  // simulate
  std::string sim_dist, sim_out;
  std::uint64_t sim_n = 0, sim_seed = 0;
  auto* simulate = app.add_subcommand("simulate", "draw a sample and write symbol ids, one per line");
  simulate->add_option("--dist", sim_dist, "distribution spec")->required();
  simulate->add_option("--n", sim_n, "sample size")->required();
  simulate->add_option("--seed", sim_seed, "seed")->required();
  simulate->add_option("--output", sim_out, "output file (default: stdout)");

  // experiments
  ExperimentOptions conc_opts, cov_opts, cons_opts;
  auto* concentration = app.add_subcommand("concentration", "tail-inequality certification");
  conc_opts.add_to(concentration);
  auto* coverage = app.add_subcommand("coverage", "interval coverage certification");
  cov_opts.add_to(coverage);
  auto* consistency = app.add_subcommand("consistency", "relative-loss rate check on regularly varying laws");
  cons_opts.add_to(consistency);

  // bayes-demo
  std::int64_t bayes_r = 1;
  double bayes_d = 0.01, bayes_eps = 0.5;
  std::uint64_t bayes_n = 50, bayes_reps = 10000, bayes_draws = 2000, bayes_seed = 0;
  unsigned bayes_threads = 0;
  auto* bayes = app.add_subcommand("bayes-demo", "Bayes risk of the best constant prediction, Dirichlet prior");
  bayes->add_option("--r", bayes_r, "order r >= 1");
  bayes->add_option("--d", bayes_d, "prior strength in (0,1)");
  bayes->add_option("--epsilon", bayes_eps, "relative tolerance in (0,1)");
  bayes->add_option("--n", bayes_n, "sample size");
  bayes->add_option("--reps", bayes_reps, "replicates");
  bayes->add_option("--draws", bayes_draws, "posterior draws per replicate");
  bayes->add_option("--seed", bayes_seed, "master seed")->required();
  bayes->add_option("--threads", bayes_threads, "worker threads");

  // lecam-demo
  std::int64_t lecam_r = 1;
  double lecam_eps = 0.5, lecam_omega2 = 1e-6;
  std::uint64_t lecam_n = 100, lecam_reps = 10000, lecam_seed = 0;
  auto* lecam = app.add_subcommand("lecam-demo", "two-point lower bound on the relative-loss risk");
  lecam->add_option("--r", lecam_r, "order r >= 1");
  lecam->add_option("--epsilon", lecam_eps, "relative tolerance in (0,1)");
  lecam->add_option("--omega2", lecam_omega2, "weight of the rare atom in (0,1)");
  lecam->add_option("--n", lecam_n, "sample size");
  lecam->add_option("--reps", lecam_reps, "replicates");
  lecam->add_option("--seed", lecam_seed, "master seed")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*estimate) {
      const auto p = est_in.load();
      const unsigned r = checked_order(est_r);
      const double theta = mmass::gt_estimate(p, r);
      print(Json{{"n", p.n()}, {"r", r}, {"m_r", p.m_r(r)}, {"c_r", p.c_r(r)}, {"theta_hat", theta}});
    } else if (*interval) {
      const auto p = int_in.load();
      const auto rep = mmass::interval_report(p, checked_order(int_r), int_x);
      print(Json{{"n", rep.n},
                 {"r", rep.r},
                 {"x", rep.x},
                 {"theta_hat", rep.estimate},
                 {"lower", rep.lower},
                 {"upper", rep.upper},
                 {"lower_raw", rep.lower_raw},
                 {"upper_raw", rep.upper_raw},
                 {"lower_guarantee", rep.lower_guarantee},
                 {"upper_guarantee", rep.upper_guarantee},
                 {"joint_guarantee", rep.joint_guarantee}});
    } else if (*match) {
      const auto p = match_in.load();
      const auto rep = mmass::match_interval(p, match_x);
      Json j;
      j["n"] = p.n();
      j["x"] = rep.x;
      switch (rep.t_hat.status) {
        case mmass::RatioStatus::finite: j["t_hat"] = rep.t_hat.value; break;
        case mmass::RatioStatus::infinite: j["t_hat"] = "inf"; break;
        case mmass::RatioStatus::undefined: j["t_hat"] = "undefined"; break;
      }
      j["t_hat_status"] = mmass::to_string(rep.t_hat.status);
      j["low"] = rep.low;
      j["high"] = mmass::json_number(rep.high);
      j["high_case"] = rep.high_finite ? "finite" : "infinite";
      j["guarantee"] = rep.guarantee;
      if (rep.t_hat.status == mmass::RatioStatus::infinite)
        j["warning"] = "no symbol seen exactly twice (M_2 = 0); t_hat is infinite";
      else if (rep.t_hat.status == mmass::RatioStatus::undefined)
        j["warning"] = "no symbol seen once or twice (M_1 = M_2 = 0); t_hat is undefined";
      print(j);
    } else if (*simulate) {
      const auto dist = mmass::parse_distribution(sim_dist);
      const auto ids = dist.sample(sim_n, sim_seed);
      if (sim_out.empty()) {
        mmass::write_sample(std::cout, ids);
      } else {
        std::ofstream out(sim_out);
        if (!out) throw mmass::parse_error("cannot write '" + sim_out + "'");
        mmass::write_sample(out, ids);
      }
    } else if (*concentration) {
      return conc_opts.run("concentration-left",
                           {"concentration-left", "concentration-right", "mnr-concentration", "oracle-check"});
    } else if (*coverage) {
      return cov_opts.run("coverage-theta", {"coverage-theta", "coverage-match"});
    } else if (*consistency) {
      return cons_opts.run("consistency-theta", {"consistency-theta", "consistency-match"});
    } else if (*bayes) {
      const auto rep = mmass::bayes_risk_demo(checked_order(bayes_r), bayes_d, bayes_eps, bayes_n, bayes_reps,
                                              bayes_seed, bayes_draws, bayes_threads);
      print(Json{{"config",
                  {{"r", rep.r},
                   {"d", rep.d},
                   {"epsilon", rep.epsilon},
                   {"n", rep.n},
                   {"reps", rep.reps},
                   {"draws", rep.draws},
                   {"seed", bayes_seed}}},
                 {"empirical", rep.mean_failure},
                 {"bound", rep.bound},
                 {"stderr", rep.stderr_},
                 {"pass", rep.pass}});
      return rep.pass ? 0 : kExitCellFailed;
    } else if (*lecam) {
      const auto rep = mmass::lecam_demo(checked_order(lecam_r), lecam_eps, lecam_omega2, lecam_n, lecam_reps,
                                         lecam_seed);
      print(Json{{"config",
                  {{"r", rep.r},
                   {"epsilon", rep.epsilon},
                   {"omega2", rep.omega2},
                   {"n", rep.n},
                   {"reps", rep.reps},
                   {"seed", lecam_seed}}},
                 {"omega1", rep.omega1},
                 {"estimate_without_rare_atom", rep.estimate_on_e},
                 {"risk_p1", rep.risk1},
                 {"risk_p2", rep.risk2},
                 {"empirical", rep.max_risk},
                 {"mean_risk", rep.mean_risk},
                 {"bound", rep.bound},
                 {"stderr", rep.stderr_},
                 {"pass", rep.pass}});
      return rep.pass ? 0 : kExitCellFailed;
    }
  } catch (const mmass::precondition_error& e) {
    std::cerr << "missing-mass: " << e.what() << '\n';
    return kExitPrecondition;
  } catch (const mmass::parse_error& e) {
    std::cerr << "missing-mass: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "missing-mass: " << e.what() << '\n';
    return kExitInput;
  }
  return 0;
}
