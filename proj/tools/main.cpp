// Command-line front end: configure processes, models and bootstrap plans,
// run the Monte Carlo experiments, emit CSV/JSON reports.
//
// Exit codes: 0 ok, 2 configuration error, 3 long-run-variance red flag.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qboot/experiments.hpp"

namespace {

using namespace qboot;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRedFlag = 3;

struct CliOptions {
  std::string config_path;
  std::string out_path;
  std::string format = "csv";
  unsigned threads = 0;

  std::optional<std::vector<std::size_t>> n_grid;
  std::optional<std::size_t> replicates;
  std::optional<std::size_t> resamples;
  std::optional<std::uint64_t> seed;
  std::optional<double> p;

  std::optional<std::string> process;   // iid | ar1 | mdep
  std::optional<double> phi;
  std::optional<std::vector<double>> weights;
  std::optional<std::string> marginal;  // power | gaussian
  std::optional<double> rho;
  std::optional<double> m_coef;
  std::optional<double> mean;
  std::optional<double> sd;

  std::optional<std::string> schedule;  // fixed | power | dyadic
  std::optional<std::size_t> fixed_l;
  std::optional<double> c;
  std::optional<double> gamma;

  std::optional<std::size_t> oracle_n;
  std::optional<std::size_t> oracle_replicates;
  std::optional<std::size_t> limit_count;

  // zrho
  std::optional<std::size_t> count;
  std::optional<std::size_t> inner_count;
  std::optional<double> sigma_lr;

  // simulate
  std::size_t n = 1024;

  // boot-consistency
  bool fixed_stream = false;
};

void add_common_options(CLI::App* cmd, CliOptions& o) {
  cmd->add_option("--config", o.config_path, "JSON config file (or a report with embedded config)");
  cmd->add_option("--out", o.out_path, "output file (default: stdout)");
  cmd->add_option("--format", o.format, "report format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)");
  cmd->add_option("--n-grid", o.n_grid, "comma-separated sample sizes")->delimiter(',');
  cmd->add_option("--replicates,-R", o.replicates, "Monte Carlo replicates R");
  cmd->add_option("--resamples,-B", o.resamples, "bootstrap resamples B");
  cmd->add_option("--seed", o.seed, "base seed");
  cmd->add_option("--p", o.p, "quantile level in (0,1)");
  cmd->add_option("--process", o.process, "process kind: iid, ar1 or mdep")
      ->check(CLI::IsMember({"iid", "ar1", "mdep"}));
  cmd->add_option("--phi", o.phi, "AR(1) coefficient, |phi| < 1 (implies --process ar1)");
  cmd->add_option("--weights", o.weights, "moving-average weights (implies --process mdep)")
      ->delimiter(',');
  cmd->add_option("--marginal", o.marginal, "marginal kind: power or gaussian")
      ->check(CLI::IsMember({"power", "gaussian"}));
  cmd->add_option("--rho", o.rho, "power-model exponent (implies --marginal power)");
  cmd->add_option("--m", o.m_coef, "power-model coefficient (implies --marginal power)");
  cmd->add_option("--mean", o.mean, "gaussian mean (implies --marginal gaussian)");
  cmd->add_option("--sd", o.sd, "gaussian sd (implies --marginal gaussian)");
  cmd->add_option("--schedule", o.schedule, "block-length rule: fixed, power or dyadic")
      ->check(CLI::IsMember({"fixed", "power", "dyadic"}));
  cmd->add_option("--l", o.fixed_l, "fixed block length");
  cmd->add_option("--c", o.c, "block-length power-rule constant");
  cmd->add_option("--gamma", o.gamma, "block-length power-rule exponent in (0,1)");
  cmd->add_option("--oracle-n", o.oracle_n, "sample size for the long-run-variance oracle");
  cmd->add_option("--oracle-replicates", o.oracle_replicates,
                  "replicates for the long-run-variance oracle");
  cmd->add_option("--limit-count", o.limit_count, "limit-law reference sample size");
}

nlohmann::json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  // A report embeds its config; accept either form.
  if (j.is_object() && j.contains("config")) return j.at("config");
  return j;
}

DistributionModel build_marginal(const CliOptions& o, const DistributionModel& current,
                                 const DistributionModel& fallback) {
  const bool wants_power = o.rho.has_value() || o.m_coef.has_value() ||
                           (o.marginal && *o.marginal == "power");
  const bool wants_gauss = o.mean.has_value() || o.sd.has_value() ||
                           (o.marginal && *o.marginal == "gaussian");
  if (wants_power && wants_gauss) {
    throw std::invalid_argument("conflicting marginal flags: power and gaussian options mixed");
  }
  if (wants_power) {
    double rho = o.rho.value_or(2.0);
    double m = o.m_coef.value_or(0.5);
    if (const auto* pl = std::get_if<PowerLocalModel>(&current)) {
      if (!o.rho) rho = pl->rho;
      if (!o.m_coef) m = pl->m_coef;
    }
    return PowerLocalModel::canonical(rho, m);
  }
  if (wants_gauss) {
    double mean = o.mean.value_or(0.0);
    double sd = o.sd.value_or(1.0);
    if (const auto* g = std::get_if<GaussianModel>(&current)) {
      if (!o.mean) mean = g->mean;
      if (!o.sd) sd = g->sd;
    }
    if (!(sd > 0.0)) throw std::invalid_argument("gaussian marginal: sd must be > 0");
    return GaussianModel{mean, sd};
  }
  if (o.config_path.empty()) return fallback;
  return current;
}

ProcessSpec build_process(const CliOptions& o, const ProcessSpec& current,
                          const DistributionModel& marginal) {
  std::string kind;
  if (o.process) {
    kind = *o.process;
  } else if (o.phi) {
    kind = "ar1";
  } else if (o.weights) {
    kind = "mdep";
  } else {
    switch (current.kind) {
      case ProcessKind::Iid: kind = "iid"; break;
      case ProcessKind::GaussAr1: kind = "ar1"; break;
      case ProcessKind::MDependent: kind = "mdep"; break;
    }
  }
  if (kind == "iid") return ProcessSpec::iid(marginal);
  if (kind == "ar1") {
    const double phi = o.phi.value_or(current.kind == ProcessKind::GaussAr1 ? current.phi : 0.5);
    return ProcessSpec::gauss_ar1(phi, marginal);
  }
  const std::vector<double> w =
      o.weights.value_or(current.kind == ProcessKind::MDependent ? current.weights
                                                                 : std::vector<double>{1.0, 1.0});
  return ProcessSpec::m_dependent(w, marginal);
}

BlockLengthSchedule build_schedule(const CliOptions& o, const BlockLengthSchedule& current) {
  std::string kind;
  if (o.schedule) {
    kind = *o.schedule;
  } else if (o.fixed_l) {
    kind = "fixed";
  } else {
    switch (current.kind) {
      case BlockLengthSchedule::Kind::Fixed: kind = "fixed"; break;
      case BlockLengthSchedule::Kind::Power: kind = "power"; break;
      case BlockLengthSchedule::Kind::DyadicPower: kind = "dyadic"; break;
    }
  }
  if (kind == "fixed") {
    return BlockLengthSchedule::fixed(o.fixed_l.value_or(
        current.kind == BlockLengthSchedule::Kind::Fixed ? current.fixed_l : 8));
  }
  const double c = o.c.value_or(current.kind != BlockLengthSchedule::Kind::Fixed ? current.c : 1.0);
  const double gamma =
      o.gamma.value_or(current.kind != BlockLengthSchedule::Kind::Fixed ? current.gamma : 0.5);
  if (kind == "dyadic") return BlockLengthSchedule::dyadic_power(c, gamma);
  return BlockLengthSchedule::power(c, gamma);
}

McConfig build_mc_config(const CliOptions& o, const DistributionModel& marginal_fallback) {
  McConfig cfg;
  if (!o.config_path.empty()) cfg = mc_config_from_json(load_config_file(o.config_path));

  if (o.n_grid) cfg.n_grid = *o.n_grid;
  if (o.replicates) cfg.replicates = *o.replicates;
  if (o.resamples) cfg.plan.num_resamples = *o.resamples;
  if (o.seed) {
    cfg.base_seed = *o.seed;
    cfg.plan.seed = 0;
  }
  if (o.p) cfg.p = *o.p;
  if (o.oracle_n) cfg.oracle_n = *o.oracle_n;
  if (o.oracle_replicates) cfg.oracle_replicates = *o.oracle_replicates;
  if (o.limit_count) cfg.limit_count = *o.limit_count;
  if (o.count) cfg.zrho_count = *o.count;
  if (o.inner_count) cfg.zrho_inner = *o.inner_count;
  cfg.threads = o.threads;

  const DistributionModel marginal =
      build_marginal(o, cfg.process.marginal, marginal_fallback);
  cfg.process = build_process(o, cfg.process, marginal);
  cfg.plan.schedule = build_schedule(o, cfg.plan.schedule);

  // A fixed block length must fit the smallest sample size in use.
  if (cfg.plan.schedule.kind == BlockLengthSchedule::Kind::Fixed && !cfg.n_grid.empty() &&
      cfg.plan.schedule.fixed_l > cfg.n_grid.front()) {
    std::ostringstream msg;
    msg << "invariant 1 <= l <= n violated: fixed block length " << cfg.plan.schedule.fixed_l
        << " exceeds the smallest n " << cfg.n_grid.front();
    throw std::invalid_argument(msg.str());
  }
  cfg.validate();
  return cfg;
}

void emit_report(const ExperimentReport& rep, const CliOptions& o) {
  // Data to stdout or the output file; progress and summaries to stderr.
  std::ostringstream body;
  if (o.format == "json") {
    body << report_to_json(rep).dump(2) << "\n";
  } else {
    write_report_csv(body, rep);
  }
  if (o.out_path.empty()) {
    std::cout << body.str();
  } else {
    std::ofstream out(o.out_path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open output file: " + o.out_path);
    out << body.str();
  }
  for (const ReportRow& r : rep.rows) {
    std::fprintf(stderr, "[%s] n=%zu %s = %.6g +- %.3g\n", r.experiment.c_str(), r.n,
                 r.metric.c_str(), r.value, r.stderr_);
  }
  if (!o.out_path.empty()) {
    std::fprintf(stderr, "report written to %s (%s)\n", o.out_path.c_str(), o.format.c_str());
  }
}

int finish(const ExperimentReport& rep, const CliOptions& o) {
  emit_report(rep, o);
  if (report_has_degenerate_lrvar(rep)) {
    std::fprintf(stderr,
                 "red flag: long-run variance estimate indistinguishable from 0; "
                 "the consistency hypotheses do not hold for this configuration\n");
    return kExitRedFlag;
  }
  return kExitOk;
}

int run_simulate(const CliOptions& o) {
  McConfig cfg = build_mc_config(o, GaussianModel{});
  const Sample sample = generate(cfg.process, o.n, cfg.base_seed);
  std::ostringstream body;
  write_sample_csv(body, sample, cfg.process);
  if (o.out_path.empty()) {
    std::cout << body.str();
  } else {
    std::ofstream out(o.out_path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open output file: " + o.out_path);
    out << body.str();
  }
  std::fprintf(stderr, "[simulate] n=%zu seed=%llu process=%s\n", o.n,
               static_cast<unsigned long long>(cfg.base_seed), sample.spec_id.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sample quantiles, block bootstrap and limit-law experiments for dependent data"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "print help for every subcommand");
  CliOptions o;

  CLI::App* simulate = app.add_subcommand("simulate", "generate one path and write it as CSV");
  simulate->add_option("--n", o.n, "path length");
  add_common_options(simulate, o);

  CLI::App* clt = app.add_subcommand(
      "clt", "KS distance of the scaled quantile error to its limit law, per n");
  add_common_options(clt, o);

  CLI::App* bahadur = app.add_subcommand(
      "bahadur", "decay of the scaled remainder of the quantile decomposition, per n");
  add_common_options(bahadur, o);

  CLI::App* boot = app.add_subcommand(
      "boot-consistency", "KS contrast between the bootstrap law and an independent MC proxy");
  boot->add_flag("--fixed-stream", o.fixed_stream,
                 "single growing stream, dyadic-schedule variant");
  add_common_options(boot, o);

  CLI::App* incons = app.add_subcommand(
      "inconsistency", "same contrast with (bl)^{1/(2 rho)} scaling for a nonsmooth model");
  add_common_options(incons, o);

  CLI::App* zrho = app.add_subcommand("zrho", "sample the limiting sup-distance variable Z_rho");
  zrho->add_option("--count", o.count, "outer draws of W2");
  zrho->add_option("--inner-count", o.inner_count, "inner draws of W1 per outer draw");
  zrho->add_option("--sigma-lr", o.sigma_lr, "long-run sd (skips the Monte Carlo oracle)");
  add_common_options(zrho, o);

  CLI::App* lrvar = app.add_subcommand(
      "lrvar", "Monte Carlo oracle for the long-run variance of sqrt(n) F_n(t_p)");
  add_common_options(lrvar, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (simulate->parsed()) return run_simulate(o);
    if (clt->parsed()) {
      return finish(run_clt_experiment(build_mc_config(o, GaussianModel{})), o);
    }
    if (bahadur->parsed()) {
      return finish(run_bahadur_experiment(build_mc_config(o, PowerLocalModel::canonical(2.0, 0.5))),
                    o);
    }
    if (boot->parsed()) {
      const McConfig cfg = build_mc_config(o, GaussianModel{});
      return finish(o.fixed_stream ? run_fixed_stream_consistency(cfg)
                                   : run_bootstrap_consistency_experiment(cfg),
                    o);
    }
    if (incons->parsed()) {
      return finish(
          run_inconsistency_experiment(build_mc_config(o, PowerLocalModel::canonical(2.0, 0.5))),
          o);
    }
    if (zrho->parsed()) {
      const McConfig cfg = build_mc_config(o, PowerLocalModel::canonical(2.0, 0.5));
      std::optional<double> sigma = o.sigma_lr;
      if (!sigma && !o.config_path.empty()) {
        // A zrho report run with an explicit sigma records it; honor it on re-run.
        const auto j = load_config_file(o.config_path);
        if (j.contains("sigma_lr")) sigma = j.at("sigma_lr").get<double>();
      }
      return finish(run_zrho_experiment(cfg, sigma), o);
    }
    if (lrvar->parsed()) {
      return finish(run_lrvar_experiment(build_mc_config(o, GaussianModel{})), o);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
  return kExitConfig;
}
