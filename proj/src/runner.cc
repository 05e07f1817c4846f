#include "divkecm/runner.h"

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "divkecm/attacks.h"
#include "divkecm/extract.h"
#include "divkecm/games.h"

namespace divkecm {

namespace {

RunOptions run_options(const ExperimentConfig& cfg) { return {cfg.trials, cfg.seed, cfg.threads}; }

void add_rate(Report& r, const std::string& exp, const std::string& name, long count, long trials) {
  const double rate = trials ? static_cast<double>(count) / trials : 0.0;
  r.metrics.push_back(mc_metric(exp, name, rate, wald_radius(count, trials)));
}

void run_pipeline_cmd(const ExperimentConfig& cfg, Report& r) {
  Protocol protocol(cfg.params, cfg.mode);
  PipelineStats st = run_pipeline(protocol, run_options(cfg));
  const std::string e = "pipeline";
  r.metrics.push_back(exact_metric(e, "trials", static_cast<double>(st.trials)));
  r.metrics.push_back(exact_metric(e, "accept_threshold", accept_threshold(cfg.params)));
  r.metrics.push_back(exact_metric(e, "syndrome_bits", protocol.code().syndrome_bits()));
  add_rate(r, e, "accept_rate", st.accepted, st.trials);
  add_rate(r, e, "accept_and_correct", st.correct, st.trials);
  add_rate(r, e, "ec_failure_rate", st.trials - st.decoded_exact, st.trials);
  // Completeness split two ways: the measured conjunction above, and the
  // Hoeffding term plus the measured decoding failure rate.
  const double hoeffding = std::exp(-cfg.params.delta * cfg.params.delta * cfg.params.lambda / 8.0);
  r.metrics.push_back(formula_metric(e, "hoeffding_term", hoeffding));
  const double ec_fail = st.rate(st.trials - st.decoded_exact);
  r.metrics.push_back(mc_metric(e, "completeness_error_sum", hoeffding + ec_fail,
                                wald_radius(st.trials - st.decoded_exact, st.trials)));
}

void report_cloning(const std::string& e, const AttackStats& st, Report& r) {
  r.metrics.push_back(exact_metric(e, "trials", static_cast<double>(st.trials)));
  add_rate(r, e, "accept_rate", st.accepted, st.trials);
  add_rate(r, e, "joint_success", st.joint_success, st.trials);
  add_rate(r, e, "bob_success", st.bob_success, st.trials);
  add_rate(r, e, "charlie_success", st.charlie_success, st.trials);
  add_rate(r, e, "both_right_or_wrong", st.both_right_or_wrong, st.trials);
  r.metrics.push_back(exact_metric(e, "aborted", static_cast<double>(st.aborted)));
  if (st.instance_total > 0) add_rate(r, e, "instance_both_right", st.instance_both_right, st.instance_total);
}

void run_attack_cmd(const ExperimentConfig& cfg, Report& r) {
  Protocol protocol(cfg.params, cfg.mode);
  const RunOptions opt = run_options(cfg);
  const std::string e = "attack:" + cfg.attack;
  const ProtocolParams& p = protocol.params();
  BoundsReport b = uncloneability_bounds(p);
  const double log2_messages = p.message_length() * std::log2(static_cast<double>(p.modulus()));

  AdversaryFactory cloning;
  DistinguisherFactory single;
  CloningDistinguisherFactory pair;
  try {
    cloning = find_adversary(cfg.attack);
  } catch (const ParameterError&) {
    try {
      single = find_distinguisher(cfg.attack);
    } catch (const ParameterError&) {
      pair = find_cloning_distinguisher(cfg.attack);
    }
  }

  if (cloning) {
    report_cloning(e, run_cloning_attack(protocol, cloning, opt), r);
    r.metrics.push_back(formula_metric(e, "log2_uncloneability_bound", b.t - log2_messages));
    return;
  }
  AttackStats st = single ? run_distinguishing_attack(protocol, single, opt)
                          : run_cloning_distinguishing_attack(protocol, pair, opt);
  r.metrics.push_back(exact_metric(e, "trials", static_cast<double>(st.trials)));
  add_rate(r, e, "accept_rate", st.accepted, st.trials);
  add_rate(r, e, "success", st.joint_success, st.trials);
  r.metrics.push_back(mc_metric(e, "half_accept_rate", 0.5 * st.rate(st.accepted), 0.5 * st.ci95(st.accepted)));
  if (pair) {
    add_rate(r, e, "bob_correct", st.bob_success, st.trials);
    add_rate(r, e, "charlie_correct", st.charlie_success, st.trials);
    add_rate(r, e, "both_right_or_wrong", st.both_right_or_wrong, st.trials);
    r.metrics.push_back(exact_metric(e, "aborted", static_cast<double>(st.aborted)));
  } else {
    add_rate(r, e, "guess_correct", st.bob_success, st.trials);
  }
}

void run_game_cmd(const ExperimentConfig& cfg, Report& r) {
  const bool all = cfg.game == "all";
  auto want = [&](const char* g) { return all || cfg.game == g; };
  const double q = cfg.params.q;
  const double gamma = cfg.params.gamma;
  const double alpha = cfg.params.alpha;
  if (want("chsh")) r.metrics.push_back(exact_metric("chsh", "value", chsh_value(ideal_chsh_strategy(0.0))));
  if (want("chsh-classical")) {
    ClassicalChshResult c = classical_chsh_value();
    r.metrics.push_back(exact_metric("chsh-classical", "value", c.value));
    r.metrics.push_back(exact_metric("chsh-classical", "maximizers", c.maximizers));
  }
  if (want("chsh-noisy")) {
    r.metrics.push_back(exact_metric("chsh-noisy", "value", chsh_value(ideal_chsh_strategy(q))));
    r.metrics.push_back(formula_metric("chsh-noisy", "noise_law", (1 - 2 * q) * kChshQuantumValue + q));
  }
  if (want("monogamy")) r.metrics.push_back(exact_metric("monogamy", "broadcast_value", monogamy_broadcast_value()));
  if (want("clone")) {
    CloneGameSpec spec{gamma, alpha};
    r.metrics.push_back(exact_metric("clone", "chsh_broadcast_value", clone_game_value(spec, chsh_broadcast_strategy())));
    r.metrics.push_back(exact_metric("clone", "forward_to_bob_value", clone_game_value(spec, forward_to_bob_strategy())));
    r.metrics.push_back(formula_metric("clone", "trivial_bound", (1 - gamma) + gamma * kChshQuantumValue));
  }
  if (want("delta")) {
    DeltaEstimate d = derive_delta(gamma, alpha, 1.0);
    r.metrics.push_back(formula_metric("delta", "delta", d.delta));
    r.metrics.push_back(formula_metric("delta", "argmax_mu", d.argmax_mu));
    r.metrics.push_back(formula_metric("delta", "max_value", d.max_value));
  }
}

void run_extract_cmd(const ExperimentConfig& cfg, Report& r) {
  const std::string e = "extract:p" + std::to_string(cfg.p) + "l" + std::to_string(cfg.l);
  Rng root(cfg.seed);
  double max_gap = 0.0;
  double min_margin = 1.0;
  for (long i = 0; i < cfg.trials; ++i) {
    Rng rng = root.derive("oracle", static_cast<std::uint64_t>(i));
    IpOracle o = random_oracle(cfg.p, cfg.l, 2, rng);
    BvResult res = run_bv_extraction(o);
    max_gap = std::max(max_gap, std::abs(res.recovery_prob - amplitude_identity(aggregate_classes(o), cfg.p)));
    min_margin = std::min(min_margin, res.rhat_marginal - res.recovery_prob);
  }
  r.metrics.push_back(exact_metric(e, "oracles", static_cast<double>(cfg.trials)));
  if (cfg.trials > 0) {
    r.metrics.push_back(exact_metric(e, "max_identity_gap", max_gap));
    r.metrics.push_back(exact_metric(e, "min_marginal_margin", min_margin));
  }
  std::vector<int> xb(cfg.l), xc(cfg.l);
  for (int j = 0; j < cfg.l; ++j) {
    xb[j] = (j + 1) % cfg.p;
    xc[j] = (cfg.p - 1 + j) % cfg.p;
  }
  r.metrics.push_back(
      exact_metric(e, "perfect_recovery", run_bv_extraction(perfect_oracle(cfg.p, cfg.l, xb, xc)).recovery_prob));
  const double a0 = 0.5;
  GridMinimum g = p3_grid_minimum(a0, 100000);
  r.metrics.push_back(exact_metric("landscape", "p3_grid_min_a0_0.5", g.value));
  r.metrics.push_back(formula_metric("landscape", "p3_closed_form_a0_0.5", 0.25 * (3 * a0 - 1) * (3 * a0 - 1)));
  ZeroSum z = p5_zero_sum(0.1);
  r.metrics.push_back(exact_metric("landscape", "p5_zero_sum_value", z.value));
  r.metrics.push_back(exact_metric("landscape", "p5_zero_sum_a0", z.a[0]));
}

void run_bounds_cmd(const ExperimentConfig& cfg, Report& r) {
  BoundsReport b = uncloneability_bounds(cfg.params);
  const std::string e = "bounds";
  r.metrics.push_back(formula_metric(e, "kappa_delta3_alpha4", b.kdaa));
  r.metrics.push_back(formula_metric(e, "ec_term", b.ec_term));
  r.metrics.push_back(formula_metric(e, "t_over_lambda", b.t_over_lambda));
  r.metrics.push_back(formula_metric(e, "t", b.t));
  r.metrics.push_back(formula_metric(e, "leak_threshold", b.leak_threshold));
  r.metrics.push_back(formula_metric(e, "nontrivial", b.nontrivial ? 1.0 : 0.0));
  r.metrics.push_back(formula_metric(e, "zero_unclone_rhs", b.zero_unclone_rhs));
  r.metrics.push_back(formula_metric(e, "zero_unclone", b.zero_unclone ? 1.0 : 0.0));
  r.metrics.push_back(formula_metric(e, "log2_game_bound", b.log2_game_bound));
  r.metrics.push_back(exact_metric(e, "syndrome_bits", b.syndrome_bits));
  r.metrics.push_back(exact_metric(e, "leak_budget_bits", LeakageBudget::from_rate(cfg.params.nu, cfg.params.l()).max_bits()));
}

}  // namespace

Report run_experiment(const ExperimentConfig& cfg) {
  std::vector<std::string> violations = validate_config(cfg);
  if (!violations.empty()) throw ConfigError(std::move(violations));
  Report r;
  r.config = cfg;
  r.strict_violations = validate_params(cfg.params, Mode::kStrict);
  switch (cfg.subcommand) {
    case Subcommand::kPipeline:
      run_pipeline_cmd(cfg, r);
      break;
    case Subcommand::kAttack:
      run_attack_cmd(cfg, r);
      break;
    case Subcommand::kGameValue:
      run_game_cmd(cfg, r);
      break;
    case Subcommand::kExtract:
      run_extract_cmd(cfg, r);
      break;
    case Subcommand::kBounds:
      run_bounds_cmd(cfg, r);
      break;
  }
  r.metrics.push_back(exact_metric("config", "strict_valid", r.strict_violations.empty() ? 1.0 : 0.0));
  return r;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulator for device-independent encryption with variable keys"};
  std::string subcommand, config_path, out_path;
  std::map<std::string, std::string> flags;
  app.add_option("subcommand", subcommand, "pipeline | attack | game-value | extract | bounds");
  app.add_option("--config", config_path, "flat key = value config file");
  app.add_option("--out", out_path, "report path (stdout when absent)");
  const std::vector<std::pair<std::string, std::string>> flag_keys = {
      {"--seed", "seed"},     {"--trials", "trials"},   {"--format", "format"},   {"--mode", "mode"},
      {"--attack", "attack"}, {"--gamma", "gamma"},     {"--alpha", "alpha"},     {"--q", "q"},
      {"--xi", "xi"},         {"--delta", "delta"},     {"--kappa", "kappa"},     {"--nu", "nu"},
      {"--lambda", "lambda"}, {"--variant", "variant"}, {"--game", "game"},       {"--p", "p"},
      {"--l", "l"},           {"--threads", "threads"}, {"--ec-seed", "ec_seed"}, {"--t-max", "t_max"}};
  for (const auto& [flag, key] : flag_keys) app.add_option(flag, flags[key]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  ExperimentConfig cfg;
  std::vector<std::string> violations;
  if (!config_path.empty()) {
    std::ifstream f(config_path);
    if (!f) {
      violations.push_back("cannot read config file " + config_path);
    } else {
      std::stringstream ss;
      ss << f.rdbuf();
      apply_config_text(cfg, ss.str(), violations);
    }
  }
  if (!subcommand.empty()) apply_setting(cfg, "subcommand", subcommand, violations);
  for (const auto& [flag, key] : flag_keys) {
    if (app.count(flag) > 0) apply_setting(cfg, key, flags[key], violations);
  }
  if (!out_path.empty()) cfg.out = out_path;
  if (violations.empty()) violations = validate_config(cfg);
  if (!violations.empty()) {
    err << "invalid configuration:\n";
    for (const auto& v : violations) err << "  " << v << "\n";
    return kExitConfig;
  }

  try {
    const std::string bytes = emit_report(run_experiment(cfg), cfg.format);
    if (cfg.out.empty()) {
      out << bytes;
    } else {
      write_file_atomically(cfg.out, bytes);
    }
  } catch (const ConfigError& e) {
    err << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace divkecm
