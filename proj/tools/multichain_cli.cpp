// Command-line driver: fixture generation, exact solves, chain
// classification, floored-simplex projections, mirror-ascent runs (exact
// and sampled), critic estimation, and the property suites.
//
// Exit codes: 0 success, 2 validation failure, 3 infeasible configuration,
// 4 property-suite failure.  Every subcommand honors --seed; outputs carry
// no timestamps, so a repeated invocation is byte-identical.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "multichain/checks.hpp"
#include "multichain/fixtures.hpp"
#include "multichain/io.hpp"
#include "multichain/pma.hpp"
#include "multichain/sampling.hpp"

namespace mc = multichain;

namespace {

mc::DivergenceKind parse_div(const std::string& s) {
  if (s == "kl") return mc::DivergenceKind::kl;
  if (s == "euclid") return mc::DivergenceKind::euclidean;
  throw mc::ValidationError("--div must be kl or euclid, got " + s);
}

mc::ScheduleKind parse_schedule(const std::string& s) {
  if (s == "const") return mc::ScheduleKind::constant;
  if (s == "adaptive") return mc::ScheduleKind::adaptive;
  throw mc::ValidationError("--schedule must be const or adaptive, got " + s);
}

mc::Vector load_mu(const std::string& spec, int n) {
  if (spec == "uniform") return mc::Vector::Constant(n, 1.0 / n);
  return mc::load_distribution(spec, n);
}

std::string out_path(const std::string& dir, const std::string& file) {
  std::filesystem::create_directories(dir);
  return (std::filesystem::path(dir) / file).string();
}

void write_json(const mc::Json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(1) << "\n";
}

mc::Json classification_json(const mc::Classification& c) {
  mc::Json j;
  j["recurrent_classes"] = c.recurrent_classes;
  j["transient"] = c.transient;
  return j;
}

void print_classification(const mc::Classification& c) {
  std::printf("recurrent classes (%d):", c.num_classes());
  for (const auto& cls : c.recurrent_classes) {
    std::printf(" {");
    for (size_t i = 0; i < cls.size(); ++i)
      std::printf("%s%d", i ? "," : "", cls[i]);
    std::printf("}");
  }
  std::printf("\ntransient:");
  for (int s : c.transient) std::printf(" %d", s);
  std::printf("\n");
}

mc::Mdp load_valid_mdp(const std::string& path) {
  mc::Mdp m = mc::load_mdp(path);
  mc::require_valid(m);
  return m;
}

mc::Policy load_policy_or_uniform(const std::string& path, const mc::Mdp& m) {
  if (path.empty()) return mc::uniform_policy(m);
  mc::Policy p = mc::load_policy(path);
  mc::require_policy_shape(m, p, "cli");
  return p;
}

mc::Json envelope_json(const mc::EnvelopeReport& rep, bool linear) {
  mc::Json j;
  j["advisory_ok"] = rep.advisory_ok;
  j["hard_ok"] = rep.hard_ok;
  j["note"] = rep.note;
  double min_margin = std::numeric_limits<double>::infinity();
  for (const auto& row : rep.rows) min_margin = std::min(min_margin, row.margin);
  j["min_advisory_margin"] = min_margin;
  if (linear) {
    j["fitted_slope"] = rep.fitted_slope;
    j["slope_limit"] = rep.slope_limit;
  }
  return j;
}

struct AscentConfig {
  std::string mdp_path;
  std::string mu_spec = "uniform";
  double alpha = 0.05;
  std::string div = "kl";
  double eta = 0.5;
  std::string schedule = "const";
  double c_alpha = 2.0;
  int iters = 100;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
};

void add_ascent_options(CLI::App* cmd, AscentConfig& cfg) {
  cmd->add_option("--mdp", cfg.mdp_path, "MDP file")->required();
  cmd->add_option("--mu", cfg.mu_spec, "start distribution: uniform or a file");
  cmd->add_option("--alpha", cfg.alpha, "policy floor, in (0, 1/|A|)");
  cmd->add_option("--div", cfg.div, "divergence: kl or euclid");
  cmd->add_option("--eta", cfg.eta, "initial step size");
  cmd->add_option("--schedule", cfg.schedule, "step schedule: const or adaptive");
  cmd->add_option("--c-alpha", cfg.c_alpha,
                  "ratio coefficient for the adaptive schedule");
  cmd->add_option("--iters", cfg.iters, "iteration count K");
  cmd->add_option("--seed", cfg.seed, "seed for every random choice");
  cmd->add_option("--out", cfg.out_dir, "output directory");
}

/// Shared tail of pma/spma: reference search, coefficient estimate, trace
/// and summary emission.  Returns the envelope report matching the
/// schedule kind.
struct RunContext {
  mc::Mdp m;
  mc::Vector mu;
  mc::DivergenceKind kind;
  mc::StepSchedule sched;
  mc::Classification c;
  mc::ReferenceInfo ref;
  mc::CoefficientEstimate est;
  bool coeffs_ok = false;
};

RunContext prepare_run(const AscentConfig& cfg) {
  RunContext ctx;
  ctx.m = load_valid_mdp(cfg.mdp_path);
  ctx.mu = load_mu(cfg.mu_spec, ctx.m.n_states);
  ctx.kind = parse_div(cfg.div);
  ctx.sched = {parse_schedule(cfg.schedule), cfg.eta, cfg.c_alpha};
  ctx.sched.validate();
  ctx.c = mc::classify(ctx.m);
  const mc::ReferenceSearchResult found = mc::find_reference_policy(
      ctx.m, ctx.mu, cfg.alpha, ctx.kind, std::max(10, cfg.iters), cfg.seed);
  ctx.ref = mc::make_reference(ctx.m, found.policy, ctx.mu, ctx.c);
  if (ctx.mu.minCoeff() > 0.0) {
    ctx.est =
        mc::estimate_coefficients(ctx.m, ctx.mu, cfg.alpha, ctx.c, 64, cfg.seed);
    ctx.coeffs_ok = true;
  }
  return ctx;
}

mc::Json summarize_trace(const mc::PmaTrace& t, const RunContext& ctx,
                         const AscentConfig& cfg) {
  mc::Json j;
  j["rows"] = t.iterates.size();
  j["final_j_mu"] = t.iterates.back().j_mu;
  j["final_gap"] = t.iterates.back().gap;
  j["reference_j_mu"] = t.j_ref;
  j["samples_total"] = t.iterates.back().samples_cum;
  mc::Json echo;
  echo["mdp"] = cfg.mdp_path;
  echo["mu"] = cfg.mu_spec;
  echo["alpha"] = cfg.alpha;
  echo["div"] = cfg.div;
  echo["eta"] = cfg.eta;
  echo["schedule"] = cfg.schedule;
  echo["c_alpha"] = cfg.c_alpha;
  echo["iters"] = cfg.iters;
  echo["seed"] = cfg.seed;
  j["config"] = echo;
  if (ctx.coeffs_ok) {
    j["b_alpha_estimate"] = ctx.est.b_alpha;
    j["c_alpha_estimate"] = ctx.est.c_alpha;
    if (ctx.sched.kind == mc::ScheduleKind::constant) {
      j["envelope"] = envelope_json(
          mc::check_sublinear_envelope(t, ctx.est, cfg.eta), false);
    } else if (ctx.est.c_alpha > 1.0) {
      j["envelope"] =
          envelope_json(mc::check_linear_envelope(t, ctx.est, cfg.eta), true);
    } else {
      j["envelope"] = "skipped: estimated c_alpha not above 1";
    }
  } else {
    j["envelope"] = "skipped: mu lacks full support, coefficients undefined";
  }
  return j;
}

int cmd_gen(const std::string& name, const std::vector<int>& sizes,
            int transient, int actions, int core, int fringe, int ring,
            double noise, double reward_bound, std::uint64_t seed,
            const std::string& out_dir) {
  mc::Fixture f;
  if (name == "twochain") {
    f = mc::twochain_fixture();
  } else if (name == "random_multichain") {
    f = mc::make_random_multichain({sizes, transient, actions, reward_bound},
                                   seed);
  } else if (name == "weakly_comm") {
    f = mc::make_weakly_comm(core, fringe, actions, seed, reward_bound);
  } else if (name == "ergodic_ring") {
    f = mc::make_ergodic_ring(ring, noise, actions, seed, reward_bound);
  } else {
    throw mc::ValidationError("unknown fixture name " + name);
  }
  mc::require_valid(f.mdp);
  mc::save_mdp(f.mdp, out_path(out_dir, "mdp.json"));
  write_json(classification_json(f.planted), out_path(out_dir, "planted.json"));
  print_classification(f.planted);
  return 0;
}

int cmd_solve(const std::string& mdp_path, const std::string& mu_spec,
              const std::string& policy_path, std::uint64_t seed,
              const std::string& out_dir) {
  const mc::Mdp m = load_valid_mdp(mdp_path);
  const mc::Policy p = load_policy_or_uniform(policy_path, m);
  const mc::Vector mu = load_mu(mu_spec, m.n_states);
  // classify the induced chain itself so deterministic policies solve too
  const mc::Matrix p_pi = mc::induce_chain(m, p).p_pi;
  const mc::Classification c = mc::classify_chain(p_pi);
  const mc::ValueBundle b = mc::evaluate_on_own_chain(m, p);
  const mc::VisitationBundle vis = mc::visitation_chain(p_pi, c, mu);
  const mc::ChainConstants k = mc::chain_constants_chain(p_pi, c, 20000, seed);

  mc::save_vector_csv(b.j, "J", out_path(out_dir, "j.csv"));
  mc::save_vector_csv(b.v, "V", out_path(out_dir, "v.csv"));
  mc::save_table_csv(b.k, "K", out_path(out_dir, "k.csv"));
  mc::save_table_csv(b.q, "Q", out_path(out_dir, "q.csv"));
  mc::save_table_csv(b.g, "G", out_path(out_dir, "g.csv"));
  {
    std::ofstream out(out_path(out_dir, "visitation.csv"));
    out << "s,d,delta,rho\n";
    for (int s = 0; s < m.n_states; ++s) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", s, vis.d(s),
                    vis.delta(s), vis.rho(s));
      out << buf;
    }
  }
  mc::Json cj;
  cj["classification"] = classification_json(c);
  cj["j_mu"] = mu.dot(b.j);
  cj["t_tar_per_class"] = k.t_tar_class;
  cj["t_tar"] = k.t_tar;
  cj["t_half"] = k.t_half;
  cj["t_cov_per_class"] = k.t_cov_class;
  cj["t_cov"] = k.t_cov;
  cj["t_cov_exact"] = k.cov_exact;
  write_json(cj, out_path(out_dir, "constants.json"));
  std::printf("J_mu = %.17g\n", mu.dot(b.j));
  print_classification(c);
  return 0;
}

int cmd_classify(const std::string& mdp_path, bool sampled, double delta,
                 std::uint64_t seed, const std::string& out_dir) {
  const mc::Mdp m = load_valid_mdp(mdp_path);
  const mc::Classification exact = mc::classify(m);
  mc::Classification shown = exact;
  mc::Json j;
  j["exact"] = classification_json(exact);
  if (sampled) {
    const mc::Policy p = mc::uniform_policy(m);
    const mc::ChainConstants k = mc::chain_constants(m, p, exact, 20000, seed);
    const mc::SamplingWindows w = mc::suggest_windows(k, delta);
    mc::GenerativeModel gm{m, seed};
    shown = mc::classify_by_sampling(gm, p, w.m1, w.m2);
    j["sampled"] = classification_json(shown);
    j["m1"] = w.m1;
    j["m2"] = w.m2;
    j["samples_used"] = gm.samples;
    j["matches_exact"] = shown.same_structure(exact);
  }
  if (!out_dir.empty())
    write_json(j, out_path(out_dir, "classify.json"));
  print_classification(shown);
  return 0;
}

int cmd_project(const std::vector<double>& q, double alpha,
                const std::string& div) {
  mc::Vector v(static_cast<int>(q.size()));
  for (size_t i = 0; i < q.size(); ++i) v(static_cast<int>(i)) = q[i];
  if (alpha < 0.0 || alpha * static_cast<double>(q.size()) >
                         1.0 + mc::kFloorFeasTol)
    throw mc::InfeasibleConfigError(
        "project: alpha = " + std::to_string(alpha) +
        " does not fit a length-" + std::to_string(q.size()) + " simplex");
  const mc::DivergenceKind kind = parse_div(div);
  const mc::FlooredSimplexPoint out =
      kind == mc::DivergenceKind::euclidean
          ? mc::euclid_project_floor(v, alpha)
          : mc::kl_project_floor(v, alpha);
  for (int i = 0; i < out.p.size(); ++i)
    std::printf("%s%.17g", i ? " " : "", out.p(i));
  std::printf("\n");
  return 0;
}

int cmd_pma(const AscentConfig& cfg) {
  const RunContext ctx = prepare_run(cfg);
  const mc::Policy pi0 = mc::uniform_policy(ctx.m);
  const mc::PmaTrace t = mc::run_pma(ctx.m, ctx.mu, cfg.alpha, ctx.sched,
                                     ctx.kind, cfg.iters, pi0, &ctx.ref);
  mc::save_trace_csv(t, out_path(cfg.out_dir, "trace.csv"));
  mc::save_policy(t.iterates.back().policy,
                  out_path(cfg.out_dir, "policy.json"));
  mc::Json j = summarize_trace(t, ctx, cfg);
  j["subcommand"] = "pma";
  write_json(j, out_path(cfg.out_dir, "summary.json"));
  std::printf("final J_mu = %.17g, gap = %.3g, rows = %zu\n",
              t.iterates.back().j_mu, t.iterates.back().gap,
              t.iterates.size());
  return 0;
}

int cmd_spma(const AscentConfig& cfg, const mc::CriticConfig& critic_cfg) {
  const RunContext ctx = prepare_run(cfg);
  const mc::Policy pi0 = mc::uniform_policy(ctx.m);
  mc::GenerativeModel gm{ctx.m, cfg.seed};
  const mc::PmaTrace t =
      mc::run_spma(gm, ctx.mu, cfg.alpha, ctx.sched, ctx.kind, cfg.iters, pi0,
                   critic_cfg, &ctx.ref);
  mc::save_trace_csv(t, out_path(cfg.out_dir, "trace.csv"));
  mc::save_policy(t.iterates.back().policy,
                  out_path(cfg.out_dir, "policy.json"));
  mc::Json j = summarize_trace(t, ctx, cfg);
  j["subcommand"] = "spma";
  mc::Json critic_echo;
  critic_echo["n"] = critic_cfg.n;
  critic_echo["horizon"] = critic_cfg.h;
  critic_echo["n2"] = critic_cfg.n2;
  critic_echo["horizon2"] = critic_cfg.h2;
  j["critic"] = critic_echo;
  // per-step inexact-ascent report: a drop larger than 2 b_alpha eps_hat
  // would contradict the measured gradient error
  double max_eps = 0.0, worst_excess = -std::numeric_limits<double>::infinity();
  mc::Json steps = mc::Json::array();
  for (size_t k = 0; k + 1 < t.iterates.size(); ++k) {
    const double eps = t.iterates[k].eps_hat;
    const double drop = t.iterates[k].j_mu - t.iterates[k + 1].j_mu;
    mc::Json row;
    row["k"] = t.iterates[k].k;
    row["eps_hat"] = eps;
    row["drop"] = drop;
    if (ctx.coeffs_ok) {
      const double slack = 2.0 * ctx.est.b_alpha * eps;
      row["slack"] = slack;
      worst_excess = std::max(worst_excess, drop - slack);
    }
    max_eps = std::max(max_eps, eps);
    steps.push_back(row);
  }
  j["per_step"] = steps;
  j["max_eps_hat"] = max_eps;
  if (ctx.coeffs_ok) j["worst_drop_minus_slack"] = worst_excess;
  write_json(j, out_path(cfg.out_dir, "summary.json"));
  std::printf("final J_mu = %.17g, gap = %.3g, samples = %lld, rows = %zu\n",
              t.iterates.back().j_mu, t.iterates.back().gap,
              t.iterates.back().samples_cum, t.iterates.size());
  return 0;
}

int cmd_critic(const std::string& mdp_path, const std::string& policy_path,
               const mc::CriticConfig& cfg, std::uint64_t seed,
               const std::string& out_dir) {
  const mc::Mdp m = load_valid_mdp(mdp_path);
  const mc::Policy p = load_policy_or_uniform(policy_path, m);
  const mc::Classification c = mc::classify(m);
  mc::GenerativeModel gm{m, seed};
  const mc::GEstimate ge = mc::critic(gm, p, cfg, c);
  mc::save_table_csv(ge.g_hat, "G_hat", out_path(out_dir, "g_hat.csv"));
  mc::save_table_csv(ge.k_hat, "K_hat", out_path(out_dir, "k_hat.csv"));
  mc::save_table_csv(ge.q_hat, "Q_hat", out_path(out_dir, "q_hat.csv"));
  mc::Json j;
  j["samples_used"] = ge.samples_used;
  if (p.table.minCoeff() > 0.0) {
    const mc::ValueBundle b = mc::evaluate(m, p, c);
    j["error_vs_exact"] = mc::inf_norm(mc::Matrix(ge.g_hat - b.g));
  }
  write_json(j, out_path(out_dir, "summary.json"));
  std::printf("samples used: %lld\n", ge.samples_used);
  return 0;
}

int cmd_check(const std::vector<std::string>& suites, std::uint64_t seed) {
  std::vector<std::string> todo = suites;
  if (todo.empty() || (todo.size() == 1 && todo[0] == "all"))
    todo = {"bellman", "pdl",      "grad",   "proj",   "monotone", "rates",
            "critic",  "classify", "spma",   "weakly", "target"};
  bool all_pass = true;
  for (const std::string& s : todo) {
    mc::SuiteReport rep;
    if (s == "bellman") rep = mc::check_bellman(100, seed + 2026);
    else if (s == "pdl") rep = mc::check_pdl(100, 100, seed + 2027);
    else if (s == "grad") rep = mc::check_grad(100, seed + 2028);
    else if (s == "proj") rep = mc::check_proj(1000, seed + 2029);
    else if (s == "monotone") rep = mc::check_monotone(seed + 2030);
    else if (s == "rates") rep = mc::check_rates(seed + 2031);
    else if (s == "critic") rep = mc::check_critic(100, seed + 2032);
    else if (s == "classify") rep = mc::check_classify(100, 0.05, seed + 2033);
    else if (s == "spma") rep = mc::check_spma(seed + 2034);
    else if (s == "weakly") rep = mc::check_weakly(seed + 2035);
    else if (s == "target") rep = mc::check_target_time(seed + 2036);
    else throw mc::ValidationError("unknown suite " + s);
    std::printf("suite %s: %s (%.2fs)\n", rep.name.c_str(),
                rep.pass() ? "pass" : "FAIL", rep.seconds);
    for (const auto& l : rep.lines)
      std::printf("  [%s] %s (%s)\n", l.pass ? "PASS" : "FAIL",
                  l.label.c_str(), l.detail.c_str());
    all_pass = all_pass && rep.pass();
  }
  return all_pass ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"average-reward multichain MDP toolkit"};
  app.require_subcommand(1);
  int rc = 0;

  // gen
  auto* gen = app.add_subcommand("gen", "generate a fixture MDP file");
  std::string gen_name;
  std::vector<int> gen_sizes{2, 2};
  int gen_transient = 2, gen_actions = 2, gen_core = 4, gen_fringe = 2,
      gen_ring = 6;
  double gen_noise = 0.2, gen_bound = 1.0;
  std::uint64_t gen_seed = 0;
  std::string gen_out = "out";
  gen->add_option("name", gen_name,
                  "twochain | random_multichain | weakly_comm | ergodic_ring")
      ->required();
  gen->add_option("--sizes", gen_sizes, "recurrent class sizes")
      ->delimiter(',');
  gen->add_option("--transient", gen_transient, "number of transient states");
  gen->add_option("--actions", gen_actions, "number of actions");
  gen->add_option("--core", gen_core, "weakly_comm: communicating core size");
  gen->add_option("--fringe", gen_fringe, "weakly_comm: transient fringe size");
  gen->add_option("--ring", gen_ring, "ergodic_ring: ring length");
  gen->add_option("--noise", gen_noise, "ergodic_ring: mixing noise");
  gen->add_option("--reward-bound", gen_bound, "reward magnitude bound");
  gen->add_option("--seed", gen_seed, "seed");
  gen->add_option("--out", gen_out, "output directory");
  gen->callback([&] {
    rc = cmd_gen(gen_name, gen_sizes, gen_transient, gen_actions, gen_core,
                 gen_fringe, gen_ring, gen_noise, gen_bound, gen_seed, gen_out);
  });

  // solve
  auto* solve = app.add_subcommand(
      "solve", "exact gain/bias/value tables, visitations, chain constants");
  std::string solve_mdp, solve_mu = "uniform", solve_policy, solve_out = "out";
  std::uint64_t solve_seed = 0;
  solve->add_option("--mdp", solve_mdp, "MDP file")->required();
  solve->add_option("--mu", solve_mu, "start distribution: uniform or a file");
  solve->add_option("--policy", solve_policy,
                    "policy file (default: uniform policy)");
  solve->add_option("--seed", solve_seed, "seed (cover-time sampling)");
  solve->add_option("--out", solve_out, "output directory");
  solve->callback(
      [&] { rc = cmd_solve(solve_mdp, solve_mu, solve_policy, solve_seed,
                           solve_out); });

  // classify
  auto* cls = app.add_subcommand("classify",
                                 "recurrent classes and transient states");
  std::string cls_mdp, cls_out;
  bool cls_sampled = false;
  double cls_delta = 0.05;
  std::uint64_t cls_seed = 0;
  cls->add_option("--mdp", cls_mdp, "MDP file")->required();
  cls->add_flag("--sampled", cls_sampled,
                "also classify from a generative model with suggested windows");
  cls->add_option("--delta", cls_delta, "window failure probability");
  cls->add_option("--seed", cls_seed, "seed");
  cls->add_option("--out", cls_out, "optional output directory");
  cls->callback([&] {
    rc = cmd_classify(cls_mdp, cls_sampled, cls_delta, cls_seed, cls_out);
  });

  // project
  auto* proj = app.add_subcommand("project",
                                  "project a vector onto the floored simplex");
  std::vector<double> proj_q;
  double proj_alpha = 0.0;
  std::string proj_div = "euclid";
  proj->add_option("--q", proj_q, "input vector")->delimiter(',')->required();
  proj->add_option("--alpha", proj_alpha, "floor")->required();
  proj->add_option("--div", proj_div, "kl or euclid");
  proj->callback([&] { rc = cmd_project(proj_q, proj_alpha, proj_div); });

  // pma / spma
  AscentConfig pma_cfg;
  auto* pma = app.add_subcommand("pma", "exact clipped policy mirror ascent");
  add_ascent_options(pma, pma_cfg);
  pma->callback([&] { rc = cmd_pma(pma_cfg); });

  AscentConfig spma_cfg;
  mc::CriticConfig spma_critic{10, 100, 10, 100};
  auto* spma = app.add_subcommand("spma",
                                  "sampled clipped policy mirror ascent");
  add_ascent_options(spma, spma_cfg);
  spma->add_option("--n", spma_critic.n, "trajectories per (s,a), first stage");
  spma->add_option("--horizon", spma_critic.h, "horizon, first stage");
  spma->add_option("--n2", spma_critic.n2,
                   "trajectories per (s,a), second stage");
  spma->add_option("--horizon2", spma_critic.h2, "horizon, second stage");
  spma->callback([&] { rc = cmd_spma(spma_cfg, spma_critic); });

  // critic
  auto* critic = app.add_subcommand("critic",
                                    "two-stage rollout estimate of G");
  std::string critic_mdp, critic_policy, critic_out = "out";
  mc::CriticConfig critic_cfg{10, 100, 10, 100};
  std::uint64_t critic_seed = 0;
  critic->add_option("--mdp", critic_mdp, "MDP file")->required();
  critic->add_option("--policy", critic_policy,
                     "policy file (default: uniform policy)");
  critic->add_option("--n", critic_cfg.n,
                     "trajectories per (s,a), first stage");
  critic->add_option("--horizon", critic_cfg.h, "horizon, first stage");
  critic->add_option("--n2", critic_cfg.n2,
                     "trajectories per (s,a), second stage");
  critic->add_option("--horizon2", critic_cfg.h2, "horizon, second stage");
  critic->add_option("--seed", critic_seed, "seed");
  critic->add_option("--out", critic_out, "output directory");
  critic->callback([&] {
    rc = cmd_critic(critic_mdp, critic_policy, critic_cfg, critic_seed,
                    critic_out);
  });

  // check
  auto* check = app.add_subcommand("check", "run property suites");
  std::vector<std::string> check_suites;
  std::uint64_t check_seed = 0;
  check->add_option("suites", check_suites,
                    "bellman pdl grad proj monotone rates critic classify "
                    "spma weakly target, or all");
  check->add_option("--seed", check_seed, "seed offset for the suites");
  check->callback([&] { rc = cmd_check(check_suites, check_seed); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const mc::InfeasibleConfigError& e) {
    std::fprintf(stderr, "infeasible configuration: %s\n", e.what());
    return 3;
  } catch (const mc::ValidationError& e) {
    std::fprintf(stderr, "validation failure: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return rc;
}
