// Batch front end: winner distributions, manipulation analysis, epsilon
// sweeps, verification suites, and gauntlet reports. Artifacts go to stdout
// (or --out), logs to stderr. Exit codes: 0 success, 1 property violation,
// 2 usage or validation error.
#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "tourney/gauntlet.hpp"
#include "tourney/io.hpp"
#include "tourney/manipulation.hpp"
#include "tourney/rules.hpp"
#include "tourney/tournament.hpp"
#include "tourney/verify.hpp"

namespace {

int default_threads() {
  const char* env = std::getenv("TOURNEY_THREADS");
  if (!env) return 1;
  int v = std::atoi(env);
  return v >= 1 ? v : 1;
}

struct generator_options {
  double three_cycle_eps = -1.0;
  int det_cycle_n = 0;
  int transitive_n = 0;
  int uniform_n = 0;
  bool strict_random = false;
  bool weak_random = false;
  int n = 0;
  double eps = 0.25;
  std::string input;

  void attach(CLI::App* cmd) {
    cmd->add_option("--three-cycle", three_cycle_eps,
                    "3-cycle with forward probability 1/2+eps");
    cmd->add_option("--det-cycle", det_cycle_n, "rotational deterministic tournament on K teams");
    cmd->add_option("--transitive", transitive_n, "transitive deterministic tournament on K teams");
    cmd->add_option("--uniform", uniform_n, "all-1/2 tournament on K teams");
    cmd->add_flag("--strict-random", strict_random, "sample strictly eps-bounded (needs --n, --eps)");
    cmd->add_flag("--weak-random", weak_random, "sample weakly eps-bounded (needs --n, --eps)");
    cmd->add_option("--n", n, "team count for sampled tournaments");
    cmd->add_option("--eps", eps, "epsilon for sampled and constructed tournaments");
    cmd->add_option("--input", input, "read tournament JSON {\"n\": int, \"p\": matrix} from file");
  }

  tourney::prob_tournament build(std::uint64_t seed, tourney::json& config) const {
    namespace ty = tourney;
    int ways = (three_cycle_eps >= 0.0) + (det_cycle_n > 0) + (transitive_n > 0) +
               (uniform_n > 0) + strict_random + weak_random + !input.empty();
    if (ways != 1)
      ty::fail(ty::errc::degenerate_inputs,
               "choose exactly one tournament source (--three-cycle, --det-cycle, "
               "--transitive, --uniform, --strict-random, --weak-random, --input)");
    if (three_cycle_eps >= 0.0) {
      config["generator"] = {{"kind", "three-cycle"}, {"eps", three_cycle_eps}};
      return ty::three_cycle(three_cycle_eps);
    }
    if (det_cycle_n > 0) {
      config["generator"] = {{"kind", "det-cycle"}, {"n", det_cycle_n}};
      return ty::det_cycle(det_cycle_n);
    }
    if (transitive_n > 0) {
      config["generator"] = {{"kind", "transitive"}, {"n", transitive_n}};
      return ty::transitive(transitive_n);
    }
    if (uniform_n > 0) {
      config["generator"] = {{"kind", "uniform"}, {"n", uniform_n}};
      return ty::uniform_half(uniform_n);
    }
    if (strict_random || weak_random) {
      if (n < 2) ty::fail(ty::errc::too_few_teams, "sampled tournaments need --n >= 2");
      config["generator"] = {{"kind", strict_random ? "strict-random" : "weak-random"},
                             {"n", n},
                             {"eps", eps}};
      ty::rng r(seed);
      return strict_random ? ty::sample_strict(n, eps, r) : ty::sample_weak(n, eps, r);
    }
    std::ifstream in(input);
    if (!in) ty::fail(ty::errc::degenerate_inputs, "cannot open " + input);
    ty::json j = ty::json::parse(in, nullptr, false);
    if (j.is_discarded())
      ty::fail(ty::errc::degenerate_inputs, input + " is not valid JSON");
    config["generator"] = {{"kind", "input"}, {"path", input}};
    return ty::tournament_from_json(j);
  }
};

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << "\n";
  } else {
    std::ofstream out(out_path);
    if (!out) tourney::fail(tourney::errc::degenerate_inputs, "cannot write " + out_path);
    out << text;
    if (!text.empty() && text.back() != '\n') out << "\n";
    std::cerr << "wrote " << out_path << "\n";
  }
}

std::vector<double> parse_grid(const std::string& spec) {
  double lo = 0.0, hi = 0.0, step = 0.0;
  char c1 = 0, c2 = 0;
  std::istringstream is(spec);
  if (!(is >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':')
    tourney::fail(tourney::errc::degenerate_inputs, "grid must be LO:HI:STEP");
  return tourney::eps_grid(lo, hi, step);
}

}  // namespace

int main(int argc, char** argv) {
  namespace ty = tourney;
  CLI::App app{"exact and Monte Carlo analysis of recursive tournament rules"};
  app.require_subcommand(1);

  std::string rule_s = "rdm", mode = "exact", out_path;
  std::uint64_t trials = 1'000'000, seed = 0;
  int threads = default_threads();

  auto add_common = [&](CLI::App* cmd, bool with_mode) {
    cmd->add_option("--rule", rule_s, "tournament rule: rdm, rseb, rkoth");
    cmd->add_option("--seed", seed, "random seed");
    cmd->add_option("--threads", threads, "worker threads (default: TOURNEY_THREADS or 1)");
    cmd->add_option("--out", out_path, "write the artifact to a file instead of stdout");
    if (with_mode) {
      cmd->add_option("--mode", mode, "evaluation mode: exact or mc");
      cmd->add_option("--trials", trials, "Monte Carlo trials");
    }
  };

  auto* winners = app.add_subcommand("winners", "winner distribution for one tournament");
  generator_options wgen;
  wgen.attach(winners);
  add_common(winners, true);

  auto* alpha = app.add_subcommand("alpha", "pair-coalition manipulability");
  generator_options agen;
  agen.attach(alpha);
  add_common(alpha, false);
  std::vector<int> pair_uv;
  bool worst_case = false, gain_sum = false;
  int wc_n = 4;
  alpha->add_option("--pair", pair_uv, "coalition pair u v")->expected(2);
  alpha->add_flag("--worst-case", worst_case, "exhaustive worst case over the strict class");
  alpha->add_flag("--gain-sum", gain_sum, "designated-throw gain sum on the 3-cycle");
  alpha->add_option("--wc-n", wc_n, "team count for --worst-case");

  auto* sweep = app.add_subcommand("sweep", "worst-case gain across an epsilon grid (CSV)");
  add_common(sweep, false);
  int sweep_n = 4;
  std::string grid_s = "0:0.5:0.05";
  sweep->add_option("--n", sweep_n, "team count");
  sweep->add_option("--eps-grid", grid_s, "epsilon grid LO:HI:STEP");

  auto* verify = app.add_subcommand("verify", "run a verification suite (CSV)");
  add_common(verify, false);
  std::string suite = "all";
  verify->add_option("--suite", suite, "deterministic, epsilon, gauntlet, framework, all");

  auto* gauntlet = app.add_subcommand("gauntlet", "gauntlet and terminal-event reports");
  generator_options ggen;
  ggen.attach(gauntlet);
  add_common(gauntlet, false);
  int team = -1;
  std::vector<int> gpair;
  bool events = false, independence = false, cond_gain = false;
  std::string basis_s = "sufficient";
  gauntlet->add_option("--team", team, "focal team: opponent-sequence distribution");
  gauntlet->add_option("--pair", gpair, "coalition pair u v")->expected(2);
  gauntlet->add_flag("--events", events, "terminal-event probabilities for --pair");
  gauntlet->add_flag("--independence", independence, "gauntlet independence check for --pair");
  gauntlet->add_flag("--cond-gain", cond_gain, "conditional bad-event gain for --pair");
  gauntlet->add_option("--basis", basis_s, "event basis: sufficient or exact");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    ty::rule_kind rule = ty::rule_from_name(rule_s);

    if (*winners) {
      ty::json config{{"command", "winners"}, {"rule", rule_s}, {"mode", mode},
                      {"threads", threads}};
      ty::prob_tournament t = wgen.build(seed, config);
      ty::validate(t);
      ty::winner_distribution wd;
      if (mode == "exact") {
        wd = ty::exact_winner_distribution(rule, t);
      } else if (mode == "mc") {
        config["trials"] = trials;
        wd = ty::mc_winner_distribution(rule, t, trials, seed, threads);
      } else {
        ty::fail(ty::errc::degenerate_inputs, "mode must be exact or mc");
      }
      ty::json j = ty::winner_to_json(wd);
      j["meta"] = ty::meta_json(config, seed);
      emit(j.dump(2), out_path);
      return 0;
    }

    if (*alpha) {
      ty::json config{{"command", "alpha"}, {"rule", rule_s}, {"threads", threads}};
      if (gain_sum) {
        config["eps"] = agen.eps;
        auto gs = ty::coalition_gain_sum_check(rule, agen.eps);
        ty::json j = ty::gain_sum_to_json(rule, agen.eps, gs);
        j["meta"] = ty::meta_json(config, seed);
        emit(j.dump(2), out_path);
        return 0;
      }
      if (worst_case) {
        config["n"] = wc_n;
        config["eps"] = agen.eps;
        auto wc = ty::alpha_worst_case(rule, wc_n, agen.eps, threads);
        ty::json j = ty::worst_case_to_json(wc);
        if (rule == ty::rule_kind::rkoth) j["exploratory"] = true;
        j["meta"] = ty::meta_json(config, seed);
        emit(j.dump(2), out_path);
        return 0;
      }
      if (pair_uv.size() != 2)
        ty::fail(ty::errc::bad_coalition, "alpha needs --pair U V, --worst-case, or --gain-sum");
      ty::prob_tournament t = agen.build(seed, config);
      ty::validate(t);
      config["pair"] = pair_uv;
      auto rep = ty::alpha_pair(rule, t, pair_uv[0], pair_uv[1]);
      ty::json j = ty::report_to_json(rep);
      j["meta"] = ty::meta_json(config, seed);
      emit(j.dump(2), out_path);
      return 0;
    }

    if (*sweep) {
      ty::json config{{"command", "sweep"}, {"rule", rule_s}, {"n", sweep_n},
                      {"eps-grid", grid_s}, {"threads", threads}};
      auto rows = ty::epsilon_sweep(rule, sweep_n, parse_grid(grid_s), threads);
      emit(ty::csv_preamble(config, seed) + ty::sweep_csv(rows), out_path);
      if (rule != ty::rule_kind::rkoth)
        for (const auto& r : rows)
          if (r.slack < -1e-9) {
            std::cerr << "slack violation at eps=" << r.epsilon << "\n";
            return 1;
          }
      return 0;
    }

    if (*verify) {
      ty::json config{{"command", "verify"}, {"suite", suite}, {"threads", threads}};
      ty::verify_options opt;
      opt.threads = threads;
      if (seed != 0) opt.seed = seed;
      auto rows = ty::run_suite(suite, opt);
      emit(ty::csv_preamble(config, opt.seed) + ty::verify_csv(rows), out_path);
      if (!ty::all_pass(rows)) {
        std::cerr << "verification failures present\n";
        return 1;
      }
      return 0;
    }

    if (*gauntlet) {
      ty::json config{{"command", "gauntlet"}, {"rule", rule_s}, {"threads", threads}};
      ty::prob_tournament t = ggen.build(seed, config);
      ty::validate(t);
      int actions = (team >= 0) + events + independence + cond_gain;
      if (actions != 1)
        ty::fail(ty::errc::degenerate_inputs,
                 "choose exactly one of --team, --events, --independence, --cond-gain");
      ty::json j;
      if (team >= 0) {
        config["team"] = team;
        j = ty::gauntlet_to_json(ty::gauntlet_dist(rule, t, team));
      } else {
        if (gpair.size() != 2)
          ty::fail(ty::errc::bad_coalition, "this report needs --pair U V");
        config["pair"] = gpair;
        if (events) {
          ty::event_basis basis = basis_s == "exact" ? ty::event_basis::exact
                                                     : ty::event_basis::sufficient;
          if (basis_s != "exact" && basis_s != "sufficient")
            ty::fail(ty::errc::degenerate_inputs, "basis must be sufficient or exact");
          config["basis"] = basis_s;
          j = ty::events_to_json(rule, gpair[0], gpair[1],
                                 ty::event_probs(rule, t, gpair[0], gpair[1], basis));
        } else if (independence) {
          j = ty::independence_to_json(
              rule, gpair[0], gpair[1],
              ty::gauntlet_independence_check(rule, t, gpair[0], gpair[1]));
        } else {
          j = ty::json{{"rule", rule_s},
                       {"pair", gpair},
                       {"conditional_bad_gain",
                        ty::conditional_bad_gain(rule, t, gpair[0], gpair[1])}};
        }
      }
      j["meta"] = ty::meta_json(config, seed);
      emit(j.dump(2), out_path);
      return 0;
    }
  } catch (const ty::tourney_error& e) {
    ty::json err{{"error", ty::errc_name(e.code())}, {"message", e.what()}};
    std::cout << err.dump(2) << "\n";
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ty::errc::violation_found ? 1 : 2;
  } catch (const std::exception& e) {
    ty::json err{{"error", "Unexpected"}, {"message", e.what()}};
    std::cout << err.dump(2) << "\n";
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
