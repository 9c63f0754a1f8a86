#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "tourney/errors.hpp"
#include "tourney/gauntlet.hpp"
#include "tourney/io.hpp"
#include "tourney/manipulation.hpp"
#include "tourney/rules.hpp"
#include "tourney/tournament.hpp"

namespace tourney {

inline std::vector<double> eps_grid(double lo, double hi, double step) {
  if (step <= 0.0 || lo < 0.0 || hi > 0.5 || lo > hi)
    fail(errc::degenerate_inputs, "epsilon grid needs 0 <= lo <= hi <= 1/2 and step > 0");
  std::vector<double> g;
  for (int k = 0;; ++k) {
    double x = lo + k * step;
    if (x > hi + 1e-12) break;
    g.push_back(std::min(x, hi));
  }
  return g;
}

inline std::vector<double> default_eps_grid() { return eps_grid(0.0, 0.5, 0.05); }

struct verify_options {
  int threads = 1;
  std::uint64_t seed = 0xC0FFEEULL;
};

namespace detail {

inline void add_row(std::vector<property_row>& rows, std::string prop, std::string rule, int n,
                    double eps, std::uint64_t instances, double violation, double tol) {
  rows.push_back({std::move(prop), std::move(rule), n, eps, instances, violation,
                  violation <= tol});
}

inline double pair_sum(const std::vector<double>& d, int u, int v) {
  return d[static_cast<std::size_t>(u)] + d[static_cast<std::size_t>(v)];
}

// winner probability recovered from the gauntlet: sum over sequences of the
// draw probability times the product of the focal team's match probabilities
inline double win_via_gauntlet(rule_kind rule, const prob_tournament& t, int focal) {
  auto g = gauntlet_dist(rule, t, focal);
  double acc = 0.0;
  for (const auto& [seq, p] : g.probs) {
    double prod = p;
    for (int x : seq) prod *= t.prob(focal, x);
    acc += prod;
  }
  return acc;
}

}  // namespace detail

// ---- deterministic suite ----------------------------------------------------

inline std::vector<property_row> verify_deterministic(const verify_options& opt = {}) {
  std::vector<property_row> rows;

  const std::vector<std::pair<rule_kind, std::vector<int>>> tight = {
      {rule_kind::rdm, {3, 4, 5}}, {rule_kind::rseb, {3, 4}}};
  for (const auto& [rule, ns] : tight)
    for (int n : ns) {
      auto wc = alpha_worst_case(rule, n, 0.5, opt.threads);
      detail::add_row(rows, "det-exhaustive-tightness", rule_name(rule), n, 0.5,
                      wc.instances_checked, std::abs(wc.max_gain - 1.0 / 3.0), 1e-9);
    }

  for (rule_kind rule : {rule_kind::rdm, rule_kind::rseb, rule_kind::rkoth})
    for (int n = 3; n <= 5; ++n) {
      double viol = 0.0;
      std::uint64_t instances = 0;
      auto en = enumerate_strict(n, 0.5);
      for (std::uint64_t code = 0; code < en.size(); ++code) {
        prob_tournament t = en.at(code);
        auto cw = condorcet_winner(t);
        if (!cw) continue;
        ++instances;
        auto wd = exact_winner_distribution(rule, t);
        viol = std::max(viol, std::abs(wd.probs[static_cast<std::size_t>(*cw)] - 1.0));
      }
      detail::add_row(rows, "condorcet-consistency", rule_name(rule), n, 0.5, instances, viol,
                      1e-12);
    }

  for (rule_kind rule : {rule_kind::rdm, rule_kind::rseb, rule_kind::rkoth})
    for (int n : {4, 5}) {
      rng r(opt.seed + static_cast<std::uint64_t>(n));
      int count = n == 4 ? 6 : 3;
      double viol = 0.0;
      std::uint64_t instances = 0;
      for (int s = 0; s < count; ++s) {
        prob_tournament t = sample_weak(n, 0.45, r);
        auto base = exact_winner_distribution(rule, t);
        std::vector<int> sigma(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) sigma[static_cast<std::size_t>(i)] = i;
        do {
          prob_tournament pt = permute(t, sigma);
          auto pd = exact_winner_distribution(rule, pt);
          for (int i = 0; i < n; ++i)
            viol = std::max(viol,
                            std::abs(pd.probs[static_cast<std::size_t>(
                                         sigma[static_cast<std::size_t>(i)])] -
                                     base.probs[static_cast<std::size_t>(i)]));
          ++instances;
        } while (std::next_permutation(sigma.begin(), sigma.end()));
      }
      detail::add_row(rows, "anonymity", rule_name(rule), n, 0.45, instances, viol, 1e-12);
    }

  return rows;
}

// ---- epsilon suite ----------------------------------------------------------

inline std::vector<property_row> verify_epsilon(const verify_options& opt = {}) {
  std::vector<property_row> rows;
  auto grid = default_eps_grid();

  for (rule_kind rule : {rule_kind::rdm, rule_kind::rseb})
    for (double eps : grid) {
      double gain = alpha_pair(rule, three_cycle(eps), 0, 1).gain;
      detail::add_row(rows, "three-cycle-curve", rule_name(rule), 3, eps, 1,
                      std::abs(gain - lower_bound_formula(eps)), 1e-9);
    }

  for (rule_kind rule : {rule_kind::rdm, rule_kind::rseb})
    for (double eps : grid) {
      auto wc = alpha_worst_case(rule, 4, eps, opt.threads);
      detail::add_row(rows, "strict-exhaustive-upper", rule_name(rule), 4, eps,
                      wc.instances_checked, wc.max_gain - lower_bound_formula(eps), 1e-9);
    }

  for (rule_kind rule : {rule_kind::rdm, rule_kind::rseb})
    for (double eps : grid) {
      auto gs = coalition_gain_sum_check(rule, eps);
      double viol = std::abs(gs.sum - gs.expected_sum);
      for (double g : gs.gains) viol = std::max(viol, std::abs(g - gs.formula));
      detail::add_row(rows, "throw-gain-sum", rule_name(rule), 3, eps, 3, viol, 1e-9);
    }

  for (rule_kind rule : {rule_kind::rdm, rule_kind::rseb, rule_kind::rkoth})
    for (double eps : {0.1, 0.25, 0.5}) {
      double viol;
      std::uint64_t instances = 0;
      try {
        auto cr = convexity_check(rule, 4, eps, 200, opt.seed, opt.threads);
        viol = cr.max_weak_gain - cr.strict_max;
        instances = static_cast<std::uint64_t>(cr.samples) * pair_count(4);
      } catch (const tourney_error&) {
        viol = 1.0;
      }
      detail::add_row(rows, "convexity", rule_name(rule), 4, eps, instances, viol, 1e-9);
    }

  return rows;
}

// ---- gauntlet suite ---------------------------------------------------------

inline std::vector<property_row> verify_gauntlet(const verify_options& opt = {}) {
  std::vector<property_row> rows;

  const std::vector<std::pair<rule_kind, std::vector<int>>> sizes = {
      {rule_kind::rdm, {3, 4, 5}}, {rule_kind::rseb, {3, 4}}};
  for (const auto& [rule, ns] : sizes)
    for (int n : ns) {
      std::vector<double> eps_list = n >= 5 ? std::vector<double>{0.25}
                                            : std::vector<double>{0.1, 0.25, 0.5};
      double viol = 0.0;
      std::uint64_t instances = 0;
      for (double eps : eps_list) {
        auto en = enumerate_strict(n, eps);
        for (std::uint64_t code = 0; code < en.size(); ++code) {
          prob_tournament t = en.at(code);
          for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v) {
              auto res = gauntlet_independence_check(rule, t, u, v);
              viol = std::max(viol, res.max_tv);
              ++instances;
            }
        }
      }
      detail::add_row(rows, "gauntlet-independence-tv", rule_name(rule), n, 0.25, instances,
                      viol, 1e-9);
    }

  {
    double viol = 1.0;
    try {
      gauntlet_independence_check(rule_kind::rkoth, three_cycle(0.25), 0, 1);
    } catch (const tourney_error& e) {
      if (e.code() == errc::not_matching_rule) viol = 0.0;
    }
    detail::add_row(rows, "rkoth-independence-refused", "rkoth", 3, 0.25, 1, viol, 0.0);
  }

  for (rule_kind rule : {rule_kind::rdm, rule_kind::rseb, rule_kind::rkoth}) {
    rng r(opt.seed ^ 0x9e3779b97f4a7c15ULL);
    double viol = 0.0;
    std::uint64_t instances = 0;
    for (int s = 0; s < 5; ++s) {
      int n = s < 3 ? 4 : 5;
      prob_tournament t = sample_weak(n, 0.4, r);
      auto wd = exact_winner_distribution(rule, t);
      for (int u = 0; u < n; ++u) {
        double via = detail::win_via_gauntlet(rule, t, u);
        viol = std::max(viol, std::abs(via - wd.probs[static_cast<std::size_t>(u)]));
        ++instances;
      }
    }
    detail::add_row(rows, "winner-gauntlet-identity", rule_name(rule), 5, 0.4, instances, viol,
                    1e-9);
  }

  {
    double viol = -1.0;
    std::uint64_t instances = 0;
    for (int n : {3, 4}) {
      auto en = enumerate_strict(n, 0.3);
      int cap = static_cast<int>(std::ceil(std::log2(pow2_ceil(n))));
      for (std::uint64_t code = 0; code < en.size(); ++code) {
        prob_tournament t = en.at(code);
        for (int u = 0; u < n; ++u) {
          auto g = gauntlet_dist(rule_kind::rseb, t, u);
          for (const auto& [seq, p] : g.probs) {
            if (p == 0.0) continue;
            viol = std::max(viol, static_cast<double>(static_cast<int>(seq.size()) - cap));
            for (int x : seq)
              if (x == u || x < 0) viol = std::max(viol, 1.0);
          }
          ++instances;
        }
      }
    }
    detail::add_row(rows, "rseb-gauntlet-depth", "rseb", 4, 0.3, instances, viol, 0.0);
  }

  return rows;
}

// ---- framework suite --------------------------------------------------------

inline std::vector<property_row> verify_framework(const verify_options& opt = {}) {
  std::vector<property_row> rows;
  auto grid = default_eps_grid();

  for (int n = 3; n <= 6; ++n) {
    auto e = event_probs(rule_kind::rdm, uniform_half(n), 0, 1);
    double closed = 1.0 / static_cast<double>(pair_count(n));
    detail::add_row(rows, "pr-bad-closed-form", "rdm", n, 0.0, 1,
                    std::abs(e.pr_bad - closed), 0.0);
  }
  for (int n = 3; n <= 5; ++n) {
    auto e = event_probs(rule_kind::rseb, uniform_half(n), 0, 1);
    double closed = 1.0 / static_cast<double>(pow2_ceil(n) - 1);
    detail::add_row(rows, "pr-bad-closed-form", "rseb", n, 0.0, 1,
                    std::abs(e.pr_bad - closed), 0.0);
  }

  const std::vector<std::pair<rule_kind, std::vector<int>>> sizes = {
      {rule_kind::rdm, {3, 4, 5}}, {rule_kind::rseb, {3, 4}}};
  for (const auto& [rule, ns] : sizes)
    for (int n : ns) {
      double viol = -1.0;
      std::uint64_t instances = 0;
      for (double eps : grid) {
        if (eps == 0.0) continue;
        auto en = enumerate_strict(n, eps);
        for (std::uint64_t code = 0; code < en.size(); ++code) {
          prob_tournament t = en.at(code);
          for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v) {
              auto [lu, lv] = l_values(t, eps, u, v);
              if (lu + lv < 1) continue;
              auto e = event_probs(rule, t, u, v);
              viol = std::max(viol, 2.0 * e.pr_bad - e.pr_good);
              ++instances;
            }
        }
      }
      detail::add_row(rows, "good-covers-twice-bad", rule_name(rule), n, 0.5, instances, viol,
                      1e-9);
    }

  for (rule_kind rule : {rule_kind::rdm, rule_kind::rseb})
    for (int n : {3, 4}) {
      double viol = -1.0;
      std::uint64_t instances = 0;
      for (double eps : grid) {
        double cap = 2.0 * eps * (0.5 + eps);
        auto en = enumerate_strict(n, eps);
        for (std::uint64_t code = 0; code < en.size(); ++code) {
          prob_tournament t = en.at(code);
          for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v) {
              viol = std::max(viol, conditional_bad_gain(rule, t, u, v) - cap);
              ++instances;
            }
        }
      }
      detail::add_row(rows, "conditional-bad-gain-cap", rule_name(rule), n, 0.5, instances,
                      viol, 1e-9);
    }

  for (rule_kind rule : {rule_kind::rdm, rule_kind::rseb})
    for (int n : {3, 4}) {
      double viol = -1.0;
      std::uint64_t instances = 0;
      for (double eps : grid) {
        double c = 2.0 * eps * (0.5 + eps);
        auto en = enumerate_strict(n, eps);
        for (std::uint64_t code = 0; code < en.size(); ++code) {
          prob_tournament t = en.at(code);
          for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v) {
              double gain = alpha_pair(rule, t, u, v).gain;
              auto e = event_probs(rule, t, u, v);
              double bound = framework_bound(e.pr_bad, e.pr_good, c);
              viol = std::max(viol, gain - bound);
              ++instances;
            }
        }
      }
      detail::add_row(rows, "framework-consistency", rule_name(rule), n, 0.5, instances, viol,
                      1e-9);
    }

  for (rule_kind rule : {rule_kind::rdm, rule_kind::rseb})
    for (int n : {3, 4}) {
      double viol = -1.0;
      std::uint64_t instances = 0;
      for (double eps : {0.1, 0.3, 0.5}) {
        auto en = enumerate_strict(n, eps);
        for (std::uint64_t code = 0; code < en.size(); ++code) {
          prob_tournament t = en.at(code);
          for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v) {
              auto es = event_probs(rule, t, u, v, event_basis::sufficient);
              auto ee = event_probs(rule, t, u, v, event_basis::exact);
              viol = std::max(viol, es.pr_good - ee.pr_good);
              ++instances;
            }
        }
      }
      detail::add_row(rows, "sufficient-within-exact", rule_name(rule), n, 0.5, instances, viol,
                      1e-12);
    }

  {
    double viol = -1.0, eq_viol = 0.0;
    std::uint64_t instances = 0;
    for (double eps : grid) {
      for (int n = 1; n <= 20; ++n)
        for (int i = 0; i <= n; ++i)
          for (int j = 0; j <= n; ++j) {
            viol = std::max(viol, calcs_lhs(n, i, j, eps) - 2.0 * eps);
            ++instances;
          }
      eq_viol = std::max(eq_viol, std::abs(calcs_lhs(1, 1, 0, eps) - 2.0 * eps));
    }
    detail::add_row(rows, "calcs-inequality", "-", 20, 0.5, instances, viol, 1e-12);
    detail::add_row(rows, "calcs-equality-at-110", "-", 1, 0.5, grid.size(), eq_viol, 1e-12);
  }

  {
    double viol = 0.0, ev_viol = 0.0;
    std::uint64_t instances = 0, ev_instances = 0;
    for (double eps : grid) {
      double closed = 27.0 / 70.0 - (2.0 / 35.0) * eps * eps;
      viol = std::max(viol, std::abs(subcase_3b_probability(eps) - closed));
      ++instances;
      if (eps > 0.0) {
        auto e = event_probs(rule_kind::rseb, subcase_3b_tournament(eps), 0, 1);
        ev_viol = std::max(ev_viol, std::abs(e.pr_good - closed));
        ++ev_instances;
      }
    }
    detail::add_row(rows, "subcase-3b-closed-form", "rseb", 5, 0.5, instances, viol, 1e-9);
    detail::add_row(rows, "subcase-3b-event-match", "rseb", 5, 0.5, ev_instances, ev_viol, 1e-9);
  }

  {
    double viol = 0.0;
    std::uint64_t instances = 0;
    for (double b : {1.0 / 3.0, 1.0 / 6.0, 1.0 / 10.0, 1.0 / 7.0}) {
      viol = std::max(viol, std::abs(framework_bound(b, 2.0 * b, 1.0) - 1.0 / 3.0));
      ++instances;
      for (double eps : grid) {
        double c = 2.0 * eps * (0.5 + eps);
        viol = std::max(viol,
                        std::abs(framework_bound(b, 2.0 * b, c) - lower_bound_formula(eps)));
        ++instances;
      }
    }
    detail::add_row(rows, "framework-reproduces-curve", "-", 0, 0.5, instances, viol, 1e-12);
  }

  (void)opt;
  return rows;
}

inline std::vector<property_row> run_suite(const std::string& name,
                                           const verify_options& opt = {}) {
  std::vector<property_row> rows;
  auto append = [&](std::vector<property_row> more) {
    for (auto& r : more) rows.push_back(std::move(r));
  };
  if (name == "deterministic")
    append(verify_deterministic(opt));
  else if (name == "epsilon")
    append(verify_epsilon(opt));
  else if (name == "gauntlet")
    append(verify_gauntlet(opt));
  else if (name == "framework")
    append(verify_framework(opt));
  else if (name == "all") {
    append(verify_deterministic(opt));
    append(verify_epsilon(opt));
    append(verify_gauntlet(opt));
    append(verify_framework(opt));
  } else {
    fail(errc::degenerate_inputs,
         "suite must be one of deterministic, epsilon, gauntlet, framework, all");
  }
  return rows;
}

inline bool all_pass(const std::vector<property_row>& rows) {
  for (const auto& r : rows)
    if (!r.pass) return false;
  return true;
}

}  // namespace tourney
