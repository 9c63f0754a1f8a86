#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tourney/errors.hpp"
#include "tourney/rules.hpp"
#include "tourney/tournament.hpp"

namespace tourney {

// ---- gauntlet distributions -------------------------------------------

// Ordered sequence of real opponents the focal team must beat, drawn on the
// modified tournament where the focal row is forced to 1. Matching rules give
// at most one opponent per round; RKotH pivot rounds list simultaneous
// opponents in ascending id order.
struct gauntlet_distribution {
  rule_kind rule;
  int focal = 0;
  std::map<std::vector<int>, double> probs;
};

namespace detail {

inline prob_tournament force_row(const prob_tournament& t, int focal) {
  prob_tournament out = t;
  for (int w = 0; w < t.size(); ++w)
    if (w != focal) out = out.with_edge(focal, w, 1.0);
  return out;
}

class gauntlet_engine {
 public:
  using seq_map = std::map<std::vector<int>, double>;

  gauntlet_engine(rule_kind rule, const prob_tournament& t, int focal)
      : rule_(rule), t_(force_row(t, focal)), focal_(focal) {}

  const seq_map& dist(std::uint32_t mask) {
    auto it = memo_.find(mask);
    if (it != memo_.end()) return it->second;
    seq_map out;
    if (std::popcount(mask) == 1) {
      out[{}] = 1.0;
    } else {
      for (const auto& ms : round_match_sets(rule_, ids_from_mask(mask))) {
        std::vector<int> mine;
        for (auto [a, b] : ms.matches) {
          if (a == focal_ && b >= 0) mine.push_back(b);
          if (b == focal_ && a >= 0) mine.push_back(a);
        }
        std::sort(mine.begin(), mine.end());
        auto rm = real_matches(ms, mask);
        for_each_outcome(t_, rm, mask, [&](std::uint32_t sub, double p) {
          if (p == 0.0) return;
          for (const auto& [seq, sp] : dist(sub)) {
            std::vector<int> key = mine;
            key.insert(key.end(), seq.begin(), seq.end());
            out[key] += ms.prob * p * sp;
          }
        });
      }
    }
    return memo_.emplace(mask, std::move(out)).first->second;
  }

 private:
  rule_kind rule_;
  prob_tournament t_;
  int focal_;
  std::map<std::uint32_t, seq_map> memo_;
};

}  // namespace detail

inline gauntlet_distribution gauntlet_dist(rule_kind rule, const prob_tournament& t, int focal) {
  if (focal < 0 || focal >= t.size()) fail(errc::bad_coalition, "focal team out of range");
  detail::gauntlet_engine eng(rule, t, focal);
  std::uint32_t full = (1u << t.size()) - 1u;
  gauntlet_distribution out;
  out.rule = rule;
  out.focal = focal;
  out.probs = eng.dist(full);
  return out;
}

// ---- gauntlet independence (matching rules) -----------------------------

struct independence_result {
  double max_tv = 0.0;
  int matchsets_checked = 0;
};

// For every first-round draw whose matching pairs u with v: the winner's
// opponent-sequence distribution must not depend on which of them won.
// Total variation is half the L1 distance.
inline independence_result gauntlet_independence_check(rule_kind rule,
                                                       const prob_tournament& t, int u, int v) {
  if (rule == rule_kind::rkoth)
    fail(errc::not_matching_rule,
         "gauntlet independence is defined for matching rules only (rdm, rseb)");
  check_pair_coalition(t, coalition{u, v});
  std::uint32_t full = (1u << t.size()) - 1u;
  detail::gauntlet_engine eng_u(rule, t, u), eng_v(rule, t, v);
  independence_result res;
  for (const auto& ms : round_match_sets(rule, ids_from_mask(full))) {
    if (!match_set_contains(ms, u, v)) continue;
    ++res.matchsets_checked;
    // resolve the round's other matches, then mix the winner's gauntlet
    auto rm = detail::real_matches(ms, full);
    std::erase_if(rm, [&](const std::pair<int, int>& m) {
      return (m.first == u && m.second == v) || (m.first == v && m.second == u);
    });
    auto mixture = [&](detail::gauntlet_engine& eng, int loser) {
      std::map<std::vector<int>, double> mix;
      std::uint32_t base = full & ~(1u << loser);
      detail::for_each_outcome(t, rm, base, [&](std::uint32_t sub, double p) {
        if (p == 0.0) return;
        for (const auto& [seq, sp] : eng.dist(sub)) mix[seq] += p * sp;
      });
      return mix;
    };
    auto du = mixture(eng_u, v);
    auto dv = mixture(eng_v, u);
    double l1 = 0.0;
    for (const auto& [seq, p] : du) {
      auto it = dv.find(seq);
      l1 += std::abs(p - (it == dv.end() ? 0.0 : it->second));
    }
    for (const auto& [seq, p] : dv)
      if (!du.count(seq)) l1 += p;
    res.max_tv = std::max(res.max_tv, 0.5 * l1);
  }
  return res;
}

// ---- terminal-event classification ------------------------------------

enum class event_class { bad, good_terminal, recursive };
enum class event_basis { sufficient, exact };

inline const char* event_class_name(event_class c) {
  switch (c) {
    case event_class::bad: return "bad";
    case event_class::good_terminal: return "good_terminal";
    case event_class::recursive: return "recursive";
  }
  return "unknown";
}

inline const char* event_basis_name(event_basis b) {
  return b == event_basis::sufficient ? "sufficient-condition" : "exact";
}

namespace detail {

inline bool columns_equal(const prob_tournament& t, std::uint32_t survivors, int u, int v) {
  for (int w = 0; w < t.size(); ++w) {
    if (w == u || w == v || !(survivors >> w & 1u)) continue;
    if (std::abs(t.prob(u, w) - t.prob(v, w)) > prob_tol) return false;
  }
  return true;
}

inline std::pair<prob_tournament, std::vector<int>> induced(const prob_tournament& t,
                                                            std::uint32_t mask) {
  std::vector<int> ids = ids_from_mask(mask);
  int m = static_cast<int>(ids.size());
  std::vector<double> up(static_cast<std::size_t>(pair_count(m)));
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      up[edge_index(m, i, j)] = t.prob(ids[static_cast<std::size_t>(i)], ids[static_cast<std::size_t>(j)]);
  std::vector<int> remap(static_cast<std::size_t>(t.size()), -1);
  for (int i = 0; i < m; ++i) remap[static_cast<std::size_t>(ids[static_cast<std::size_t>(i)])] = i;
  return {prob_tournament(m, std::move(up)), std::move(remap)};
}

inline double pair_gain_exact(rule_kind rule, const prob_tournament& t, int u, int v) {
  exact_engine base(rule, t);
  std::uint32_t full = (1u << t.size()) - 1u;
  const auto b = base.dist(full);
  double baseline = b[static_cast<std::size_t>(u)] + b[static_cast<std::size_t>(v)];
  double top = baseline;
  for (double e : {0.0, 1.0}) {
    exact_engine eng(rule, t.with_edge(u, v, e));
    const auto& d = eng.dist(full);
    top = std::max(top, d[static_cast<std::size_t>(u)] + d[static_cast<std::size_t>(v)]);
  }
  return top - baseline;
}

}  // namespace detail

inline constexpr double exact_basis_tol = 1e-9;

// Classifies one resolved round for the pair {u, v}. Bad: their internal match
// was drawn. Good terminal: no future gain is possible — certified either by
// the sufficient conditions (a member was eliminated, or the survivors see both
// members with identical columns) or, on the exact basis, by a vanishing pair
// gain on the surviving sub-tournament.
inline event_class classify_event(rule_kind rule, const prob_tournament& t, int u, int v,
                                  const match_set& ms, std::uint32_t survivors,
                                  event_basis basis) {
  if (match_set_contains(ms, u, v)) return event_class::bad;
  bool u_alive = (survivors >> u & 1u) != 0, v_alive = (survivors >> v & 1u) != 0;
  if (!u_alive || !v_alive) return event_class::good_terminal;
  if (detail::columns_equal(t, survivors, u, v)) return event_class::good_terminal;
  if (basis == event_basis::exact) {
    auto [sub, remap] = detail::induced(t, survivors);
    double g = detail::pair_gain_exact(rule, sub, remap[static_cast<std::size_t>(u)],
                                       remap[static_cast<std::size_t>(v)]);
    if (std::abs(g) <= exact_basis_tol) return event_class::good_terminal;
  }
  return event_class::recursive;
}

struct event_probabilities {
  double pr_bad = 0.0;
  double pr_good = 0.0;
  double pr_recursive = 0.0;
  event_basis basis = event_basis::sufficient;
};

// First-round event probabilities for the pair {u, v}. The bad probability is
// a ratio of equiprobable draw counts, so the rule's closed forms (1/C(n,2)
// for RDM, 1/(n'-1) for RSEB) are reproduced exactly.
inline event_probabilities event_probs(rule_kind rule, const prob_tournament& t, int u, int v,
                                       event_basis basis = event_basis::sufficient) {
  check_pair_coalition(t, coalition{u, v});
  std::uint32_t full = (1u << t.size()) - 1u;
  auto msets = round_match_sets(rule, ids_from_mask(full));
  std::uint64_t bad_count = 0;
  event_probabilities res;
  res.basis = basis;
  for (const auto& ms : msets) {
    if (match_set_contains(ms, u, v)) {
      ++bad_count;
      continue;
    }
    auto rm = detail::real_matches(ms, full);
    detail::for_each_outcome(t, rm, full, [&](std::uint32_t sub, double p) {
      if (p == 0.0) return;
      event_class c = classify_event(rule, t, u, v, ms, sub, basis);
      if (c == event_class::good_terminal)
        res.pr_good += ms.prob * p;
      else
        res.pr_recursive += ms.prob * p;
    });
  }
  res.pr_bad = static_cast<double>(bad_count) / static_cast<double>(msets.size());
  return res;
}

// ---- conditional bad-event gain ------------------------------------------

// E[pair win probability | the pair's internal match is drawn this round],
// maximized over the two adjacent extremes relative to the original edge.
// The continuation never queries the internal edge, so the value is linear in
// p_uv and the endpoint maximum dominates every manipulation.
inline double conditional_bad_gain(rule_kind rule, const prob_tournament& t, int u, int v) {
  if (rule == rule_kind::rkoth)
    fail(errc::not_matching_rule,
         "the conditional bad-event gain bound needs gauntlet independence (rdm, rseb)");
  check_pair_coalition(t, coalition{u, v});
  int cap = rule == rule_kind::rseb ? exact_cap_rseb : exact_cap_matching_free;
  if (t.size() > cap)
    fail(errc::exact_mode_too_large,
         std::string("exact mode caps ") + rule_name(rule) + " at n <= " + std::to_string(cap));
  std::uint32_t full = (1u << t.size()) - 1u;
  auto msets = round_match_sets(rule, ids_from_mask(full));
  std::erase_if(msets, [&](const match_set& ms) { return !match_set_contains(ms, u, v); });
  double w = 1.0 / static_cast<double>(msets.size());
  detail::exact_engine cont(rule, t);
  auto value = [&](const prob_tournament& x) {
    double acc = 0.0;
    for (const auto& ms : msets) {
      auto rm = detail::real_matches(ms, full);
      detail::for_each_outcome(x, rm, full, [&](std::uint32_t sub, double p) {
        if (p == 0.0) return;
        const auto& d = cont.dist(sub);
        acc += w * p * (d[static_cast<std::size_t>(u)] + d[static_cast<std::size_t>(v)]);
      });
    }
    return acc;
  };
  double base = value(t);
  double best = std::max(value(t.with_edge(u, v, 0.0)), value(t.with_edge(u, v, 1.0)));
  return best - base;
}

// ---- closed-form pieces ---------------------------------------------------

// (1/2+e)^i (1/2-e)^(n-i) - (1/2+e)^j (1/2-e)^(n-j)
inline double calcs_lhs(int n, int i, int j, double eps) {
  check_epsilon(eps);
  if (n < 1 || i < 0 || j < 0 || i > n || j > n)
    fail(errc::degenerate_inputs, "calcs needs n >= 1 and 0 <= i, j <= n");
  auto term = [&](int k) {
    return std::pow(0.5 + eps, static_cast<double>(k)) *
           std::pow(0.5 - eps, static_cast<double>(n - k));
  };
  return term(i) - term(j);
}

// bc/(b+g): manipulability bound from bad probability b, good-terminal
// probability g, and conditional bad gain c
inline double framework_bound(double b, double g, double c) {
  if (b < 0.0 || g < 0.0 || c < 0.0 || b + g <= 0.0)
    fail(errc::degenerate_inputs, "framework bound needs b, g, c >= 0 and b + g > 0");
  return b * c / (b + g);
}

// ---- the 5-team RSEB subcase instance --------------------------------------

// Five teams at n' = 8: two outsiders beat u (team 0) and lose to v (team 1)
// with the strict probabilities, one outsider does the reverse; remaining
// edges sit at 1/2+eps.
inline prob_tournament subcase_3b_tournament(double eps) {
  check_epsilon(eps);
  double hi = 0.5 + eps, lo = 0.5 - eps;
  prob_tournament t(5);
  t = t.with_edge(0, 1, hi);
  t = t.with_edge(2, 0, hi).with_edge(2, 1, lo);
  t = t.with_edge(3, 0, hi).with_edge(3, 1, lo);
  t = t.with_edge(4, 0, lo).with_edge(4, 1, hi);
  t = t.with_edge(2, 3, hi).with_edge(2, 4, hi).with_edge(3, 4, hi);
  return t;
}

// Probability that round one eliminates u or v without pairing them together,
// on the subcase instance; equals 27/70 - (2/35) eps^2.
inline double subcase_3b_probability(double eps) {
  prob_tournament t = subcase_3b_tournament(eps);
  std::uint32_t full = (1u << 5) - 1u;
  double acc = 0.0;
  for (const auto& ms : round_match_sets(rule_kind::rseb, ids_from_mask(full))) {
    if (match_set_contains(ms, 0, 1)) continue;
    double su = 1.0, sv = 1.0;
    for (auto [a, b] : ms.matches) {
      if (a < 0 || b < 0) continue;
      if (a == 0 || b == 0) su = t.prob(0, a == 0 ? b : a);
      if (a == 1 || b == 1) sv = t.prob(1, a == 1 ? b : a);
    }
    acc += ms.prob * (1.0 - su * sv);
  }
  return acc;
}

}  // namespace tourney
