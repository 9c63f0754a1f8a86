#pragma once

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tourney/errors.hpp"
#include "tourney/random.hpp"
#include "tourney/tournament.hpp"

namespace tourney {

enum class rule_kind { rdm, rseb, rkoth };

inline const char* rule_name(rule_kind r) {
  switch (r) {
    case rule_kind::rdm: return "rdm";
    case rule_kind::rseb: return "rseb";
    case rule_kind::rkoth: return "rkoth";
  }
  return "unknown";
}

inline rule_kind rule_from_name(const std::string& s) {
  if (s == "rdm") return rule_kind::rdm;
  if (s == "rseb") return rule_kind::rseb;
  if (s == "rkoth") return rule_kind::rkoth;
  fail(errc::degenerate_inputs, "unknown rule: " + s);
}

// One candidate round draw: the matches to play (team ids; RSEB dummy slots
// are negative ids) with the probability the rule draws this set.
struct match_set {
  std::vector<std::pair<int, int>> matches;
  double prob = 0.0;
  bool is_matching = false;
};

inline bool match_set_contains(const match_set& ms, int u, int v) {
  for (auto [a, b] : ms.matches)
    if ((a == u && b == v) || (a == v && b == u)) return true;
  return false;
}

inline int pow2_ceil(int k) {
  int p = 1;
  while (p < k) p *= 2;
  return p;
}

inline std::uint64_t double_factorial_odd(int m) {
  std::uint64_t r = 1;
  for (int x = m; x > 1; x -= 2) r *= static_cast<std::uint64_t>(x);
  return r;
}

namespace detail {

inline void matchings_rec(std::vector<int>& slots,
                          std::vector<std::pair<int, int>>& acc,
                          std::vector<std::vector<std::pair<int, int>>>& out) {
  if (slots.empty()) {
    out.push_back(acc);
    return;
  }
  int a = slots.front();
  std::vector<int> rest(slots.begin() + 1, slots.end());
  for (std::size_t i = 0; i < rest.size(); ++i) {
    int b = rest[i];
    std::vector<int> next;
    next.reserve(rest.size() - 1);
    for (std::size_t k = 0; k < rest.size(); ++k)
      if (k != i) next.push_back(rest[k]);
    acc.emplace_back(std::min(a, b), std::max(a, b));
    matchings_rec(next, acc, out);
    acc.pop_back();
  }
}

inline std::vector<std::vector<std::pair<int, int>>> perfect_matchings(std::vector<int> slots) {
  std::vector<std::vector<std::pair<int, int>>> out;
  std::vector<std::pair<int, int>> acc;
  matchings_rec(slots, acc, out);
  return out;
}

}  // namespace detail

// All candidate round draws for the rule on the given alive teams.
inline std::vector<match_set> round_match_sets(rule_kind rule, const std::vector<int>& alive) {
  int k = static_cast<int>(alive.size());
  if (k < 2) fail(errc::too_few_teams, "a round needs at least 2 alive teams");
  std::vector<match_set> out;
  switch (rule) {
    case rule_kind::rdm: {
      double p = 1.0 / static_cast<double>(pair_count(k));
      for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
          out.push_back({{{std::min(alive[i], alive[j]), std::max(alive[i], alive[j])}}, p, true});
      break;
    }
    case rule_kind::rseb: {
      int np = pow2_ceil(k);
      std::vector<int> slots(alive.begin(), alive.end());
      std::sort(slots.begin(), slots.end());
      for (int d = 0; d < np - k; ++d) slots.push_back(-1 - d);
      auto ms = detail::perfect_matchings(std::move(slots));
      double p = 1.0 / static_cast<double>(double_factorial_odd(np - 1));
      for (auto& m : ms) out.push_back({std::move(m), p, true});
      break;
    }
    case rule_kind::rkoth: {
      double p = 1.0 / static_cast<double>(k);
      for (int piv : alive) {
        match_set ms;
        for (int w : alive)
          if (w != piv) ms.matches.emplace_back(std::min(piv, w), std::max(piv, w));
        ms.prob = p;
        ms.is_matching = (k == 2);
        out.push_back(std::move(ms));
      }
      break;
    }
  }
  return out;
}

namespace detail {

// matches between two real alive teams; dummy opponents never eliminate a
// real team, and dummy-vs-dummy outcomes are unobservable
inline std::vector<std::pair<int, int>> real_matches(const match_set& ms, std::uint32_t alive) {
  std::vector<std::pair<int, int>> out;
  for (auto [a, b] : ms.matches)
    if (a >= 0 && b >= 0 && (alive >> a & 1u) && (alive >> b & 1u))
      out.push_back({a, b});
  return out;
}

// enumerate outcomes of independent matches, pruning zero-probability branches
template <typename Fn>
void for_each_outcome(const prob_tournament& t,
                      const std::vector<std::pair<int, int>>& matches,
                      std::uint32_t alive, Fn&& fn) {
  struct frame {
    std::size_t idx;
    double p;
    std::uint32_t mask;
  };
  std::vector<frame> stack{{0, 1.0, alive}};
  while (!stack.empty()) {
    frame f = stack.back();
    stack.pop_back();
    if (f.idx == matches.size()) {
      fn(f.mask, f.p);
      continue;
    }
    auto [a, b] = matches[f.idx];
    double pa = t.prob(a, b);
    if (pa != 0.0) stack.push_back({f.idx + 1, f.p * pa, f.mask & ~(1u << b)});
    if (pa != 1.0) stack.push_back({f.idx + 1, f.p * (1.0 - pa), f.mask & ~(1u << a)});
  }
}

}  // namespace detail

// Distribution over alive-set outcomes of playing one draw: every loser of a
// real match is eliminated. Exactly 2^|real matches| entries, zero-probability
// branches included.
inline std::vector<std::pair<std::uint32_t, double>> apply_round(
    const prob_tournament& t, std::uint32_t alive, const match_set& ms) {
  auto rm = detail::real_matches(ms, alive);
  std::vector<std::pair<std::uint32_t, double>> out;
  out.reserve(std::size_t{1} << rm.size());
  std::uint64_t total = std::uint64_t{1} << rm.size();
  for (std::uint64_t bits = 0; bits < total; ++bits) {
    double p = 1.0;
    std::uint32_t mask = alive;
    for (std::size_t i = 0; i < rm.size(); ++i) {
      auto [a, b] = rm[i];
      double pa = t.prob(a, b);
      if ((bits >> i) & 1u) {
        p *= pa;
        mask &= ~(1u << b);
      } else {
        p *= 1.0 - pa;
        mask &= ~(1u << a);
      }
    }
    out.push_back({mask, p});
  }
  return out;
}

inline std::vector<int> ids_from_mask(std::uint32_t mask) {
  std::vector<int> out;
  for (int i = 0; i < 32; ++i)
    if (mask >> i & 1u) out.push_back(i);
  return out;
}

struct winner_distribution {
  rule_kind rule;
  int n = 0;
  std::vector<double> probs;
  std::string mode;  // "exact" or "mc"
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> seed;
  std::vector<double> stderrs;  // per team, mc mode only
};

inline constexpr int exact_cap_matching_free = 12;  // rdm, rkoth
inline constexpr int exact_cap_rseb = 8;

namespace detail {

class exact_engine {
 public:
  exact_engine(rule_kind rule, const prob_tournament& t) : rule_(rule), t_(t) {}

  const std::vector<double>& dist(std::uint32_t mask) {
    auto it = memo_.find(mask);
    if (it != memo_.end()) return it->second;
    int n = t_.size();
    std::vector<double> out(static_cast<std::size_t>(n), 0.0);
    if (std::popcount(mask) == 1) {
      out[static_cast<std::size_t>(std::countr_zero(mask))] = 1.0;
    } else {
      auto msets = round_match_sets(rule_, ids_from_mask(mask));
      for (const auto& ms : msets) {
        auto rm = real_matches(ms, mask);
        for_each_outcome(t_, rm, mask, [&](std::uint32_t sub, double p) {
          if (p == 0.0) return;
          const auto& d = dist(sub);
          double w = ms.prob * p;
          for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] += w * d[static_cast<std::size_t>(i)];
        });
      }
    }
    return memo_.emplace(mask, std::move(out)).first->second;
  }

 private:
  rule_kind rule_;
  prob_tournament t_;  // owned: callers may pass temporaries
  std::unordered_map<std::uint32_t, std::vector<double>> memo_;
};

}  // namespace detail

// winner distribution over a subset of alive teams (indices into t)
inline std::vector<double> exact_winner_probs(rule_kind rule, const prob_tournament& t,
                                              std::uint32_t alive) {
  int cap = rule == rule_kind::rseb ? exact_cap_rseb : exact_cap_matching_free;
  if (t.size() > cap)
    fail(errc::exact_mode_too_large,
         std::string("exact mode caps ") + rule_name(rule) + " at n <= " + std::to_string(cap));
  detail::exact_engine eng(rule, t);
  return eng.dist(alive);
}

inline winner_distribution exact_winner_distribution(rule_kind rule, const prob_tournament& t) {
  winner_distribution wd;
  wd.rule = rule;
  wd.n = t.size();
  wd.mode = "exact";
  std::uint32_t full = (t.size() == 32) ? ~0u : ((1u << t.size()) - 1u);
  wd.probs = exact_winner_probs(rule, t, full);
  return wd;
}

// ---- Monte Carlo -----------------------------------------------------------

namespace detail {

inline int simulate_trial(rule_kind rule, const prob_tournament& t, rng& r) {
  std::vector<int> alive(static_cast<std::size_t>(t.size()));
  for (int i = 0; i < t.size(); ++i) alive[static_cast<std::size_t>(i)] = i;
  std::vector<int> next;
  while (alive.size() > 1) {
    switch (rule) {
      case rule_kind::rdm: {
        std::uint32_t k = static_cast<std::uint32_t>(alive.size());
        std::uint32_t i = r.next_below(k);
        std::uint32_t j = r.next_below(k - 1);
        if (j >= i) ++j;
        std::uint32_t loser = r.bernoulli(t.prob(alive[i], alive[j])) ? j : i;
        alive[loser] = alive.back();
        alive.pop_back();
        break;
      }
      case rule_kind::rseb: {
        int k = static_cast<int>(alive.size());
        int np = pow2_ceil(k);
        std::vector<int> slots(alive.begin(), alive.end());
        slots.resize(static_cast<std::size_t>(np), -1);
        for (int i = np - 1; i > 0; --i) {
          int j = static_cast<int>(r.next_below(static_cast<std::uint32_t>(i + 1)));
          std::swap(slots[static_cast<std::size_t>(i)], slots[static_cast<std::size_t>(j)]);
        }
        next.clear();
        for (int m = 0; m < np; m += 2) {
          int a = slots[static_cast<std::size_t>(m)], b = slots[static_cast<std::size_t>(m + 1)];
          if (a >= 0 && b >= 0)
            next.push_back(r.bernoulli(t.prob(a, b)) ? a : b);
          else if (a >= 0)
            next.push_back(a);
          else if (b >= 0)
            next.push_back(b);
        }
        alive = next;
        break;
      }
      case rule_kind::rkoth: {
        std::uint32_t k = static_cast<std::uint32_t>(alive.size());
        std::uint32_t pi = r.next_below(k);
        int piv = alive[pi];
        next.clear();
        for (std::uint32_t x = 0; x < k; ++x) {
          if (x == pi) continue;
          if (r.bernoulli(t.prob(alive[x], piv))) next.push_back(alive[x]);
        }
        if (next.empty()) next.push_back(piv);
        alive = next;
        break;
      }
    }
  }
  return alive[0];
}

}  // namespace detail

inline constexpr std::uint64_t mc_block_trials = 65536;

// Seeded Monte Carlo estimate. Trials are split into fixed-size blocks, each
// with its own derived seed; block counts are combined in block order, so the
// result is identical for any thread count.
inline winner_distribution mc_winner_distribution(rule_kind rule, const prob_tournament& t,
                                                  std::uint64_t trials, std::uint64_t seed,
                                                  int threads = 1) {
  if (trials == 0) fail(errc::degenerate_inputs, "mc mode needs at least one trial");
  if (threads < 1) threads = 1;
  int n = t.size();
  std::uint64_t blocks = (trials + mc_block_trials - 1) / mc_block_trials;
  std::vector<std::vector<std::uint64_t>> counts(
      static_cast<std::size_t>(blocks), std::vector<std::uint64_t>(static_cast<std::size_t>(n), 0));

  std::atomic<std::uint64_t> cursor{0};
  auto worker = [&]() {
    for (;;) {
      std::uint64_t b = cursor.fetch_add(1);
      if (b >= blocks) return;
      std::uint64_t lo = b * mc_block_trials;
      std::uint64_t hi = std::min(trials, lo + mc_block_trials);
      rng r(block_seed(seed, b));
      auto& local = counts[static_cast<std::size_t>(b)];
      for (std::uint64_t k = lo; k < hi; ++k)
        ++local[static_cast<std::size_t>(detail::simulate_trial(rule, t, r))];
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<std::uint64_t> total(static_cast<std::size_t>(n), 0);
  for (const auto& blk : counts)
    for (int i = 0; i < n; ++i) total[static_cast<std::size_t>(i)] += blk[static_cast<std::size_t>(i)];

  winner_distribution wd;
  wd.rule = rule;
  wd.n = n;
  wd.mode = "mc";
  wd.trials = trials;
  wd.seed = seed;
  wd.probs.resize(static_cast<std::size_t>(n));
  wd.stderrs.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double p = static_cast<double>(total[static_cast<std::size_t>(i)]) / static_cast<double>(trials);
    wd.probs[static_cast<std::size_t>(i)] = p;
    wd.stderrs[static_cast<std::size_t>(i)] =
        std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
  }
  return wd;
}

struct coalition_result {
  double value = 0.0;
  std::optional<double> stderr_value;  // mc mode only
};

inline void check_coalition(const prob_tournament& t, const coalition& s) {
  if (s.empty()) fail(errc::bad_coalition, "coalition must be nonempty");
  for (int x : s)
    if (x < 0 || x >= t.size()) fail(errc::bad_coalition, "coalition member out of range");
  coalition sorted = s;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    fail(errc::bad_coalition, "coalition members must be distinct");
}

inline coalition_result coalition_win_prob(rule_kind rule, const prob_tournament& t,
                                           const coalition& s, const std::string& mode,
                                           std::uint64_t trials = 0, std::uint64_t seed = 0,
                                           int threads = 1) {
  check_coalition(t, s);
  coalition_result res;
  if (mode == "exact") {
    auto wd = exact_winner_distribution(rule, t);
    for (int x : s) res.value += wd.probs[static_cast<std::size_t>(x)];
    return res;
  }
  if (mode == "mc") {
    auto wd = mc_winner_distribution(rule, t, trials, seed, threads);
    for (int x : s) res.value += wd.probs[static_cast<std::size_t>(x)];
    res.stderr_value = std::sqrt(res.value * (1.0 - res.value) /
                                 static_cast<double>(trials));
    return res;
  }
  fail(errc::degenerate_inputs, "mode must be exact or mc");
}

// permuted tournament: team sigma[i] takes the role of team i
inline prob_tournament permute(const prob_tournament& t, const std::vector<int>& sigma) {
  int n = t.size();
  if (static_cast<int>(sigma.size()) != n)
    fail(errc::degenerate_inputs, "permutation size does not match n");
  prob_tournament out(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      out = out.with_edge(sigma[static_cast<std::size_t>(i)], sigma[static_cast<std::size_t>(j)],
                          t.prob(i, j));
  return out;
}

}  // namespace tourney
