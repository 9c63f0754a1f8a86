#pragma once

#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "tourney/errors.hpp"
#include "tourney/rules.hpp"
#include "tourney/tournament.hpp"

namespace tourney {

// tight manipulability curve for RDM/RSEB: eps/3 + 2eps^2/3
inline double lower_bound_formula(double eps) {
  check_epsilon(eps);
  return eps / 3.0 + 2.0 * eps * eps / 3.0;
}

enum class manip_direction { none, down, up };

inline const char* direction_name(manip_direction d) {
  switch (d) {
    case manip_direction::none: return "none";
    case manip_direction::down: return "down";
    case manip_direction::up: return "up";
  }
  return "unknown";
}

struct manipulation_report {
  rule_kind rule;
  prob_tournament tournament;
  coalition pair;
  double baseline = 0.0;
  double best_manipulated = 0.0;
  double gain = 0.0;  // always >= 0: staying put is allowed
  manip_direction best_direction = manip_direction::none;
};

// alpha restricted to the pair coalition {u, v}: the baseline win probability
// against the best of the two adjacent extremes (p_uv -> 0 and p_uv -> 1)
inline manipulation_report alpha_pair(rule_kind rule, const prob_tournament& t, int u, int v) {
  coalition s{u, v};
  check_pair_coalition(t, s);
  auto [down, up] = adjacent_extremes(t, s);
  auto value = [&](const prob_tournament& x) {
    auto wd = exact_winner_distribution(rule, x);
    return wd.probs[static_cast<std::size_t>(u)] + wd.probs[static_cast<std::size_t>(v)];
  };
  manipulation_report rep{rule, t, s, value(t), 0.0, 0.0, manip_direction::none};
  rep.best_manipulated = rep.baseline;
  double vd = value(down), vu = value(up);
  if (vd > rep.best_manipulated) {
    rep.best_manipulated = vd;
    rep.best_direction = manip_direction::down;
  }
  if (vu > rep.best_manipulated) {
    rep.best_manipulated = vu;
    rep.best_direction = manip_direction::up;
  }
  rep.gain = rep.best_manipulated - rep.baseline;
  return rep;
}

struct worst_case_result {
  rule_kind rule;
  int n = 0;
  double epsilon = 0.0;
  std::string mode;  // "exhaustive-exact"
  double max_gain = 0.0;
  std::uint64_t argmax_code = 0;
  std::pair<int, int> argmax_pair{0, 0};
  std::uint64_t instances_checked = 0;
};

inline void check_worst_case_size(rule_kind rule, int n) {
  if (rule == rule_kind::rseb) {
    if (n > 5) fail(errc::too_large, "exhaustive rseb search caps at n <= 5");
  } else if (pair_count(n) > 15) {
    fail(errc::too_large, "exhaustive search caps at 15 edges (n <= 6)");
  }
  if (n < 2) fail(errc::too_few_teams, "search needs at least 2 teams");
}

namespace detail {

struct search_best {
  double gain = -1.0;
  std::uint64_t code = 0;
  int u = 0, v = 0;
};

// scan codes [lo, hi); codes ascending, pairs lexicographic, strict improvement
// only, so the lowest (code, pair) witness wins ties
inline search_best scan_codes(rule_kind rule, int n, double eps, std::uint64_t lo,
                              std::uint64_t hi) {
  search_best best;
  for (std::uint64_t code = lo; code < hi; ++code) {
    prob_tournament t = strict_from_code(n, code, eps);
    exact_engine base_eng(rule, t);
    std::uint32_t full = (1u << n) - 1u;
    const auto base = base_eng.dist(full);  // copy: extreme evals reuse masks
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v) {
        double baseline = base[static_cast<std::size_t>(u)] + base[static_cast<std::size_t>(v)];
        double top = baseline;
        for (double e : {0.0, 1.0}) {
          prob_tournament tx = t.with_edge(u, v, e);
          exact_engine eng(rule, tx);
          const auto& d = eng.dist(full);
          double s = d[static_cast<std::size_t>(u)] + d[static_cast<std::size_t>(v)];
          if (s > top) top = s;
        }
        double gain = top - baseline;
        if (gain > best.gain) best = {gain, code, u, v};
      }
  }
  return best;
}

}  // namespace detail

// Exhaustive worst case over the strict class S^eps and all pair coalitions.
// Work is split into fixed chunks merged in order, so the reported argmax is
// the lowest enumeration index for any thread count.
inline worst_case_result alpha_worst_case(rule_kind rule, int n, double eps, int threads = 1) {
  check_worst_case_size(rule, n);
  check_epsilon(eps);
  std::uint64_t codes = std::uint64_t{1} << pair_count(n);
  worst_case_result res;
  res.rule = rule;
  res.n = n;
  res.epsilon = eps;
  res.mode = "exhaustive-exact";
  res.instances_checked = codes * static_cast<std::uint64_t>(pair_count(n));

  if (threads < 1) threads = 1;
  std::uint64_t chunks = std::min<std::uint64_t>(codes, 64);
  std::vector<detail::search_best> part(static_cast<std::size_t>(chunks));
  std::atomic<std::uint64_t> cursor{0};
  auto worker = [&]() {
    for (;;) {
      std::uint64_t c = cursor.fetch_add(1);
      if (c >= chunks) return;
      std::uint64_t lo = codes * c / chunks, hi = codes * (c + 1) / chunks;
      part[static_cast<std::size_t>(c)] = detail::scan_codes(rule, n, eps, lo, hi);
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  detail::search_best best;
  for (const auto& b : part)
    if (b.gain > best.gain) best = b;
  res.max_gain = best.gain;
  res.argmax_code = best.code;
  res.argmax_pair = {best.u, best.v};
  return res;
}

// Designated cyclic throws on the 3-cycle: each pair throws its internal match
// toward the cycle direction. Their gains sum to 2eps(1/2+eps) and split
// equally by symmetry.
struct gain_sum_result {
  std::array<double, 3> gains{};
  double sum = 0.0;
  double expected_sum = 0.0;
  double formula = 0.0;
};

inline gain_sum_result coalition_gain_sum_check(rule_kind rule, double eps) {
  check_epsilon(eps);
  prob_tournament t = three_cycle(eps);
  const std::array<std::pair<int, int>, 3> throws{{{0, 1}, {1, 2}, {2, 0}}};
  gain_sum_result res;
  auto value = [&](const prob_tournament& x, int u, int v) {
    auto wd = exact_winner_distribution(rule, x);
    return wd.probs[static_cast<std::size_t>(u)] + wd.probs[static_cast<std::size_t>(v)];
  };
  for (std::size_t k = 0; k < throws.size(); ++k) {
    auto [u, v] = throws[k];
    double base = value(t, u, v);
    double thrown = value(t.with_edge(u, v, 0.0), u, v);
    res.gains[k] = thrown - base;
    res.sum += res.gains[k];
  }
  res.expected_sum = 2.0 * eps * (0.5 + eps);
  res.formula = lower_bound_formula(eps);
  return res;
}

struct convexity_result {
  rule_kind rule;
  int n = 0;
  double epsilon = 0.0;
  int samples = 0;
  double strict_max = 0.0;
  double max_weak_gain = 0.0;
};

inline constexpr double convexity_tol = 1e-9;

// Extreme-point check: every sampled weakly bounded tournament's pair gain
// must stay within the exhaustive strict-class maximum. Throws ViolationFound
// with the counterexample if the sampled gain exceeds it.
inline convexity_result convexity_check(rule_kind rule, int n, double eps, int samples,
                                        std::uint64_t seed, int threads = 1) {
  convexity_result res;
  res.rule = rule;
  res.n = n;
  res.epsilon = eps;
  res.samples = samples;
  res.strict_max = alpha_worst_case(rule, n, eps, threads).max_gain;
  rng r(seed);
  for (int s = 0; s < samples; ++s) {
    prob_tournament t = sample_weak(n, eps, r);
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v) {
        double gain = alpha_pair(rule, t, u, v).gain;
        if (gain > res.max_weak_gain) res.max_weak_gain = gain;
        if (gain > res.strict_max + convexity_tol) {
          std::ostringstream os;
          os << "weak-class gain " << gain << " exceeds strict max " << res.strict_max
             << " (rule " << rule_name(rule) << ", n " << n << ", eps " << eps << ", sample "
             << s << ", pair " << u << "-" << v << ", upper triangle:";
          for (double p : t.upper()) os << " " << p;
          os << ")";
          fail(errc::violation_found, os.str());
        }
      }
  }
  return res;
}

struct sweep_row {
  rule_kind rule;
  int n = 0;
  double epsilon = 0.0;
  std::string mode;
  double max_gain = 0.0;
  double formula = 0.0;
  double slack = 0.0;  // formula - max_gain
  std::uint64_t argmax_code = 0;
  std::pair<int, int> argmax_pair{0, 0};
  std::uint64_t instances = 0;
  bool exploratory = false;  // rkoth rows: no proven curve to compare against
};

inline std::vector<sweep_row> epsilon_sweep(rule_kind rule, int n,
                                            const std::vector<double>& grid, int threads = 1) {
  std::vector<sweep_row> rows;
  rows.reserve(grid.size());
  for (double eps : grid) {
    auto wc = alpha_worst_case(rule, n, eps, threads);
    sweep_row row;
    row.rule = rule;
    row.n = n;
    row.epsilon = eps;
    row.mode = wc.mode;
    row.max_gain = wc.max_gain;
    row.formula = lower_bound_formula(eps);
    row.slack = row.formula - row.max_gain;
    row.argmax_code = wc.argmax_code;
    row.argmax_pair = wc.argmax_pair;
    row.instances = wc.instances_checked;
    row.exploratory = (rule == rule_kind::rkoth);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace tourney
