#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tourney/errors.hpp"
#include "tourney/random.hpp"

namespace tourney {

// shared comparison tolerance for probabilities and epsilon classes
inline constexpr double prob_tol = 1e-12;

inline int pair_count(int n) { return n * (n - 1) / 2; }

// flat index of edge (i, j), i < j, in lexicographic order
inline int edge_index(int n, int i, int j) {
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

inline void check_epsilon(double eps) {
  if (!(eps >= 0.0 && eps <= 0.5))
    fail(errc::invalid_probability, "epsilon must lie in [0, 1/2]");
}

// Independent probabilistic tournament on teams 0..n-1. The upper triangle
// (i < j) is authoritative; p(j, i) is derived as the complement. Immutable
// after construction; with_edge returns a modified copy.
class prob_tournament {
 public:
  explicit prob_tournament(int n, double fill = 0.5)
      : n_(n), upper_(static_cast<std::size_t>(pair_count(check_n(n))), fill) {
    if (!(fill >= 0.0 && fill <= 1.0))
      fail(errc::invalid_probability, "fill probability outside [0, 1]");
  }

  prob_tournament(int n, std::vector<double> upper)
      : n_(check_n(n)), upper_(std::move(upper)) {
    if (upper_.size() != static_cast<std::size_t>(pair_count(n_)))
      fail(errc::invalid_probability, "upper-triangle size does not match n");
  }

  int size() const { return n_; }

  // probability that i beats j
  double prob(int i, int j) const {
    if (i == j) return 0.5;
    if (i < j) return upper_[edge_index(n_, i, j)];
    return 1.0 - upper_[edge_index(n_, j, i)];
  }

  const std::vector<double>& upper() const { return upper_; }

  prob_tournament with_edge(int i, int j, double p) const {
    if (i == j || i < 0 || j < 0 || i >= n_ || j >= n_)
      fail(errc::bad_coalition, "edge endpoints must be distinct teams");
    if (!(p >= 0.0 && p <= 1.0))
      fail(errc::invalid_probability, "edge probability outside [0, 1]");
    prob_tournament t(*this);
    if (i < j)
      t.upper_[edge_index(n_, i, j)] = p;
    else
      t.upper_[edge_index(n_, j, i)] = 1.0 - p;
    return t;
  }

 private:
  static int check_n(int n) {
    if (n < 2) fail(errc::too_few_teams, "a tournament needs at least 2 teams");
    return n;
  }

  int n_;
  std::vector<double> upper_;
};

// Deterministic tournament: bit per upper-triangle edge, set when i beats j.
class det_tournament {
 public:
  det_tournament(int n, std::vector<std::uint8_t> upper_bits)
      : n_(n), bits_(std::move(upper_bits)) {
    if (n < 2) fail(errc::too_few_teams, "a tournament needs at least 2 teams");
    if (bits_.size() != static_cast<std::size_t>(pair_count(n)))
      fail(errc::invalid_probability, "upper-triangle size does not match n");
  }

  int size() const { return n_; }

  bool beats(int i, int j) const {
    if (i < j) return bits_[edge_index(n_, i, j)] != 0;
    return bits_[edge_index(n_, j, i)] == 0;
  }

  prob_tournament as_prob() const {
    std::vector<double> up(bits_.size());
    for (std::size_t k = 0; k < bits_.size(); ++k) up[k] = bits_[k] ? 1.0 : 0.0;
    return prob_tournament(n_, std::move(up));
  }

 private:
  int n_;
  std::vector<std::uint8_t> bits_;
};

// range/complementarity validation; from_matrix applies the same checks to a
// full n x n matrix before accepting it
inline void validate(const prob_tournament& t) {
  for (double p : t.upper())
    if (!(p >= -prob_tol && p <= 1.0 + prob_tol))
      fail(errc::invalid_probability, "match probability outside [0, 1]");
}

inline prob_tournament from_matrix(const std::vector<std::vector<double>>& m) {
  int n = static_cast<int>(m.size());
  if (n < 2) fail(errc::too_few_teams, "a tournament needs at least 2 teams");
  for (const auto& row : m)
    if (static_cast<int>(row.size()) != n)
      fail(errc::invalid_probability, "matrix is not square");
  std::vector<double> up(static_cast<std::size_t>(pair_count(n)));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double pij = m[i][j], pji = m[j][i];
      if (!(pij >= -prob_tol && pij <= 1.0 + prob_tol) ||
          !(pji >= -prob_tol && pji <= 1.0 + prob_tol))
        fail(errc::invalid_probability, "match probability outside [0, 1]");
      if (std::abs(pij + pji - 1.0) > prob_tol)
        fail(errc::not_complementary, "p[i][j] + p[j][i] must equal 1");
      up[edge_index(n, i, j)] = pij;
    }
  return prob_tournament(n, std::move(up));
}

inline bool is_weakly_bounded(const prob_tournament& t, double eps) {
  check_epsilon(eps);
  for (double p : t.upper())
    if (p < 0.5 - eps - prob_tol || p > 0.5 + eps + prob_tol) return false;
  return true;
}

inline bool is_strictly_bounded(const prob_tournament& t, double eps) {
  check_epsilon(eps);
  for (double p : t.upper())
    if (std::abs(p - (0.5 - eps)) > prob_tol && std::abs(p - (0.5 + eps)) > prob_tol)
      return false;
  return true;
}

// ---- strict-class enumeration ------------------------------------------
// Code bit k set <=> edge k (lexicographic (i,j), i < j) has p_ij = 1/2+eps.

inline constexpr int max_enumeration_bits = 28;

inline prob_tournament strict_from_code(int n, std::uint64_t code, double eps) {
  check_epsilon(eps);
  int bits = pair_count(n);
  if (bits > max_enumeration_bits)
    fail(errc::too_large, "strict enumeration supports at most 28 edges");
  std::vector<double> up(static_cast<std::size_t>(bits));
  for (int k = 0; k < bits; ++k)
    up[static_cast<std::size_t>(k)] = ((code >> k) & 1u) ? 0.5 + eps : 0.5 - eps;
  return prob_tournament(n, std::move(up));
}

inline std::uint64_t strict_code_of(const prob_tournament& t, double eps) {
  check_epsilon(eps);
  if (!is_strictly_bounded(t, eps))
    fail(errc::not_strict, "tournament is not strictly epsilon-bounded");
  std::uint64_t code = 0;
  const auto& up = t.upper();
  for (std::size_t k = 0; k < up.size(); ++k)
    if (up[k] > 0.5) code |= (std::uint64_t{1} << k);
  return code;
}

// indexable view of the full strict class S^eps at size n
class strict_enumeration {
 public:
  strict_enumeration(int n, double eps) : n_(n), eps_(eps) {
    check_epsilon(eps);
    if (pair_count(n) > max_enumeration_bits)
      fail(errc::too_large, "strict enumeration supports at most 28 edges");
  }

  std::uint64_t size() const { return std::uint64_t{1} << pair_count(n_); }
  prob_tournament at(std::uint64_t code) const { return strict_from_code(n_, code, eps_); }
  int teams() const { return n_; }
  double epsilon() const { return eps_; }

 private:
  int n_;
  double eps_;
};

inline strict_enumeration enumerate_strict(int n, double eps) {
  return strict_enumeration(n, eps);
}

// ---- sampling ------------------------------------------------------------

inline prob_tournament sample_strict(int n, double eps, rng& r) {
  check_epsilon(eps);
  std::vector<double> up(static_cast<std::size_t>(pair_count(n)));
  for (auto& p : up) p = r.bernoulli(0.5) ? 0.5 + eps : 0.5 - eps;
  return prob_tournament(n, std::move(up));
}

inline prob_tournament sample_weak(int n, double eps, rng& r) {
  check_epsilon(eps);
  std::vector<double> up(static_cast<std::size_t>(pair_count(n)));
  for (auto& p : up) p = 0.5 - eps + 2.0 * eps * r.next_double();
  return prob_tournament(n, std::move(up));
}

inline det_tournament sample_outcome(const prob_tournament& t, rng& r) {
  int n = t.size();
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(pair_count(n)));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      bits[edge_index(n, i, j)] = r.bernoulli(t.prob(i, j)) ? 1 : 0;
  return det_tournament(n, std::move(bits));
}

// ---- coalitions and adjacency --------------------------------------------

using coalition = std::vector<int>;

inline void check_pair_coalition(const prob_tournament& t, const coalition& s) {
  if (s.size() != 2) fail(errc::bad_coalition, "coalition must have exactly 2 teams");
  for (int x : s)
    if (x < 0 || x >= t.size()) fail(errc::bad_coalition, "coalition member out of range");
  if (s[0] == s[1]) fail(errc::bad_coalition, "coalition members must be distinct");
}

// the two S-adjacent extreme tournaments: p_uv set to 0, then to 1
inline std::pair<prob_tournament, prob_tournament> adjacent_extremes(
    const prob_tournament& t, const coalition& s) {
  check_pair_coalition(t, s);
  return {t.with_edge(s[0], s[1], 0.0), t.with_edge(s[0], s[1], 1.0)};
}

// almost-sure convention: a Condorcet winner beats every other team with
// probability 1 (within tolerance)
inline std::optional<int> condorcet_winner(const prob_tournament& t) {
  for (int i = 0; i < t.size(); ++i) {
    bool all = true;
    for (int j = 0; j < t.size() && all; ++j)
      if (j != i && t.prob(i, j) < 1.0 - prob_tol) all = false;
    if (all) return i;
  }
  return std::nullopt;
}

// One strict extreme point of a weakly eps-bounded tournament: each edge is
// independently set to 1/2+eps with probability q_ij = (p_ij - (1/2-eps)) / 2eps,
// so the mixture of samples reproduces T edge-by-edge.
inline prob_tournament strict_decomposition_sample(const prob_tournament& t,
                                                   double eps, rng& r) {
  check_epsilon(eps);
  if (eps == 0.0) {
    for (double p : t.upper())
      if (std::abs(p - 0.5) > prob_tol)
        fail(errc::zero_epsilon, "epsilon is 0 but the tournament is not all-1/2");
    return t;
  }
  if (!is_weakly_bounded(t, eps))
    fail(errc::invalid_probability, "tournament is not weakly epsilon-bounded");
  int n = t.size();
  std::vector<double> up(t.upper().size());
  for (std::size_t k = 0; k < up.size(); ++k) {
    double q = (t.upper()[k] - (0.5 - eps)) / (2.0 * eps);
    q = std::clamp(q, 0.0, 1.0);
    up[k] = r.bernoulli(q) ? 0.5 + eps : 0.5 - eps;
  }
  return prob_tournament(n, std::move(up));
}

// (l_u, l_v): counts of outside teams that beat one coalition member with
// probability 1/2+eps and the other with probability 1/2-eps
inline std::pair<int, int> l_values(const prob_tournament& t, double eps, int u, int v) {
  check_pair_coalition(t, coalition{u, v});
  check_epsilon(eps);
  if (!is_strictly_bounded(t, eps))
    fail(errc::not_strict, "l-values require a strictly epsilon-bounded tournament");
  if (eps == 0.0) return {0, 0};
  int lu = 0, lv = 0;
  for (int w = 0; w < t.size(); ++w) {
    if (w == u || w == v) continue;
    bool beats_u = t.prob(w, u) > 0.5, beats_v = t.prob(w, v) > 0.5;
    if (beats_u && !beats_v) ++lu;
    if (beats_v && !beats_u) ++lv;
  }
  return {lu, lv};
}

// ---- generators ------------------------------------------------------------

inline prob_tournament three_cycle(double eps) {
  check_epsilon(eps);
  prob_tournament t(3);
  return t.with_edge(0, 1, 0.5 + eps).with_edge(1, 2, 0.5 + eps).with_edge(2, 0, 0.5 + eps);
}

// rotational orientation: i beats i+1, ..., i+floor((n-1)/2) (mod n); for even
// n the diametral pair is oriented from the lower id
inline prob_tournament det_cycle(int n) {
  if (n < 3) fail(errc::too_few_teams, "a cyclic tournament needs at least 3 teams");
  prob_tournament t(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      int d = (j - i) % n;
      bool i_beats_j = (2 * d < n) || (2 * d == n);
      t = t.with_edge(i, j, i_beats_j ? 1.0 : 0.0);
    }
  return t;
}

// i beats j deterministically whenever i < j
inline prob_tournament transitive(int n) {
  if (n < 2) fail(errc::too_few_teams, "a tournament needs at least 2 teams");
  return prob_tournament(n, 1.0);
}

inline prob_tournament uniform_half(int n) { return prob_tournament(n, 0.5); }

}  // namespace tourney
