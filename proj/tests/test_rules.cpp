#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "oracles.hpp"
#include "tourney/rules.hpp"

using namespace tourney;
using Catch::Matchers::WithinAbs;

namespace {

template <typename Fn>
std::optional<errc> thrown(Fn&& fn) {
  try {
    fn();
  } catch (const tourney_error& e) {
    return e.code();
  }
  return std::nullopt;
}

double mass(const std::vector<match_set>& msets) {
  double s = 0.0;
  for (const auto& ms : msets) s += ms.prob;
  return s;
}

}  // namespace

TEST_CASE("death-match rounds draw one uniform pair", "[rules]") {
  auto msets = round_match_sets(rule_kind::rdm, {0, 1, 2, 3});
  REQUIRE(msets.size() == 6);
  std::set<std::pair<int, int>> seen;
  for (const auto& ms : msets) {
    CHECK(ms.prob == 1.0 / 6.0);
    CHECK(ms.is_matching);
    REQUIRE(ms.matches.size() == 1);
    seen.insert(ms.matches[0]);
  }
  CHECK(seen.size() == 6);
  CHECK_THAT(mass(msets), WithinAbs(1.0, 1e-12));
  CHECK(thrown([] { round_match_sets(rule_kind::rdm, {7}); }) == errc::too_few_teams);
}

TEST_CASE("bracket rounds pad to a power of two and draw uniform matchings", "[rules]") {
  auto four = round_match_sets(rule_kind::rseb, {0, 1, 2, 3});
  REQUIRE(four.size() == 3);
  for (const auto& ms : four) {
    CHECK(ms.prob == 1.0 / 3.0);
    CHECK(ms.is_matching);
    CHECK(ms.matches.size() == 2);
    std::set<int> covered;
    for (auto [a, b] : ms.matches) {
      covered.insert(a);
      covered.insert(b);
    }
    CHECK(covered == std::set<int>{0, 1, 2, 3});
  }

  auto three = round_match_sets(rule_kind::rseb, {0, 1, 2});
  REQUIRE(three.size() == 3);
  for (const auto& ms : three) {
    int dummies = 0;
    for (auto [a, b] : ms.matches) dummies += (a < 0) + (b < 0);
    CHECK(dummies == 1);  // one pad slot, visible in the draw
    CHECK(ms.prob == 1.0 / 3.0);
  }

  auto five = round_match_sets(rule_kind::rseb, {0, 1, 2, 3, 4});
  CHECK(five.size() == 105);  // (8-1)!! matchings of the padded field
  for (const auto& ms : five) CHECK(ms.prob == 1.0 / 105.0);
  CHECK_THAT(mass(five), WithinAbs(1.0, 1e-12));
}

TEST_CASE("king-of-the-hill rounds pit a uniform pivot against the field", "[rules]") {
  auto msets = round_match_sets(rule_kind::rkoth, {0, 1, 2, 3});
  REQUIRE(msets.size() == 4);
  for (const auto& ms : msets) {
    CHECK(ms.prob == 0.25);
    CHECK_FALSE(ms.is_matching);
    REQUIRE(ms.matches.size() == 3);
    std::map<int, int> degree;
    for (auto [a, b] : ms.matches) {
      ++degree[a];
      ++degree[b];
    }
    int pivots = 0;
    for (auto [team, d] : degree) {
      (void)team;
      if (d == 3) ++pivots;
    }
    CHECK(pivots == 1);
  }
  // two teams leave a single match, which is a matching
  auto pair = round_match_sets(rule_kind::rkoth, {5, 9});
  REQUIRE(pair.size() == 2);
  CHECK(pair[0].is_matching);
}

TEST_CASE("applying a round enumerates every outcome, zero-probability included",
          "[rules]") {
  auto t = oracle::t4();
  std::uint32_t full = 0b1111;

  match_set single{{{0, 1}}, 1.0 / 6.0, true};
  auto out = apply_round(t, full, single);
  REQUIRE(out.size() == 2);
  std::map<std::uint32_t, double> got(out.begin(), out.end());
  CHECK_THAT(got[0b1101], WithinAbs(0.62, 1e-15));  // 1 eliminated
  CHECK_THAT(got[0b1110], WithinAbs(0.38, 1e-15));  // 0 eliminated

  match_set pairs{{{0, 1}, {2, 3}}, 1.0 / 3.0, true};
  auto out2 = apply_round(transitive(4), full, pairs);
  REQUIRE(out2.size() == 4);  // all four branches, three of them impossible
  double total = 0.0;
  for (auto [mask, p] : out2) {
    total += p;
    if (mask == 0b0101) CHECK(p == 1.0);
  }
  CHECK_THAT(total, WithinAbs(1.0, 1e-12));

  // a dummy opponent never eliminates the real team
  match_set padded{{{2, -1}, {0, 1}}, 1.0 / 3.0, true};
  auto out3 = apply_round(t, 0b0111, padded);
  REQUIRE(out3.size() == 2);
  for (auto [mask, p] : out3) {
    (void)p;
    CHECK((mask >> 2 & 1u) == 1u);
  }
}

TEST_CASE("exact winner distributions match the frozen references", "[rules]") {
  struct row {
    rule_kind rule;
    const double* expected;
    int n;
  };
  auto t4 = oracle::t4();
  auto t5 = oracle::t5();
  const row rows4[] = {{rule_kind::rdm, oracle::t4_rdm.data(), 4},
                       {rule_kind::rseb, oracle::t4_rseb.data(), 4},
                       {rule_kind::rkoth, oracle::t4_rkoth.data(), 4}};
  for (const auto& r : rows4) {
    auto wd = exact_winner_distribution(r.rule, t4);
    CHECK(wd.mode == "exact");
    CHECK(wd.n == 4);
    double sum = 0.0;
    for (int i = 0; i < r.n; ++i) {
      CHECK_THAT(wd.probs[i], WithinAbs(r.expected[i], 1e-12));
      sum += wd.probs[i];
    }
    CHECK_THAT(sum, WithinAbs(1.0, 1e-12));
  }
  const row rows5[] = {{rule_kind::rdm, oracle::t5_rdm.data(), 5},
                       {rule_kind::rseb, oracle::t5_rseb.data(), 5},
                       {rule_kind::rkoth, oracle::t5_rkoth.data(), 5}};
  for (const auto& r : rows5) {
    auto wd = exact_winner_distribution(r.rule, t5);
    for (int i = 0; i < r.n; ++i) CHECK_THAT(wd.probs[i], WithinAbs(r.expected[i], 1e-12));
  }
}

TEST_CASE("exact engine agrees with a direct recursive evaluation", "[rules]") {
  rng gen(777);
  for (int n : {4, 5}) {
    auto t = sample_weak(n, 0.45, gen);
    for (rule_kind rule : {rule_kind::rdm, rule_kind::rseb, rule_kind::rkoth}) {
      auto wd = exact_winner_distribution(rule, t);
      auto ref = oracle::ref_dist(rule, t);
      for (int i = 0; i < n; ++i)
        CHECK_THAT(wd.probs[i], WithinAbs(ref[i], 1e-12));
    }
  }
}

TEST_CASE("exact mode enforces its size caps", "[rules]") {
  CHECK(thrown([] { exact_winner_distribution(rule_kind::rdm, prob_tournament(13)); }) ==
        errc::exact_mode_too_large);
  CHECK(thrown([] { exact_winner_distribution(rule_kind::rkoth, prob_tournament(13)); }) ==
        errc::exact_mode_too_large);
  CHECK(thrown([] { exact_winner_distribution(rule_kind::rseb, prob_tournament(9)); }) ==
        errc::exact_mode_too_large);

  // the matching-free cap itself stays computable: symmetry at n = 12
  auto wd = exact_winner_distribution(rule_kind::rdm, uniform_half(12));
  for (double p : wd.probs) CHECK_THAT(p, WithinAbs(1.0 / 12.0, 1e-9));
}

TEST_CASE("condorcet winners take every deterministic tournament", "[rules]") {
  for (int n = 3; n <= 5; ++n) {
    auto en = enumerate_strict(n, 0.5);
    for (std::uint64_t code = 0; code < en.size(); ++code) {
      auto t = en.at(code);
      auto cw = condorcet_winner(t);
      if (!cw) continue;
      for (rule_kind rule : {rule_kind::rdm, rule_kind::rseb, rule_kind::rkoth}) {
        auto wd = exact_winner_distribution(rule, t);
        REQUIRE_THAT(wd.probs[*cw], WithinAbs(1.0, 1e-12));
      }
    }
  }
}

TEST_CASE("relabeling teams relabels the distribution", "[rules]") {
  auto t = oracle::t4();
  std::vector<int> sigma{2, 0, 3, 1};
  auto pt = permute(t, sigma);
  CHECK(pt.prob(2, 0) == t.prob(0, 1));
  for (rule_kind rule : {rule_kind::rdm, rule_kind::rseb, rule_kind::rkoth}) {
    auto base = exact_winner_distribution(rule, t);
    auto perm = exact_winner_distribution(rule, pt);
    for (int i = 0; i < 4; ++i)
      CHECK_THAT(perm.probs[sigma[i]], WithinAbs(base.probs[i], 1e-12));
  }
  CHECK(thrown([&] { permute(t, {0, 1, 2}); }) == errc::degenerate_inputs);
}

TEST_CASE("monte carlo estimates agree with exact values within four sigma", "[rules]") {
  auto t = oracle::t4();
  const std::uint64_t trials = 200000;
  for (rule_kind rule : {rule_kind::rdm, rule_kind::rseb, rule_kind::rkoth}) {
    auto exact = exact_winner_distribution(rule, t);
    auto mc = mc_winner_distribution(rule, t, trials, 20240831);
    CHECK(mc.mode == "mc");
    CHECK(mc.trials == trials);
    CHECK(mc.seed == 20240831);
    double sum = 0.0;
    for (int i = 0; i < 4; ++i) {
      double p = exact.probs[i];
      double se = std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
      CHECK_THAT(mc.probs[i], WithinAbs(p, 4.0 * se));
      CHECK(mc.stderrs[i] > 0.0);
      sum += mc.probs[i];
    }
    CHECK_THAT(sum, WithinAbs(1.0, 1e-12));
  }
  CHECK(thrown([&] { mc_winner_distribution(rule_kind::rdm, t, 0, 1); }) ==
        errc::degenerate_inputs);
}

TEST_CASE("monte carlo results are reproducible for any thread count", "[rules]") {
  auto t = oracle::t5();
  // trials straddle several blocks so the block-order reduction is exercised
  const std::uint64_t trials = 3 * mc_block_trials + 1234;
  for (rule_kind rule : {rule_kind::rdm, rule_kind::rseb}) {
    auto a = mc_winner_distribution(rule, t, trials, 99, 1);
    auto b = mc_winner_distribution(rule, t, trials, 99, 1);
    auto c = mc_winner_distribution(rule, t, trials, 99, 3);
    CHECK(a.probs == b.probs);
    CHECK(a.probs == c.probs);
    auto d = mc_winner_distribution(rule, t, trials, 100, 1);
    CHECK(a.probs != d.probs);
  }
}

TEST_CASE("coalition win probabilities sum member probabilities", "[rules]") {
  auto t = oracle::t4();
  auto exact = coalition_win_prob(rule_kind::rseb, t, {0, 1}, "exact");
  CHECK_THAT(exact.value, WithinAbs(oracle::t4_rseb[0] + oracle::t4_rseb[1], 1e-12));
  CHECK_FALSE(exact.stderr_value.has_value());

  auto mc = coalition_win_prob(rule_kind::rseb, t, {0, 1}, "mc", 65536, 7);
  REQUIRE(mc.stderr_value.has_value());
  CHECK_THAT(mc.value, WithinAbs(exact.value, 6.0 * *mc.stderr_value + 1e-3));

  CHECK(thrown([&] { coalition_win_prob(rule_kind::rdm, t, {}, "exact"); }) ==
        errc::bad_coalition);
  CHECK(thrown([&] { coalition_win_prob(rule_kind::rdm, t, {1, 1}, "exact"); }) ==
        errc::bad_coalition);
  CHECK(thrown([&] { coalition_win_prob(rule_kind::rdm, t, {0, 9}, "exact"); }) ==
        errc::bad_coalition);
  CHECK(thrown([&] { coalition_win_prob(rule_kind::rdm, t, {0}, "approximate"); }) ==
        errc::degenerate_inputs);
}

TEST_CASE("rule names round-trip and reject strangers", "[rules]") {
  for (rule_kind rule : {rule_kind::rdm, rule_kind::rseb, rule_kind::rkoth})
    CHECK(rule_from_name(rule_name(rule)) == rule);
  CHECK(thrown([] { rule_from_name("swiss"); }) == errc::degenerate_inputs);
}
