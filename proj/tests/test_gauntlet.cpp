#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "oracles.hpp"
#include "tourney/gauntlet.hpp"
#include "tourney/manipulation.hpp"

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

void check_same_dist(const std::map<std::vector<int>, double>& got,
                     const std::map<std::vector<int>, double>& expected, double tol) {
  REQUIRE(got.size() == expected.size());
  double total = 0.0;
  for (const auto& [seq, p] : expected) {
    auto it = got.find(seq);
    REQUIRE(it != got.end());
    CHECK_THAT(it->second, WithinAbs(p, tol));
  }
  for (const auto& [seq, p] : got) {
    (void)seq;
    total += p;
  }
  CHECK_THAT(total, WithinAbs(1.0, 1e-12));
}

}  // namespace

TEST_CASE("gauntlet distributions match the frozen references", "[gauntlet]") {
  check_same_dist(gauntlet_dist(rule_kind::rdm, three_cycle(0.2), 0).probs,
                  oracle::three_cycle_gauntlet_rdm_02(), 1e-12);
  check_same_dist(gauntlet_dist(rule_kind::rdm, oracle::t4(), 0).probs,
                  oracle::t4_gauntlet_rdm(), 1e-12);
  check_same_dist(gauntlet_dist(rule_kind::rseb, oracle::t4(), 0).probs,
                  oracle::t4_gauntlet_rseb(), 1e-12);
  CHECK(thrown([] { gauntlet_dist(rule_kind::rdm, three_cycle(0.2), 3); }) ==
        errc::bad_coalition);
}

TEST_CASE("pivot-rule gauntlets list simultaneous opponents in id order", "[gauntlet]") {
  const double eps = 0.2;
  auto g = gauntlet_dist(rule_kind::rkoth, three_cycle(eps), 0);
  // pivot 0 yields the whole field at once; pivots 1 and 2 go sequentially
  std::map<std::vector<int>, double> expected{
      {{1, 2}, 1.0 / 3.0 + (0.5 - eps) / 3.0},
      {{2, 1}, (0.5 + eps) / 3.0},
      {{1}, (0.5 + eps) / 3.0},
      {{2}, (0.5 - eps) / 3.0}};
  check_same_dist(g.probs, expected, 1e-12);
}

TEST_CASE("gauntlet sequences never contain the focal team, dummies, or dead teams",
          "[gauntlet]") {
  for (rule_kind rule : {rule_kind::rdm, rule_kind::rseb, rule_kind::rkoth}) {
    auto g = gauntlet_dist(rule, oracle::t5(), 2);
    double total = 0.0;
    for (const auto& [seq, p] : g.probs) {
      total += p;
      for (int x : seq) {
        CHECK(x != 2);
        CHECK(x >= 0);
        CHECK(x < 5);
      }
    }
    CHECK_THAT(total, WithinAbs(1.0, 1e-12));
  }
}

TEST_CASE("the gauntlet ignores the focal team's own match probabilities", "[gauntlet]") {
  // the focal row is forced to 1, so perturbing it cannot change anything
  auto t = oracle::t4();
  auto perturbed = t.with_edge(0, 2, 0.99).with_edge(0, 3, 0.01);
  for (rule_kind rule : {rule_kind::rdm, rule_kind::rseb, rule_kind::rkoth}) {
    auto a = gauntlet_dist(rule, t, 0);
    auto b = gauntlet_dist(rule, perturbed, 0);
    REQUIRE(a.probs.size() == b.probs.size());
    for (auto ia = a.probs.begin(), ib = b.probs.begin(); ia != a.probs.end(); ++ia, ++ib) {
      CHECK(ia->first == ib->first);
      CHECK(ia->second == ib->second);  // bitwise: identical arithmetic
    }
  }
}

TEST_CASE("winner probabilities factor through the gauntlet", "[gauntlet]") {
  for (rule_kind rule : {rule_kind::rdm, rule_kind::rseb, rule_kind::rkoth}) {
    for (const auto& t : {oracle::t4(), oracle::t5()}) {
      auto wd = exact_winner_distribution(rule, t);
      for (int u = 0; u < t.size(); ++u) {
        auto g = gauntlet_dist(rule, t, u);
        double acc = 0.0;
        for (const auto& [seq, p] : g.probs) {
          double prod = p;
          for (int x : seq) prod *= t.prob(u, x);
          acc += prod;
        }
        CHECK_THAT(acc, WithinAbs(wd.probs[u], 1e-12));
      }
    }
  }
}

TEST_CASE("matching rules hide which coalition member advanced", "[gauntlet]") {
  auto r1 = gauntlet_independence_check(rule_kind::rdm, oracle::t4(), 0, 1);
  CHECK(r1.max_tv <= 1e-9);
  CHECK(r1.matchsets_checked == 1);

  auto r2 = gauntlet_independence_check(rule_kind::rseb, oracle::t4(), 0, 1);
  CHECK(r2.max_tv <= 1e-9);
  CHECK(r2.matchsets_checked == 1);  // only {(0,1),(2,3)} pairs them

  auto r3 = gauntlet_independence_check(rule_kind::rseb, oracle::t5(), 1, 3);
  CHECK(r3.max_tv <= 1e-9);
  CHECK(r3.matchsets_checked == 15);

  CHECK(thrown([] {
          gauntlet_independence_check(rule_kind::rkoth, three_cycle(0.25), 0, 1);
        }) == errc::not_matching_rule);
  CHECK(thrown([] {
          gauntlet_independence_check(rule_kind::rdm, three_cycle(0.25), 0, 0);
        }) == errc::bad_coalition);
}

TEST_CASE("first-round event probabilities match the frozen references", "[gauntlet]") {
  auto t = oracle::t4();
  struct row {
    rule_kind rule;
    oracle::event_triple expected;
  };
  const row rows[] = {{rule_kind::rdm, oracle::t4_events_rdm},
                      {rule_kind::rseb, oracle::t4_events_rseb},
                      {rule_kind::rkoth, oracle::t4_events_rkoth}};
  for (const auto& r : rows) {
    auto e = event_probs(r.rule, t, 0, 1);
    CHECK(e.basis == event_basis::sufficient);
    CHECK_THAT(e.pr_bad, WithinAbs(r.expected.bad, 1e-12));
    CHECK_THAT(e.pr_good, WithinAbs(r.expected.good, 1e-12));
    CHECK_THAT(e.pr_recursive, WithinAbs(r.expected.rec, 1e-12));
    CHECK_THAT(e.pr_bad + e.pr_good + e.pr_recursive, WithinAbs(1.0, 1e-12));
  }
  // the exact basis can only move recursive mass to good-terminal
  auto es = event_probs(rule_kind::rdm, t, 0, 1, event_basis::sufficient);
  auto ee = event_probs(rule_kind::rdm, t, 0, 1, event_basis::exact);
  CHECK(ee.basis == event_basis::exact);
  CHECK(es.pr_bad == ee.pr_bad);
  CHECK(es.pr_good <= ee.pr_good + 1e-12);
  CHECK_THAT(es.pr_good, WithinAbs(ee.pr_good, 1e-12));  // they coincide on this instance
}

TEST_CASE("bad-event probabilities are exact count ratios", "[gauntlet]") {
  for (int n = 3; n <= 6; ++n) {
    auto e = event_probs(rule_kind::rdm, uniform_half(n), 0, 1);
    CHECK(e.pr_bad == 1.0 / static_cast<double>(pair_count(n)));
  }
  for (int n = 3; n <= 5; ++n) {
    auto e = event_probs(rule_kind::rseb, uniform_half(n), 0, 1);
    CHECK(e.pr_bad == 1.0 / static_cast<double>(pow2_ceil(n) - 1));
  }
}

TEST_CASE("column equality certifies good-terminal rounds", "[gauntlet]") {
  // all outsiders see u and v identically, so no pairing round is recursive
  auto t = uniform_half(4).with_edge(0, 1, 0.9);
  auto e = event_probs(rule_kind::rdm, t, 0, 1);
  CHECK_THAT(e.pr_bad + e.pr_good, WithinAbs(1.0, 1e-12));
  CHECK(e.pr_recursive == 0.0);
}

TEST_CASE("conditional bad gains match the frozen references and stay capped",
          "[gauntlet]") {
  auto t = oracle::t4();
  CHECK_THAT(conditional_bad_gain(rule_kind::rdm, t, 0, 1),
             WithinAbs(oracle::t4_cond_gain_rdm, 1e-12));
  CHECK_THAT(conditional_bad_gain(rule_kind::rseb, t, 0, 1),
             WithinAbs(oracle::t4_cond_gain_rseb, 1e-12));

  // the cycle attains the cap 2 eps (1/2 + eps) exactly
  for (double eps : {0.1, 0.25, 0.5}) {
    double cap = 2.0 * eps * (0.5 + eps);
    for (rule_kind rule : {rule_kind::rdm, rule_kind::rseb}) {
      double g = conditional_bad_gain(rule, three_cycle(eps), 0, 1);
      CHECK_THAT(g, WithinAbs(cap, 1e-12));
    }
  }

  CHECK(thrown([&] { conditional_bad_gain(rule_kind::rkoth, t, 0, 1); }) ==
        errc::not_matching_rule);
  CHECK(thrown([] {
          conditional_bad_gain(rule_kind::rseb, prob_tournament(9), 0, 1);
        }) == errc::exact_mode_too_large);
}

TEST_CASE("the difference of extreme-edge products stays under twice epsilon",
          "[gauntlet]") {
  for (double eps : {0.0, 0.1, 0.3, 0.5}) {
    for (int n = 1; n <= 20; ++n)
      for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j)
          CHECK(calcs_lhs(n, i, j, eps) <= 2.0 * eps + 1e-12);
    CHECK_THAT(calcs_lhs(1, 1, 0, eps), WithinAbs(2.0 * eps, 1e-15));
  }
  CHECK(thrown([] { calcs_lhs(0, 0, 0, 0.1); }) == errc::degenerate_inputs);
  CHECK(thrown([] { calcs_lhs(3, 4, 0, 0.1); }) == errc::degenerate_inputs);
  CHECK(thrown([] { calcs_lhs(3, 0, -1, 0.1); }) == errc::degenerate_inputs);
}

TEST_CASE("the event-probability bound reproduces both closed forms", "[gauntlet]") {
  CHECK_THAT(framework_bound(1.0 / 6.0, 1.0 / 3.0, 1.0), WithinAbs(1.0 / 3.0, 1e-15));
  for (double b : {1.0 / 3.0, 1.0 / 6.0, 1.0 / 10.0, 1.0 / 7.0}) {
    CHECK_THAT(framework_bound(b, 2.0 * b, 1.0), WithinAbs(1.0 / 3.0, 1e-12));
    for (double eps : {0.05, 0.2, 0.35, 0.5}) {
      double c = 2.0 * eps * (0.5 + eps);
      CHECK_THAT(framework_bound(b, 2.0 * b, c), WithinAbs(lower_bound_formula(eps), 1e-12));
    }
  }
  CHECK(thrown([] { framework_bound(0.0, 0.0, 1.0); }) == errc::degenerate_inputs);
  CHECK(thrown([] { framework_bound(0.2, -0.1, 1.0); }) == errc::degenerate_inputs);
  CHECK(thrown([] { framework_bound(0.2, 0.3, -1.0); }) == errc::degenerate_inputs);
}

TEST_CASE("the five-team bracket subcase hits its quadratic closed form", "[gauntlet]") {
  auto t = subcase_3b_tournament(0.25);
  CHECK(t.prob(0, 1) == 0.75);
  CHECK(t.prob(2, 1) == 0.25);
  CHECK(t.prob(4, 0) == 0.25);
  CHECK(t.prob(4, 1) == 0.75);
  CHECK(t.prob(3, 4) == 0.75);

  for (auto [eps, expected] : oracle::subcase_3b_spots)
    CHECK_THAT(subcase_3b_probability(eps), WithinAbs(expected, 1e-12));

  // the same number appears as the sufficient-basis good-terminal probability
  for (double eps : {0.1, 0.25, 0.5}) {
    double closed = 27.0 / 70.0 - (2.0 / 35.0) * eps * eps;
    auto e = event_probs(rule_kind::rseb, subcase_3b_tournament(eps), 0, 1);
    CHECK_THAT(e.pr_good, WithinAbs(closed, 1e-9));
    CHECK_THAT(e.pr_bad, WithinAbs(1.0 / 7.0, 1e-15));
  }
}

TEST_CASE("event and gain machinery agrees with the bc/(b+g) bound on a sample",
          "[gauntlet]") {
  for (rule_kind rule : {rule_kind::rdm, rule_kind::rseb}) {
    for (double eps : {0.1, 0.4}) {
      auto en = enumerate_strict(3, eps);
      for (std::uint64_t code = 0; code < en.size(); ++code) {
        auto t = en.at(code);
        double c = 2.0 * eps * (0.5 + eps);
        auto e = event_probs(rule, t, 0, 1);
        double gain = alpha_pair(rule, t, 0, 1).gain;
        CHECK(gain <= framework_bound(e.pr_bad, e.pr_good, c) + 1e-9);
      }
    }
  }
}
