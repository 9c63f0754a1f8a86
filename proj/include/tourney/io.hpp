#pragma once

#include <json.hpp>

#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tourney/gauntlet.hpp"
#include "tourney/manipulation.hpp"
#include "tourney/rules.hpp"
#include "tourney/tournament.hpp"

namespace tourney {

inline constexpr const char* tool_version = "0.1.0";

using json = nlohmann::json;

// shortest round-trip decimal for CSV cells
inline std::string num(double x) { return json(x).dump(); }

// ---- tournaments: {"n": int, "p": [[float;n];n]} ---------------------------

inline json tournament_to_json(const prob_tournament& t) {
  int n = t.size();
  json p = json::array();
  for (int i = 0; i < n; ++i) {
    json row = json::array();
    for (int j = 0; j < n; ++j) row.push_back(i == j ? 0.5 : t.prob(i, j));
    p.push_back(std::move(row));
  }
  return json{{"n", n}, {"p", std::move(p)}};
}

inline json tournament_to_json(const det_tournament& t) {
  int n = t.size();
  json p = json::array();
  for (int i = 0; i < n; ++i) {
    json row = json::array();
    for (int j = 0; j < n; ++j) row.push_back(i != j && t.beats(i, j) ? 1.0 : 0.0);
    p.push_back(std::move(row));
  }
  return json{{"n", n}, {"p", std::move(p)}};
}

inline prob_tournament tournament_from_json(const json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("p"))
    fail(errc::degenerate_inputs, "tournament JSON needs keys n and p");
  int n = 0;
  std::vector<std::vector<double>> m;
  try {
    n = j.at("n").get<int>();
    m = j.at("p").get<std::vector<std::vector<double>>>();
  } catch (const json::exception& e) {
    fail(errc::degenerate_inputs, std::string("tournament JSON is malformed: ") + e.what());
  }
  if (static_cast<int>(m.size()) != n)
    fail(errc::degenerate_inputs, "tournament JSON: p does not match n");
  return from_matrix(m);
}

// ---- run metadata -----------------------------------------------------------

inline json meta_json(const json& config, std::uint64_t seed) {
  return json{{"version", tool_version}, {"config", config}, {"seed", seed}};
}

// ---- winner distributions ---------------------------------------------------

inline json winner_to_json(const winner_distribution& wd) {
  json j{{"rule", rule_name(wd.rule)}, {"n", wd.n}, {"probs", wd.probs}, {"mode", wd.mode}};
  if (wd.trials) j["trials"] = *wd.trials;
  if (wd.seed) j["seed"] = *wd.seed;
  if (!wd.stderrs.empty()) j["stderr"] = wd.stderrs;
  return j;
}

// ---- manipulation -----------------------------------------------------------

inline json report_to_json(const manipulation_report& r) {
  return json{{"rule", rule_name(r.rule)},
              {"tournament", tournament_to_json(r.tournament)},
              {"coalition", r.pair},
              {"baseline", r.baseline},
              {"best_manipulated", r.best_manipulated},
              {"gain", r.gain},
              {"best_direction", direction_name(r.best_direction)}};
}

inline json worst_case_to_json(const worst_case_result& r) {
  return json{{"rule", rule_name(r.rule)},
              {"n", r.n},
              {"epsilon", r.epsilon},
              {"mode", r.mode},
              {"max_gain", r.max_gain},
              {"argmax", json{{"code", r.argmax_code},
                              {"pair", json::array({r.argmax_pair.first, r.argmax_pair.second})}}},
              {"instances_checked", r.instances_checked}};
}

inline json gain_sum_to_json(rule_kind rule, double eps, const gain_sum_result& r) {
  return json{{"rule", rule_name(rule)}, {"epsilon", eps},
              {"gains", r.gains},        {"sum", r.sum},
              {"expected_sum", r.expected_sum}, {"formula", r.formula}};
}

inline json convexity_to_json(const convexity_result& r) {
  return json{{"rule", rule_name(r.rule)},   {"n", r.n},
              {"epsilon", r.epsilon},        {"samples", r.samples},
              {"strict_max", r.strict_max},  {"max_weak_gain", r.max_weak_gain}};
}

// ---- gauntlet ---------------------------------------------------------------

inline json gauntlet_to_json(const gauntlet_distribution& g) {
  json seqs = json::array();
  for (const auto& [seq, p] : g.probs)
    seqs.push_back(json{{"sequence", seq}, {"prob", p}});
  return json{{"rule", rule_name(g.rule)}, {"focal", g.focal}, {"distribution", std::move(seqs)}};
}

inline json independence_to_json(rule_kind rule, int u, int v, const independence_result& r) {
  return json{{"rule", rule_name(rule)},
              {"pair", json::array({u, v})},
              {"max_tv", r.max_tv},
              {"matchsets_checked", r.matchsets_checked}};
}

inline json events_to_json(rule_kind rule, int u, int v, const event_probabilities& e) {
  return json{{"rule", rule_name(rule)},
              {"pair", json::array({u, v})},
              {"basis", event_basis_name(e.basis)},
              {"pr_bad", e.pr_bad},
              {"pr_good", e.pr_good},
              {"pr_recursive", e.pr_recursive}};
}

// ---- CSV artifacts ----------------------------------------------------------

// comment header carrying the run metadata, then the pinned column row
inline std::string csv_preamble(const json& config, std::uint64_t seed) {
  std::ostringstream os;
  os << "# version=" << tool_version << "\n";
  os << "# config=" << config.dump() << "\n";
  os << "# seed=" << seed << "\n";
  return os.str();
}

inline std::string sweep_csv(const std::vector<sweep_row>& rows) {
  std::ostringstream os;
  os << "rule,n,epsilon,mode,max_gain,formula,slack,argmax_code,instances\n";
  for (const auto& r : rows) {
    std::string mode = r.mode + (r.exploratory ? "-exploratory" : "");
    os << rule_name(r.rule) << "," << r.n << "," << num(r.epsilon) << "," << mode << ","
       << num(r.max_gain) << "," << num(r.formula) << "," << num(r.slack) << ","
       << r.argmax_code << ":" << r.argmax_pair.first << "-" << r.argmax_pair.second << ","
       << r.instances << "\n";
  }
  return os.str();
}

struct property_row {
  std::string property;
  std::string rule;  // "-" when the property is rule-independent
  int n = 0;
  double epsilon = 0.0;
  std::uint64_t instances = 0;
  double max_violation = 0.0;
  bool pass = false;
};

inline std::string verify_csv(const std::vector<property_row>& rows) {
  std::ostringstream os;
  os << "property,rule,n,epsilon,instances,max_violation,pass\n";
  for (const auto& r : rows)
    os << r.property << "," << r.rule << "," << r.n << "," << num(r.epsilon) << ","
       << r.instances << "," << num(r.max_violation) << "," << (r.pass ? "true" : "false")
       << "\n";
  return os.str();
}

}  // namespace tourney
