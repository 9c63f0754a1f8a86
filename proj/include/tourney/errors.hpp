#pragma once

#include <stdexcept>
#include <string>

namespace tourney {

enum class errc {
  invalid_probability,
  not_complementary,
  too_large,
  bad_coalition,
  too_few_teams,
  exact_mode_too_large,
  zero_epsilon,
  not_strict,
  not_matching_rule,
  degenerate_inputs,
  violation_found,
};

inline const char* errc_name(errc e) {
  switch (e) {
    case errc::invalid_probability: return "InvalidProbability";
    case errc::not_complementary: return "NotComplementary";
    case errc::too_large: return "TooLarge";
    case errc::bad_coalition: return "BadCoalition";
    case errc::too_few_teams: return "TooFewTeams";
    case errc::exact_mode_too_large: return "ExactModeTooLarge";
    case errc::zero_epsilon: return "ZeroEpsilon";
    case errc::not_strict: return "NotStrict";
    case errc::not_matching_rule: return "NotMatchingRule";
    case errc::degenerate_inputs: return "DegenerateInputs";
    case errc::violation_found: return "ViolationFound";
  }
  return "Unknown";
}

class tourney_error : public std::runtime_error {
 public:
  tourney_error(errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) {
  throw tourney_error(code, what);
}

}  // namespace tourney
