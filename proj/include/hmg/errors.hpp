#pragma once

#include <stdexcept>
#include <string>

namespace hmg {

// Base for all library errors so callers can catch one type.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A requested sum/moment diverges (e.g. power-law moment with k >= alpha-1).
struct NonSummableError : Error {
  using Error::Error;
};

// Stub totals cannot be equalized within the edge-side support.
struct ParityError : Error {
  using Error::Error;
};

// Rejection sampling exhausted its attempt budget.
struct ConditioningTooRareError : Error {
  double acceptance_estimate = 0.0;
  ConditioningTooRareError(const std::string& msg, double est)
      : Error(msg), acceptance_estimate(est) {}
};

// Incidence graph is not simple, so it has no hyper-multigraph preimage.
struct NotIncidenceSimpleError : Error {
  using Error::Error;
};

// Formula evaluated with unbound variables, or parsed text is malformed.
struct FormulaError : Error {
  using Error::Error;
};

// Tree scoring/axiom construction used a tree outside the limit theory.
struct NotInTheoryError : Error {
  using Error::Error;
};

// Tree has unexplored offspring at the truncation boundary.
struct TruncatedTreeError : Error {
  using Error::Error;
};

// Pattern does not satisfy a structural precondition (connectivity, excess...).
struct PatternError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace hmg
