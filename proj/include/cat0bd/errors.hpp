#pragma once

#include <stdexcept>
#include <string>

namespace cat0bd {

// Each failure mode gets its own type so callers (and the CLI) can branch on
// it; all derive from std::runtime_error or std::logic_error.

/// A trivial free-group word has no associated tree end.
struct EmptyPeriod : std::domain_error {
  using std::domain_error::domain_error;
};

/// A parameter lies outside the geodesic's domain.
struct OutOfRange : std::out_of_range {
  using std::out_of_range::out_of_range;
};

/// The orbit of the identity is bounded; there is no boundary limit.
struct NoLimit : std::domain_error {
  using std::domain_error::domain_error;
};

/// The action's height orbit cannot be handled exactly.
struct UnsupportedSpec : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Direction data of a finite sample did not settle.
struct NotConvergent : std::runtime_error {
  NotConvergent(const std::string& what, double radius)
      : std::runtime_error(what), unstable_radius(radius) {}
  double unstable_radius;
};

/// N or M is below the covering radius of the corresponding action.
struct InvalidConstants : std::invalid_argument {
  InvalidConstants(const std::string& what, double radius)
      : std::invalid_argument(what), covering_radius(radius) {}
  double covering_radius;
};

/// No group element reaches within N of a ray point.
struct NoCover : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The image of an approximating sequence failed the sampled Cauchy test.
struct NotCauchy : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Sequence-based and closed-form boundary images disagree.
struct CrosscheckMismatch : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace cat0bd
