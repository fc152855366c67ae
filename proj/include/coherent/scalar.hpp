#ifndef COHERENT_SCALAR_HPP
#define COHERENT_SCALAR_HPP

#include <Eigen/Core>
#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/gmp.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace coherent {

/// Exact rational scalar used for hand-checkable fixtures.
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;

template <class Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Index = Eigen::Index;

/// Numerical tolerances per scalar type. Rationals are exact, so every
/// tolerance collapses to zero.
template <class Scalar>
struct Tolerance;

template <>
struct Tolerance<double> {
  static double feasibility() { return 1e-9; }
  static double pivot() { return 1e-11; }
  static double exact() { return 1e-12; }
};

template <>
struct Tolerance<Rational> {
  static Rational feasibility() { return Rational(0); }
  static Rational pivot() { return Rational(0); }
  static Rational exact() { return Rational(0); }
};

template <class Scalar>
Scalar positive_part(const Scalar& x) {
  return x > Scalar(0) ? x : Scalar(0);
}

template <class Scalar>
Scalar negative_part(const Scalar& x) {
  return x < Scalar(0) ? Scalar(-x) : Scalar(0);
}

template <class Scalar>
Scalar abs_value(const Scalar& x) {
  return x < Scalar(0) ? Scalar(-x) : x;
}

template <class Scalar>
double to_double(const Scalar& x) {
  return static_cast<double>(x);
}

template <class Scalar>
bool is_finite(const Scalar& x) {
  if constexpr (std::is_floating_point_v<Scalar>) {
    return std::isfinite(x);
  } else {
    (void)x;
    return true;
  }
}

/// Input that breaks a model assumption. `where` names the field path.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string where, const std::string& what)
      : std::invalid_argument(where.empty() ? what : where + ": " + what),
        where_(std::move(where)),
        message_(what) {}

  const std::string& where() const noexcept { return where_; }
  /// The message without the field path.
  const std::string& message() const noexcept { return message_; }

 private:
  std::string where_;
  std::string message_;
};

/// Raised when an operation needs a coherent market and the pricing
/// polytope turns out to be empty.
class IncoherentMarket : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace coherent

#endif  // COHERENT_SCALAR_HPP
