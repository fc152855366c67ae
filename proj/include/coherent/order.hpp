#ifndef COHERENT_ORDER_HPP
#define COHERENT_ORDER_HPP

#include "coherent/market.hpp"

#include <optional>
#include <string>
#include <vector>

namespace coherent {

/// Regular stochastic order induced by an ideal of negligible events.
///
/// On a finite state space every ideal is the power set of its union, so
/// the order is fully described by one proper subset U of the states:
/// f dominates g iff f >= g at every state outside U.
class OrderModel {
 public:
  explicit OrderModel(StateSpace space) : OrderModel(std::move(space), std::vector<bool>{}) {}

  OrderModel(StateSpace space, std::vector<bool> negligible) : space_(std::move(space)), negligible_(std::move(negligible)) {
    if (negligible_.empty()) negligible_.assign(static_cast<std::size_t>(space_.size()), false);
    if (static_cast<Index>(negligible_.size()) != space_.size())
      throw ValidationError("negligible", "negligible mask does not match the state space");
    build_support();
  }

  static OrderModel from_labels(StateSpace space, const std::vector<std::string>& negligible) {
    std::vector<bool> mask(static_cast<std::size_t>(space.size()), false);
    for (std::size_t i = 0; i < negligible.size(); ++i) {
      auto s = space.find(negligible[i]);
      if (!s) throw ValidationError("negligible[" + std::to_string(i) + "]", "unknown state '" + negligible[i] + "'");
      mask[static_cast<std::size_t>(*s)] = true;
    }
    return OrderModel(std::move(space), std::move(mask));
  }

  const StateSpace& space() const { return space_; }
  bool negligible(Index s) const { return negligible_[static_cast<std::size_t>(s)]; }
  const std::vector<bool>& negligible_mask() const { return negligible_; }
  /// Indices of the non-negligible states, in state order.
  const std::vector<Index>& support() const { return support_; }

 private:
  void build_support() {
    support_.clear();
    for (Index s = 0; s < space_.size(); ++s)
      if (!negligible(s)) support_.push_back(s);
    if (support_.empty())
      throw ValidationError("negligible", "every state is negligible; the order would rank 0 above 1 (axiom TRIV)");
  }

  StateSpace space_;
  std::vector<bool> negligible_;
  std::vector<Index> support_;
};

struct OrderVerdict {
  bool holds = true;
  std::optional<std::string> witness;
};

namespace detail {
template <class Derived>
void check_size(const OrderModel& om, const Eigen::MatrixBase<Derived>& f, const char* name) {
  if (f.size() != om.space().size())
    throw ValidationError(name, "vector has " + std::to_string(f.size()) + " entries, state space has " +
                                    std::to_string(om.space().size()));
}
}  // namespace detail

/// f >=* g. A nonzero `slack` accepts violations up to that size, for
/// floating-point callers.
template <class DerivedF, class DerivedG>
OrderVerdict geq_star(const OrderModel& om, const Eigen::MatrixBase<DerivedF>& f, const Eigen::MatrixBase<DerivedG>& g,
                      const typename DerivedF::Scalar& slack = typename DerivedF::Scalar(0)) {
  detail::check_size(om, f, "f");
  detail::check_size(om, g, "g");
  for (Index s : om.support()) {
    if (f(s) < g(s) - slack) return {false, om.space().label(s)};
  }
  return {true, std::nullopt};
}

template <class Scalar>
struct EssentialBounds {
  Scalar low;
  Scalar high;
};

/// f_* and f^*: extrema of f over the non-negligible states.
template <class Derived>
EssentialBounds<typename Derived::Scalar> essential_bounds(const OrderModel& om, const Eigen::MatrixBase<Derived>& f) {
  using Scalar = typename Derived::Scalar;
  detail::check_size(om, f, "f");
  const auto& sup = om.support();
  Scalar low = f(sup.front());
  Scalar high = f(sup.front());
  for (Index s : sup) {
    if (f(s) < low) low = f(s);
    if (f(s) > high) high = f(s);
  }
  return {low, high};
}

/// rho(f) = inf{b : (f ^ 0) + b >=* 0}, the loss measure generating the order.
template <class Derived>
typename Derived::Scalar loss_measure(const OrderModel& om, const Eigen::MatrixBase<Derived>& f) {
  using Scalar = typename Derived::Scalar;
  const Scalar low = essential_bounds(om, f).low;
  return low < Scalar(0) ? Scalar(-low) : Scalar(0);
}

/// M*(theta): numeraire units needed to make the discounted payoff >=* 0.
template <class Scalar>
Scalar minimal_margin(const BasicMarket<Scalar>& market, const OrderModel& om, const BasicStrategy<Scalar>& theta) {
  return loss_measure(om, discounted_payoff(market, theta));
}

template <class Scalar>
Scalar minimal_margin(const BasicMarket<Scalar>& market, const OrderModel& om, const Vector<Scalar>& positions) {
  return loss_measure(om, Vector<Scalar>(market.discounted_payoffs() * positions));
}

/// A strategy is hedgeable when its discounted payoff has a finite
/// essential infimum. Every payoff on a finite state space does, so this
/// always holds once the strategy is valid for the market.
template <class Scalar>
bool hedgeable(const BasicMarket<Scalar>& market, const OrderModel& om, const BasicStrategy<Scalar>& theta) {
  const Vector<Scalar> x = discounted_payoff(market, theta);
  return is_finite(essential_bounds(om, x).low);
}

/// States outside the negligible union. Probability vectors supported here
/// are exactly the measures that vanish on every negligible event.
inline std::vector<std::string> order_support(const OrderModel& om) {
  std::vector<std::string> out;
  out.reserve(om.support().size());
  for (Index s : om.support()) out.push_back(om.space().label(s));
  return out;
}

}  // namespace coherent

#endif  // COHERENT_ORDER_HPP
