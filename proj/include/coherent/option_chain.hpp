#ifndef COHERENT_OPTION_CHAIN_HPP
#define COHERENT_OPTION_CHAIN_HPP

#include "coherent/scalar.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace coherent {

/// CALL quotes on one underlying, indexed by strike. The strike-0 CALL is
/// the underlying itself. `x_star` is the essential supremum of the
/// underlying when known; strikes at or above it pay nothing and never
/// enter the efficient set.
template <class Scalar>
class OptionChain {
 public:
  OptionChain(std::vector<Scalar> strikes, std::vector<Scalar> prices, std::optional<Scalar> x_star = std::nullopt,
              std::string underlying = "X", std::vector<Scalar> bids = {})
      : strikes_(std::move(strikes)),
        prices_(std::move(prices)),
        bids_(std::move(bids)),
        x_star_(std::move(x_star)),
        underlying_(std::move(underlying)) {
    if (strikes_.empty()) throw ValidationError("chain", "chain has no strikes");
    if (strikes_.size() != prices_.size()) throw ValidationError("chain", "strike and price columns differ in length");
    if (!bids_.empty() && bids_.size() != prices_.size())
      throw ValidationError("chain", "bid column length differs from the price column");
    if (strikes_.front() != Scalar(0)) throw ValidationError("chain.strikes", "the strike-0 quote (underlying) is required");
    for (std::size_t i = 0; i < strikes_.size(); ++i) {
      const std::string where = "chain.row[" + std::to_string(i) + "]";
      if (!is_finite(strikes_[i]) || !is_finite(prices_[i])) throw ValidationError(where, "non-finite value");
      if (i > 0 && !(strikes_[i] > strikes_[i - 1])) throw ValidationError(where, "strikes must be strictly increasing");
      if (prices_[i] < Scalar(0)) throw ValidationError(where, "option prices must be nonnegative");
    }
    if (x_star_ && !(*x_star_ > Scalar(0)))
      throw ValidationError("x_star", "the supremum of the underlying must be positive and finite");
  }

  const std::vector<Scalar>& strikes() const { return strikes_; }
  const std::vector<Scalar>& prices() const { return prices_; }
  const std::vector<Scalar>& bids() const { return bids_; }
  const std::optional<Scalar>& x_star() const { return x_star_; }
  const std::string& underlying() const { return underlying_; }
  std::size_t size() const { return strikes_.size(); }

  OptionChain with_x_star(Scalar x) const { return OptionChain(strikes_, prices_, std::move(x), underlying_, bids_); }

 private:
  std::vector<Scalar> strikes_;
  std::vector<Scalar> prices_;
  std::vector<Scalar> bids_;
  std::optional<Scalar> x_star_;
  std::string underlying_;
};

/// Strikes that pass the butterfly spread condition, with their quotes.
/// `terminal` is x_star (the knot past the last strike) when known.
template <class Scalar>
struct EfficientStrikes {
  std::vector<Scalar> strikes;
  std::vector<Scalar> prices;
  std::vector<std::size_t> chain_index;
  std::optional<Scalar> terminal;

  std::size_t size() const { return strikes.size(); }
};

namespace detail {

template <class Scalar>
Scalar scaled_tolerance(const Scalar& magnitude) {
  return Tolerance<Scalar>::feasibility() * (Scalar(1) + abs_value(magnitude));
}

template <class Scalar>
Scalar interpolate(const Scalar& x0, const Scalar& y0, const Scalar& x1, const Scalar& y1, const Scalar& x) {
  return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
}

}  // namespace detail

/// Butterfly filter. A strike is kept iff its quote does not exceed the
/// cheapest convex combination of quotes whose strikes average at most
/// that strike, i.e. iff it lies on the lower convex nonincreasing
/// envelope of the quotes. When x_star is known the point (x_star, 0) joins
/// the quote set, since a CALL struck at x_star is worthless. Ties count as
/// efficient.
template <class Scalar>
EfficientStrikes<Scalar> efficient_strikes(const OptionChain<Scalar>& chain) {
  struct Point {
    Scalar x, y;
  };
  std::vector<Point> points;
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    if (chain.x_star() && !(chain.strikes()[i] < *chain.x_star())) break;
    points.push_back({chain.strikes()[i], chain.prices()[i]});
    rows.push_back(i);
  }
  const std::size_t quoted = points.size();
  if (chain.x_star()) points.push_back({*chain.x_star(), Scalar(0)});

  // Lower convex hull (monotone chain), then flattened after its minimum.
  std::vector<Point> hull;
  for (const auto& p : points) {
    while (hull.size() >= 2) {
      const Point& o = hull[hull.size() - 2];
      const Point& a = hull.back();
      const Scalar cross = (a.x - o.x) * (p.y - o.y) - (a.y - o.y) * (p.x - o.x);
      if (cross > Scalar(0)) break;
      hull.pop_back();
    }
    hull.push_back(p);
  }
  std::size_t lowest = 0;
  for (std::size_t h = 1; h < hull.size(); ++h)
    if (hull[h].y < hull[lowest].y) lowest = h;

  auto envelope = [&](const Scalar& x) {
    if (!(x < hull[lowest].x)) return hull[lowest].y;
    std::size_t h = 0;
    while (h + 1 < hull.size() && hull[h + 1].x < x) ++h;
    if (h + 1 >= hull.size() || hull[h].x == x) return hull[h].y;
    return detail::interpolate(hull[h].x, hull[h].y, hull[h + 1].x, hull[h + 1].y, x);
  };

  EfficientStrikes<Scalar> out;
  out.terminal = chain.x_star();
  for (std::size_t i = 0; i < quoted; ++i) {
    const Scalar env = envelope(points[i].x);
    if (points[i].y <= env + detail::scaled_tolerance(env)) {
      out.strikes.push_back(points[i].x);
      out.prices.push_back(points[i].y);
      out.chain_index.push_back(rows[i]);
    }
  }
  return out;
}

/// Member of the payoff class Gamma: g(0) = 0, g >= 0, convex, at most
/// linear growth. The evaluator is a plain function of the underlying.
template <class Scalar>
struct ConvexPayoff {
  std::function<Scalar(const Scalar&)> evaluate;
  std::string label;

  Scalar operator()(const Scalar& x) const { return evaluate(x); }

  static ConvexPayoff call(Scalar strike) {
    std::ostringstream os;
    os << "call(" << strike << ")";
    return {[strike](const Scalar& x) { return positive_part(Scalar(x - strike)); }, os.str()};
  }

  /// Convex piecewise-linear payoff: slope `slopes[i]` on [kinks[i], kinks[i+1]),
  /// starting from g(0) = 0 at kinks[0] = 0.
  static ConvexPayoff piecewise_linear(std::vector<Scalar> kinks, std::vector<Scalar> slopes) {
    if (kinks.empty() || kinks.size() != slopes.size() || kinks.front() != Scalar(0))
      throw ValidationError("payoff", "piecewise-linear payoff needs matching kinks/slopes starting at 0");
    return {[kinks = std::move(kinks), slopes = std::move(slopes)](const Scalar& x) {
              Scalar value(0);
              for (std::size_t i = 0; i < kinks.size(); ++i) {
                const Scalar end = i + 1 < kinks.size() ? kinks[i + 1] : x;
                if (!(x > kinks[i])) break;
                const Scalar stop = x < end ? x : end;
                value += slopes[i] * (stop - kinks[i]);
              }
              return value;
            },
            "piecewise-linear"};
  }

  /// Sampled membership test on `grid` (and midpoints of consecutive grid
  /// points). Returns a description of the first violation.
  std::optional<std::string> membership_violation(const std::vector<Scalar>& grid) const {
    std::vector<Scalar> xs{Scalar(0)};
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Scalar prev = xs.back();
      if (grid[i] > prev) {
        xs.push_back((prev + grid[i]) / Scalar(2));
        xs.push_back(grid[i]);
      }
    }
    const Scalar g0 = evaluate(Scalar(0));
    if (abs_value(g0) > detail::scaled_tolerance(Scalar(0))) return "g(0) != 0";
    std::vector<Scalar> ys;
    for (const auto& x : xs) {
      ys.push_back(evaluate(x));
      if (!is_finite(ys.back())) return "non-finite value";
      if (ys.back() < -detail::scaled_tolerance(ys.back())) return "negative value";
    }
    for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
      const Scalar left = (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1]);
      const Scalar right = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
      if (right < left - detail::scaled_tolerance(left)) {
        std::ostringstream os;
        os << "not convex near x = " << xs[i];
        return os.str();
      }
    }
    return std::nullopt;
  }
};

/// Exact superhedge of g(X) by long CALLs on the efficient strikes:
/// weights w = D^{-1} g by forward substitution and the dual prices b with
/// b' D = q'.
template <class Scalar>
struct HedgeSolution {
  std::vector<Scalar> strikes;  // j_0 .. j_I
  Scalar terminal;              // j_{I+1} = x_star
  Vector<Scalar> weights;       // w, one per strike
  Vector<Scalar> duals;         // b, dual mass at j_1 .. j_{I+1}
  Vector<Scalar> targets;       // g(j_1) .. g(j_{I+1})
  Scalar cost;                  // q' w

  /// Lower-triangular payoff matrix, D(n-1, i) = (j_n - j_i)^+ for
  /// knots j_1 .. j_{I+1}.
  Matrix<Scalar> matrix() const { return payoff_matrix(strikes, terminal); }

  static Matrix<Scalar> payoff_matrix(const std::vector<Scalar>& strikes, const Scalar& terminal) {
    const Index n = static_cast<Index>(strikes.size());
    Matrix<Scalar> d = Matrix<Scalar>::Zero(n, n);
    for (Index r = 0; r < n; ++r) {
      const Scalar knot = r + 1 < n ? strikes[static_cast<std::size_t>(r + 1)] : terminal;
      for (Index c = 0; c <= r; ++c) d(r, c) = knot - strikes[static_cast<std::size_t>(c)];
    }
    return d;
  }
};

template <class Scalar>
HedgeSolution<Scalar> hedge_convex(const EfficientStrikes<Scalar>& J, const ConvexPayoff<Scalar>& g) {
  if (J.size() == 0) throw ValidationError("strikes", "no efficient strikes to hedge with");
  if (!J.terminal) throw ValidationError("x_star", "hedging needs the supremum of the underlying (x_star)");
  const auto& j = J.strikes;
  const Scalar& top = *J.terminal;
  if (!(top > j.back())) throw ValidationError("x_star", "x_star must exceed every efficient strike");

  std::vector<Scalar> knots(j.begin() + 1, j.end());
  knots.push_back(top);
  if (auto bad = g.membership_violation(knots))
    throw ValidationError("payoff", "payoff '" + g.label + "' is not in the convex class: " + *bad);

  const std::size_t I = j.size() - 1;
  HedgeSolution<Scalar> h;
  h.strikes = j;
  h.terminal = top;
  h.targets.resize(static_cast<Index>(I + 1));
  for (std::size_t n = 0; n <= I; ++n) h.targets(static_cast<Index>(n)) = g(knots[n]);
  auto knot = [&](std::size_t n) { return n <= I ? j[n] : top; };  // j_0 .. j_{I+1}
  auto gk = [&](std::size_t n) { return n == 0 ? Scalar(0) : h.targets(static_cast<Index>(n - 1)); };

  // Forward substitution: w_0 + ... + w_{n-1} equals the slope of g on
  // [j_{n-1}, j_n] for n = 1..I; the last row is sum_i w_i (x_star - j_i) = g(x_star).
  h.weights.resize(static_cast<Index>(I + 1));
  Scalar running(0);
  for (std::size_t n = 1; n <= I; ++n) {
    const Scalar slope = (gk(n) - gk(n - 1)) / (knot(n) - knot(n - 1));
    h.weights(static_cast<Index>(n - 1)) = slope - running;
    running = slope;
  }
  Scalar terminal_row = gk(I + 1);
  for (std::size_t i = 0; i < I; ++i) terminal_row -= h.weights(static_cast<Index>(i)) * (top - j[i]);
  h.weights(static_cast<Index>(I)) = terminal_row / (top - j[I]);

  // Dual prices: b_I (x_star - j_I) = q(j_I) and, for n = I-1..0,
  // b_I + b_n + ... + b_{I-1} = (q(j_n) - q(j_{n+1})) / (j_{n+1} - j_n).
  const auto& q = J.prices;
  h.duals.resize(static_cast<Index>(I + 1));
  h.duals(static_cast<Index>(I)) = q[I] / (top - j[I]);
  Scalar tail = h.duals(static_cast<Index>(I));
  for (std::size_t n = I; n-- > 0;) {
    const Scalar b = (q[n] - q[n + 1]) / (j[n + 1] - j[n]) - tail;
    h.duals(static_cast<Index>(n)) = b;
    tail += b;
  }

  Scalar scale(0);
  for (const auto& v : q) scale += abs_value(v);
  const Scalar tol = detail::scaled_tolerance(scale);
  for (Index i = 0; i <= static_cast<Index>(I); ++i) {
    if (h.weights(i) < -detail::scaled_tolerance(h.weights(i)))
      throw std::logic_error("hedge_convex: negative hedge weight for a convex payoff");
    if (h.duals(i) < -tol)
      throw ValidationError("strikes", "dual prices went negative: the strikes violate the butterfly spread condition");
    // Rounding residue of exact zeros; the true values are nonnegative.
    if (h.weights(i) < Scalar(0)) h.weights(i) = Scalar(0);
    if (h.duals(i) < Scalar(0)) h.duals(i) = Scalar(0);
  }

  h.cost = Scalar(0);
  for (std::size_t i = 0; i <= I; ++i) h.cost += h.weights(static_cast<Index>(i)) * q[i];

  const Vector<Scalar> reproduced = h.matrix().transpose() * h.duals;
  for (std::size_t i = 0; i <= I; ++i)
    if (abs_value(Scalar(reproduced(static_cast<Index>(i)) - q[i])) > tol)
      throw std::logic_error("hedge_convex: dual prices do not reproduce the quotes");
  return h;
}

/// True iff F = sum_i weights_i (x - j_i)^+ dominates g at every knot
/// j_1 .. j_I and at x_star; for convex g this is payoff dominance.
template <class Scalar>
bool dominance_check(const EfficientStrikes<Scalar>& J, const Vector<Scalar>& weights, const ConvexPayoff<Scalar>& g) {
  if (!J.terminal) throw ValidationError("x_star", "dominance needs the supremum of the underlying (x_star)");
  if (weights.size() != static_cast<Index>(J.size())) throw ValidationError("weights", "one weight per efficient strike");
  std::vector<Scalar> knots(J.strikes.begin() + 1, J.strikes.end());
  knots.push_back(*J.terminal);
  for (const auto& x : knots) {
    Scalar f(0);
    for (std::size_t i = 0; i < J.size(); ++i) f += weights(static_cast<Index>(i)) * positive_part(Scalar(x - J.strikes[i]));
    const Scalar target = g(x);
    if (f < target - detail::scaled_tolerance(target)) return false;
  }
  return true;
}

/// Piecewise-linear convex nonincreasing curve on a strike grid. Beyond the
/// last knot the curve is flat, so slopes.back() == 0.
template <class Scalar>
class CallCurve {
 public:
  CallCurve(std::vector<Scalar> knots, std::vector<Scalar> values, bool terminal)
      : knots_(std::move(knots)), values_(std::move(values)), terminal_(terminal) {
    if (knots_.empty() || knots_.size() != values_.size()) throw ValidationError("curve", "knots and values must match");
    slopes_.resize(knots_.size());
    for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
      if (!(knots_[i + 1] > knots_[i])) throw ValidationError("curve", "knots must be strictly increasing");
      slopes_[i] = (values_[i + 1] - values_[i]) / (knots_[i + 1] - knots_[i]);
    }
    slopes_.back() = Scalar(0);
    validate();
  }

  const std::vector<Scalar>& knots() const { return knots_; }
  const std::vector<Scalar>& values() const { return values_; }
  /// Right derivative at each knot.
  const std::vector<Scalar>& slopes() const { return slopes_; }
  /// Whether the last knot is x_star, where the curve reaches its limit.
  bool terminal() const { return terminal_; }

  Scalar value_at(const Scalar& t) const {
    if (!(t > knots_.front())) return values_.front();
    for (std::size_t i = 0; i + 1 < knots_.size(); ++i)
      if (t < knots_[i + 1]) return values_[i] + slopes_[i] * (t - knots_[i]);
    return values_.back();
  }

 private:
  void validate() const {
    for (std::size_t i = 0; i < values_.size(); ++i)
      if (values_[i] < -detail::scaled_tolerance(values_[i])) throw ValidationError("curve", "negative value");
    for (std::size_t i = 0; i + 1 < slopes_.size(); ++i) {
      if (slopes_[i] > detail::scaled_tolerance(slopes_[i])) {
        std::ostringstream os;
        os << "curve increases between t = " << knots_[i] << " and t = " << knots_[i + 1];
        throw ValidationError("curve", os.str());
      }
      if (i > 0 && slopes_[i] < slopes_[i - 1] - detail::scaled_tolerance(slopes_[i - 1])) {
        std::ostringstream os;
        os << "curve is not convex on the triple t = (" << knots_[i - 1] << ", " << knots_[i] << ", "
           << knots_[i + 1] << ")";
        throw ValidationError("curve", os.str());
      }
    }
  }

  std::vector<Scalar> knots_;
  std::vector<Scalar> values_;
  std::vector<Scalar> slopes_;
  bool terminal_;
};

/// The standard family g_t(x) = (x - t)^+.
struct StandardCalls {};

/// A custom family t -> g_t evaluated on `grid`. It must satisfy
/// g_t <= a g_{t1} + (1 - a) g_{t2} whenever t >= a t1 + (1 - a) t2.
template <class Scalar>
struct CustomFamily {
  std::vector<Scalar> grid;
  std::function<ConvexPayoff<Scalar>(const Scalar&)> member;
};

template <class Scalar>
using PayoffFamily = std::variant<StandardCalls, CustomFamily<Scalar>>;

namespace detail {

// Local form of the family condition on consecutive grid points: pointwise
// nonincreasing in t and convex in t at every sample x.
template <class Scalar>
void validate_family(const CustomFamily<Scalar>& family, const std::vector<Scalar>& xs) {
  const auto& t = family.grid;
  std::vector<std::vector<Scalar>> v;
  for (const auto& ti : t) {
    const auto g = family.member(ti);
    std::vector<Scalar> row;
    for (const auto& x : xs) row.push_back(g(x));
    v.push_back(std::move(row));
  }
  for (std::size_t i = 1; i < t.size(); ++i) {
    for (std::size_t k = 0; k < xs.size(); ++k) {
      if (v[i][k] > v[i - 1][k] + scaled_tolerance(v[i - 1][k])) {
        std::ostringstream os;
        os << "family increases from t = " << t[i - 1] << " to t = " << t[i] << " at x = " << xs[k];
        throw ValidationError("family", os.str());
      }
      if (i + 1 < t.size()) {
        const Scalar a = (t[i + 1] - t[i]) / (t[i + 1] - t[i - 1]);
        const Scalar mix = a * v[i - 1][k] + (Scalar(1) - a) * v[i + 1][k];
        if (v[i][k] > mix + scaled_tolerance(mix)) {
          std::ostringstream os;
          os << "family violates convexity in t on (" << t[i - 1] << ", " << t[i] << ", " << t[i + 1] << ") at x = " << xs[k];
          throw ValidationError("family", os.str());
        }
      }
    }
  }
}

}  // namespace detail

/// CALL function t -> q^G(t): the exact superhedging cost of g_t.
template <class Scalar>
CallCurve<Scalar> call_curve(const EfficientStrikes<Scalar>& J, const PayoffFamily<Scalar>& family = StandardCalls{}) {
  if (!J.terminal) throw ValidationError("x_star", "the CALL function needs the supremum of the underlying (x_star)");
  const Scalar top = *J.terminal;
  std::vector<Scalar> knots;
  std::vector<Scalar> values;
  bool terminal = false;
  if (std::holds_alternative<StandardCalls>(family)) {
    knots = J.strikes;
    for (const auto& t : J.strikes) values.push_back(hedge_convex(J, ConvexPayoff<Scalar>::call(t)).cost);
    knots.push_back(top);
    values.push_back(Scalar(0));
    terminal = true;
  } else {
    const auto& custom = std::get<CustomFamily<Scalar>>(family);
    if (custom.grid.empty()) throw ValidationError("family", "empty grid");
    std::vector<Scalar> xs(J.strikes.begin() + 1, J.strikes.end());
    xs.push_back(top);
    detail::validate_family(custom, xs);
    knots = custom.grid;
    for (const auto& t : custom.grid) values.push_back(hedge_convex(J, custom.member(t)).cost);
    terminal = !(knots.back() < top) && values.back() == Scalar(0);
  }
  return CallCurve<Scalar>(std::move(knots), std::move(values), terminal);
}

/// The efficient quotes themselves, truncated at the largest strike.
template <class Scalar>
CallCurve<Scalar> quoted_curve(const EfficientStrikes<Scalar>& J) {
  return CallCurve<Scalar>(J.strikes, J.prices, false);
}

template <class Scalar>
struct BubbleEstimate {
  Scalar lower;
  Scalar upper;
  std::optional<Scalar> point;
  std::string method;
};

/// Limit of the CALL function as the strike grows. Exact for curves that
/// reach x_star. For truncated quotes only the bounds are contractual; the
/// point estimate extrapolates the last chord slope with geometric decay.
template <class Scalar>
BubbleEstimate<Scalar> bubble_estimate(const CallCurve<Scalar>& curve, bool quoted_only = false) {
  const auto& v = curve.values();
  const auto& s = curve.slopes();
  const Scalar last = v.back();
  if (curve.terminal() && !quoted_only) return {last, last, last, "terminal"};
  const std::size_t n = v.size();
  if (n < 2) return {Scalar(0), last, std::nullopt, "bounds-only"};
  const Scalar s_last = s[n - 2];
  if (abs_value(s_last) <= detail::scaled_tolerance(Scalar(0))) return {last, last, last, "flat-tail"};
  if (n < 3) return {Scalar(0), last, std::nullopt, "bounds-only"};
  const Scalar s_prev = s[n - 3];
  const Scalar r = s_last / s_prev;
  Scalar point(0);
  if (r < Scalar(1)) {
    const Scalar step = curve.knots()[n - 1] - curve.knots()[n - 2];
    point = last + s_last * step * r / (Scalar(1) - r);
    if (point < Scalar(0)) point = Scalar(0);
  }
  return {Scalar(0), last, point, "geometric-slope-decay"};
}

/// Measure implied by a convex nonincreasing curve: survival function
/// nu(x > t) = -(right slope) and atoms at the slope jumps.
template <class Scalar>
struct ImpliedMeasure {
  std::vector<Scalar> knots;
  std::vector<Scalar> survival;  // on [knots[i], knots[i+1]); last entry beyond
  std::vector<std::pair<Scalar, Scalar>> atoms;
  Scalar total_mass;
  BubbleEstimate<Scalar> bubble;
  Scalar reconstruction_error;  // max |curve - (tail level + integral of survival)|

  Scalar survival_at(const Scalar& t) const {
    if (t < knots.front()) return total_mass;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i)
      if (t < knots[i + 1]) return survival[i];
    return survival.back();
  }

  /// Integral of the survival function from t to infinity.
  Scalar tail_integral(const Scalar& t) const {
    Scalar total(0);
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
      const Scalar lo = t > knots[i] ? t : knots[i];
      if (lo < knots[i + 1]) total += survival[i] * (knots[i + 1] - lo);
    }
    return total;
  }
};

template <class Scalar>
ImpliedMeasure<Scalar> implied_measure(const CallCurve<Scalar>& curve) {
  ImpliedMeasure<Scalar> m;
  m.knots = curve.knots();
  const auto& s = curve.slopes();
  for (const auto& slope : s) m.survival.push_back(-slope);
  for (std::size_t i = 1; i < s.size(); ++i) {
    const Scalar jump = s[i] - s[i - 1];
    if (jump != Scalar(0)) m.atoms.emplace_back(m.knots[i], jump);
  }
  m.total_mass = m.survival.front();
  m.bubble = bubble_estimate(curve);
  m.reconstruction_error = Scalar(0);
  const Scalar level = curve.values().back();
  for (std::size_t i = 0; i < m.knots.size(); ++i) {
    const Scalar err = abs_value(Scalar(curve.values()[i] - level - m.tail_integral(m.knots[i])));
    if (err > m.reconstruction_error) m.reconstruction_error = err;
  }
  return m;
}

template <class Scalar>
struct NormBound {
  Scalar mass;
  std::optional<Scalar> bound;  // q(0) / eta; empty when eta <= 0 (vacuous)
  bool holds;
};

/// Total implied mass against q(0)/eta for an underlying bounded below by eta.
template <class Scalar>
NormBound<Scalar> norm_bound_check(const OptionChain<Scalar>& chain, const Scalar& eta) {
  const auto J = efficient_strikes(chain);
  const auto measure = implied_measure(call_curve(J));
  NormBound<Scalar> out{measure.total_mass, std::nullopt, true};
  if (eta > Scalar(0)) {
    out.bound = chain.prices().front() / eta;
    out.holds = measure.total_mass <= *out.bound + detail::scaled_tolerance(*out.bound);
  }
  return out;
}

}  // namespace coherent

#endif  // COHERENT_OPTION_CHAIN_HPP
