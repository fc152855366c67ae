#ifndef COHERENT_MARKET_HPP
#define COHERENT_MARKET_HPP

#include "coherent/scalar.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace coherent {

/// Ordered, finite set of state labels.
class StateSpace {
 public:
  StateSpace() = default;

  explicit StateSpace(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.empty()) throw ValidationError("states", "state space must contain at least one state");
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (!index_.emplace(labels_[i], static_cast<Index>(i)).second)
        throw ValidationError("states[" + std::to_string(i) + "]", "duplicate state label '" + labels_[i] + "'");
    }
  }

  Index size() const { return static_cast<Index>(labels_.size()); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(Index i) const { return labels_.at(static_cast<std::size_t>(i)); }

  std::optional<Index> find(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  Index index_of(const std::string& label) const {
    auto i = find(label);
    if (!i) throw ValidationError("", "unknown state '" + label + "'");
    return *i;
  }

  friend bool operator==(const StateSpace& a, const StateSpace& b) { return a.labels_ == b.labels_; }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, Index> index_;
};

template <class Scalar>
struct Asset {
  std::string ticker;
  Vector<Scalar> payoff;
  Scalar ask;
  Scalar bid;
  std::string group;
};

/// Finite-support position map, ticker -> units held (negative = short).
template <class Scalar>
class BasicStrategy {
 public:
  using Positions = std::map<std::string, Scalar>;

  BasicStrategy() = default;
  BasicStrategy(std::initializer_list<std::pair<const std::string, Scalar>> init) : positions_(init) { prune(); }
  explicit BasicStrategy(Positions positions) : positions_(std::move(positions)) { prune(); }

  static BasicStrategy unit(const std::string& ticker, Scalar size = Scalar(1)) {
    return BasicStrategy(Positions{{ticker, size}});
  }

  const Positions& positions() const { return positions_; }
  bool empty() const { return positions_.empty(); }

  Scalar operator[](const std::string& ticker) const {
    auto it = positions_.find(ticker);
    return it == positions_.end() ? Scalar(0) : it->second;
  }

  BasicStrategy& operator+=(const BasicStrategy& other) {
    for (const auto& [ticker, size] : other.positions_) positions_[ticker] += size;
    prune();
    return *this;
  }

  BasicStrategy& operator*=(const Scalar& factor) {
    for (auto& entry : positions_) entry.second *= factor;
    prune();
    return *this;
  }

  friend BasicStrategy operator+(BasicStrategy a, const BasicStrategy& b) { return a += b; }
  friend BasicStrategy operator-(BasicStrategy a, const BasicStrategy& b) { return a += Scalar(-1) * b; }
  friend BasicStrategy operator*(const Scalar& factor, BasicStrategy a) { return a *= factor; }
  friend bool operator==(const BasicStrategy& a, const BasicStrategy& b) { return a.positions_ == b.positions_; }

 private:
  void prune() {
    std::erase_if(positions_, [](const auto& entry) { return entry.second == Scalar(0); });
  }

  Positions positions_;
};

/// A frictional market on a finite state space: assets with bid/ask quotes,
/// per-group fixed fees, a numeraire and the generators of the admissible
/// set.
///
/// The admissible set is the convex hull of the generators and the origin,
/// plus the ray of long numeraire positions. Only its cone (all nonnegative
/// combinations of generators and the numeraire) is needed for pricing.
template <class Scalar>
class BasicMarket {
 public:
  using AssetType = Asset<Scalar>;
  using Strategy = BasicStrategy<Scalar>;

  BasicMarket(StateSpace space, std::vector<AssetType> assets, std::map<std::string, Scalar> fees,
              std::string numeraire, std::vector<Strategy> generators)
      : space_(std::move(space)),
        assets_(std::move(assets)),
        fees_(std::move(fees)),
        generators_(std::move(generators)) {
    validate_assets();
    auto it = ticker_index_.find(numeraire);
    if (it == ticker_index_.end())
      throw ValidationError("numeraire", "numeraire '" + numeraire + "' is not a listed asset");
    numeraire_ = it->second;
    validate_numeraire();
    validate_generators();
    build_matrices();
  }

  const StateSpace& space() const { return space_; }
  const std::vector<AssetType>& assets() const { return assets_; }
  const AssetType& asset(Index i) const { return assets_.at(static_cast<std::size_t>(i)); }
  Index asset_count() const { return static_cast<Index>(assets_.size()); }
  const std::map<std::string, Scalar>& fees() const { return fees_; }
  const std::vector<Strategy>& generators() const { return generators_; }

  Index numeraire_index() const { return numeraire_; }
  const AssetType& numeraire() const { return asset(numeraire_); }
  const Vector<Scalar>& numeraire_payoff() const { return numeraire().payoff; }
  /// q0, the cost of one unit of the numeraire.
  const Scalar& numeraire_price() const { return numeraire().ask; }

  std::optional<Index> find_asset(const std::string& ticker) const {
    auto it = ticker_index_.find(ticker);
    if (it == ticker_index_.end()) return std::nullopt;
    return it->second;
  }

  Index asset_index(const std::string& ticker) const {
    auto i = find_asset(ticker);
    if (!i) throw ValidationError("", "unknown ticker '" + ticker + "'");
    return *i;
  }

  /// states x assets matrix of raw payoffs.
  const Matrix<Scalar>& payoffs() const { return payoffs_; }
  /// states x assets matrix of payoffs divided by the numeraire payoff.
  const Matrix<Scalar>& discounted_payoffs() const { return discounted_; }
  /// assets x (generators + 1) matrix; column j is generator j and the
  /// last column is one unit of the numeraire.
  const Matrix<Scalar>& cone_generators() const { return cone_; }

  Vector<Scalar> asks() const {
    Vector<Scalar> v(asset_count());
    for (Index i = 0; i < asset_count(); ++i) v(i) = asset(i).ask;
    return v;
  }

  Vector<Scalar> bids() const {
    Vector<Scalar> v(asset_count());
    for (Index i = 0; i < asset_count(); ++i) v(i) = asset(i).bid;
    return v;
  }

  /// Dense position vector of a strategy; unknown tickers are rejected.
  Vector<Scalar> positions(const Strategy& theta) const {
    Vector<Scalar> v = Vector<Scalar>::Zero(asset_count());
    for (const auto& [ticker, size] : theta.positions()) {
      auto i = find_asset(ticker);
      if (!i) throw ValidationError("strategy", "unknown ticker '" + ticker + "'");
      if (!is_finite(size)) throw ValidationError("strategy." + ticker, "position must be finite");
      v(*i) = size;
    }
    return v;
  }

  Strategy strategy(const Vector<Scalar>& positions) const {
    typename Strategy::Positions map;
    for (Index i = 0; i < asset_count(); ++i)
      if (positions(i) != Scalar(0)) map.emplace(asset(i).ticker, positions(i));
    return Strategy(std::move(map));
  }

  Scalar fee(const std::string& group) const {
    auto it = fees_.find(group);
    return it == fees_.end() ? Scalar(0) : it->second;
  }

 private:
  void validate_assets() {
    if (assets_.empty()) throw ValidationError("assets", "market must list at least one asset");
    for (const auto& [group, fee] : fees_) {
      if (!is_finite(fee) || fee < Scalar(0))
        throw ValidationError("fees." + group, "fixed fee must be a finite nonnegative number");
    }
    for (std::size_t i = 0; i < assets_.size(); ++i) {
      const auto& a = assets_[i];
      const std::string where = "assets[" + std::to_string(i) + "]";
      if (a.ticker.empty()) throw ValidationError(where + ".ticker", "ticker must be non-empty");
      if (!ticker_index_.emplace(a.ticker, static_cast<Index>(i)).second)
        throw ValidationError(where + ".ticker", "duplicate ticker '" + a.ticker + "'");
      if (a.payoff.size() != space_.size())
        throw ValidationError(where + ".payoff", "payoff has " + std::to_string(a.payoff.size()) +
                                                     " entries but the state space has " +
                                                     std::to_string(space_.size()));
      for (Index s = 0; s < a.payoff.size(); ++s)
        if (!is_finite(a.payoff(s))) throw ValidationError(where + ".payoff", "payoff entries must be finite");
      if (!is_finite(a.ask) || !is_finite(a.bid)) throw ValidationError(where, "quotes must be finite");
      if (a.ask < a.bid)
        throw ValidationError(where, "ask " + std::to_string(to_double(a.ask)) + " is below bid " +
                                         std::to_string(to_double(a.bid)) +
                                         " (bid/ask assumption: ask >= bid for every asset)");
      if (fees_.find(a.group) == fees_.end())
        throw ValidationError(where + ".group", "no fee declared for market group '" + a.group + "'");
    }
  }

  void validate_numeraire() {
    const auto& num = numeraire();
    for (Index s = 0; s < num.payoff.size(); ++s) {
      if (!(num.payoff(s) > Scalar(0)) || num.payoff(s) > Scalar(1))
        throw ValidationError("numeraire", "numeraire payoff must satisfy 0 < X0 <= 1 in every state (violated in state '" +
                                               space_.label(s) + "')");
    }
    if (!(num.ask > Scalar(0)))
      throw ValidationError("numeraire", "numeraire price q0 must be strictly positive");
    if (fee(num.group) != Scalar(0))
      throw ValidationError("fees." + num.group, "the numeraire's market group must carry no fixed fee");
  }

  void validate_generators() {
    const std::string& num = numeraire().ticker;
    for (std::size_t g = 0; g < generators_.size(); ++g) {
      const std::string where = "generators[" + std::to_string(g) + "]";
      for (const auto& [ticker, size] : generators_[g].positions()) {
        if (ticker_index_.find(ticker) == ticker_index_.end())
          throw ValidationError(where, "unknown ticker '" + ticker + "'");
        if (!is_finite(size)) throw ValidationError(where, "weights must be finite");
        if (ticker == num && size < Scalar(0))
          throw ValidationError(where, "short numeraire positions are not admissible");
      }
    }
  }

  void build_matrices() {
    const Index n = space_.size();
    const Index a = asset_count();
    payoffs_.resize(n, a);
    for (Index j = 0; j < a; ++j) payoffs_.col(j) = asset(j).payoff;
    discounted_.resize(n, a);
    const Vector<Scalar>& x0 = numeraire_payoff();
    for (Index s = 0; s < n; ++s)
      for (Index j = 0; j < a; ++j) discounted_(s, j) = payoffs_(s, j) / x0(s);
    const Index g = static_cast<Index>(generators_.size());
    cone_ = Matrix<Scalar>::Zero(a, g + 1);
    for (Index j = 0; j < g; ++j) cone_.col(j) = positions(generators_[static_cast<std::size_t>(j)]);
    cone_(numeraire_, g) = Scalar(1);
  }

  StateSpace space_;
  std::vector<AssetType> assets_;
  std::map<std::string, Scalar> fees_;
  std::vector<Strategy> generators_;
  std::unordered_map<std::string, Index> ticker_index_;
  Index numeraire_ = 0;
  Matrix<Scalar> payoffs_;
  Matrix<Scalar> discounted_;
  Matrix<Scalar> cone_;
};

using Market = BasicMarket<double>;
using Strategy = BasicStrategy<double>;

// X(theta) = sum_a theta(a) X(a)
template <class Scalar>
Vector<Scalar> portfolio_payoff(const BasicMarket<Scalar>& market, const BasicStrategy<Scalar>& theta) {
  return market.payoffs() * market.positions(theta);
}

template <class Scalar>
Vector<Scalar> discounted_payoff(const BasicMarket<Scalar>& market, const BasicStrategy<Scalar>& theta) {
  return market.discounted_payoffs() * market.positions(theta);
}

/// Spread cost of a dense position vector: longs pay the ask, shorts
/// receive the bid.
template <class Scalar>
Scalar trade_cost(const BasicMarket<Scalar>& market, const Vector<Scalar>& positions) {
  Scalar cost(0);
  for (Index i = 0; i < market.asset_count(); ++i) {
    const auto& a = market.asset(i);
    cost += positive_part(positions(i)) * a.ask - negative_part(positions(i)) * a.bid;
  }
  return cost;
}

template <class Scalar>
Scalar trade_cost(const BasicMarket<Scalar>& market, const BasicStrategy<Scalar>& theta) {
  return trade_cost(market, market.positions(theta));
}

/// Sum of the fees of every market group touched by the positions.
template <class Scalar>
Scalar fixed_cost(const BasicMarket<Scalar>& market, const Vector<Scalar>& positions) {
  std::set<std::string> touched;
  for (Index i = 0; i < market.asset_count(); ++i)
    if (positions(i) != Scalar(0)) touched.insert(market.asset(i).group);
  Scalar cost(0);
  for (const auto& group : touched) cost += market.fee(group);
  return cost;
}

template <class Scalar>
Scalar fixed_cost(const BasicMarket<Scalar>& market, const BasicStrategy<Scalar>& theta) {
  return fixed_cost(market, market.positions(theta));
}

template <class Scalar>
Scalar total_cost(const BasicMarket<Scalar>& market, const Vector<Scalar>& positions) {
  return trade_cost(market, positions) + fixed_cost(market, positions);
}

template <class Scalar>
Scalar total_cost(const BasicMarket<Scalar>& market, const BasicStrategy<Scalar>& theta) {
  return total_cost(market, market.positions(theta));
}

}  // namespace coherent

#endif  // COHERENT_MARKET_HPP
