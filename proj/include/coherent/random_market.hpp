#ifndef COHERENT_RANDOM_MARKET_HPP
#define COHERENT_RANDOM_MARKET_HPP

#include "coherent/market.hpp"
#include "coherent/order.hpp"

#include <optional>
#include <random>

namespace coherent {

struct RandomMarketOptions {
  int max_states = 8;
  int max_assets = 6;  // including the numeraire
  double max_spread = 0.2;
  bool negligible_states = true;
};

struct RandomMarket {
  Market market;
  OrderModel order;
  /// The pricing measure the quotes were built around (zero off the support).
  Vector<double> witness_measure;
};

/// Coherent market by construction: a positive measure m on the support
/// fixes mid prices mid(a) = sum_s m(s) X̄(a)(s), and bid/ask straddle the
/// mid with relative spread up to `max_spread`. Generators are long,
/// short, or both for each risky asset.
RandomMarket random_coherent_market(std::mt19937_64& rng, const RandomMarketOptions& options = {});

/// Seed from COHERENT_MARKETS_SEED, or `fallback` when unset.
std::uint64_t seed_from_environment(std::uint64_t fallback);

}  // namespace coherent

#endif  // COHERENT_RANDOM_MARKET_HPP
