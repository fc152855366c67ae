#include "coherent/random_market.hpp"

#include <cstdlib>
#include <string>

namespace coherent {

RandomMarket random_coherent_market(std::mt19937_64& rng, const RandomMarketOptions& options) {
  std::uniform_int_distribution<int> state_count(1, options.max_states);
  std::uniform_int_distribution<int> asset_count(1, options.max_assets);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const int n = state_count(rng);
  const int a = asset_count(rng);
  std::vector<std::string> labels;
  for (int s = 0; s < n; ++s) labels.push_back("w" + std::to_string(s + 1));
  StateSpace space(labels);

  std::vector<bool> negligible(static_cast<std::size_t>(n), false);
  if (options.negligible_states && n > 1) {
    for (int s = 0; s < n; ++s) negligible[static_cast<std::size_t>(s)] = unit(rng) < 0.2;
    negligible[static_cast<std::size_t>(std::uniform_int_distribution<int>(0, n - 1)(rng))] = false;
  }

  Vector<double> m = Vector<double>::Zero(n);
  for (int s = 0; s < n; ++s)
    if (!negligible[static_cast<std::size_t>(s)]) m(s) = 0.05 + unit(rng);
  m *= (0.5 + 0.5 * unit(rng)) / m.sum();

  Vector<double> x0(n);
  for (int s = 0; s < n; ++s) x0(s) = 0.5 + 0.5 * unit(rng);

  auto quotes = [&](double mid) {
    const double spread = options.max_spread * unit(rng) * (std::abs(mid) + 0.05);
    const double split = unit(rng);
    return std::pair{mid + split * spread, mid - (1.0 - split) * spread};
  };

  std::vector<Asset<double>> assets;
  {
    const auto [ask, bid] = quotes(m.sum());
    assets.push_back({"CASH", x0, std::max(ask, 1e-3), std::max(bid, 0.0), "cash"});
  }
  std::vector<Strategy> generators;
  for (int i = 1; i < a; ++i) {
    Vector<double> payoff(n);
    for (int s = 0; s < n; ++s) payoff(s) = 4.0 * unit(rng) - 1.0;
    const double mid = m.dot(Vector<double>(payoff.cwiseQuotient(x0)));
    const auto [ask, bid] = quotes(mid);
    const std::string ticker = "A" + std::to_string(i);
    assets.push_back({ticker, payoff, ask, bid, "risky"});
    const double side = unit(rng);
    if (side < 0.7) generators.push_back(Strategy::unit(ticker, 1.0 + unit(rng)));
    if (side > 0.3) generators.push_back(Strategy::unit(ticker, -(1.0 + unit(rng))));
  }
  if (a > 2 && unit(rng) < 0.5) generators.push_back(Strategy{{"A1", 1.0}, {"A2", -1.0}});

  Market market(space, std::move(assets), {{"cash", 0.0}, {"risky", 0.0}}, "CASH", std::move(generators));
  return {std::move(market), OrderModel(space, negligible), m};
}

std::uint64_t seed_from_environment(std::uint64_t fallback) {
  const char* env = std::getenv("COHERENT_MARKETS_SEED");
  if (!env || !*env) return fallback;
  char* end = nullptr;
  const auto v = std::strtoull(env, &end, 10);
  return (end && *end == '\0') ? v : fallback;
}

}  // namespace coherent
