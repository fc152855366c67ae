#include "coherent/black_scholes.hpp"

#include <cmath>
#include <sstream>

namespace coherent {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

void BlackScholes::validate() const {
  if (!(spot > 0.0) || !std::isfinite(spot)) throw ValidationError("s0", "spot must be positive");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ValidationError("sigma", "volatility must be positive");
  if (!(maturity > 0.0) || !std::isfinite(maturity)) throw ValidationError("t", "maturity must be positive");
  if (!std::isfinite(rate)) throw ValidationError("r", "rate must be finite");
}

double BlackScholes::d2(double strike) const {
  const double vol = sigma * std::sqrt(maturity);
  return (std::log(spot / strike) + (rate - 0.5 * sigma * sigma) * maturity) / vol;
}

double BlackScholes::call(double strike) const {
  if (strike <= 0.0) return spot;
  const double d = d2(strike);
  const double d1 = d + sigma * std::sqrt(maturity);
  return spot * normal_cdf(d1) - strike * std::exp(-rate * maturity) * normal_cdf(d);
}

double BlackScholes::survival(double strike) const {
  const double discount = std::exp(-rate * maturity);
  if (strike <= 0.0) return discount;
  return discount * normal_cdf(d2(strike));
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> parts;
  std::stringstream in(text);
  std::string token;
  while (std::getline(in, token, ':')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != token.size()) throw ValidationError("grid", "expected lo:hi:step, got '" + text + "'");
    parts.push_back(v);
  }
  if (parts.size() != 3) throw ValidationError("grid", "expected lo:hi:step, got '" + text + "'");
  const double lo = parts[0], hi = parts[1], step = parts[2];
  if (!(step > 0.0) || hi < lo || lo < 0.0) throw ValidationError("grid", "need 0 <= lo <= hi and step > 0");
  const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  if (count > 10'000'000) throw ValidationError("grid", "grid too large");
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(count + 1));
  for (long i = 0; i <= count; ++i) grid.push_back(lo + static_cast<double>(i) * step);
  return grid;
}

OptionChain<double> bs_chain(const BlackScholes& model, const std::vector<double>& strikes,
                             std::optional<double> x_star) {
  model.validate();
  std::vector<double> k;
  if (strikes.empty() || strikes.front() != 0.0) k.push_back(0.0);
  k.insert(k.end(), strikes.begin(), strikes.end());
  std::vector<double> q;
  q.reserve(k.size());
  for (double strike : k) q.push_back(model.call(strike));
  return OptionChain<double>(std::move(k), std::move(q), x_star, "BS");
}

}  // namespace coherent
