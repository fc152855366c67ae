#ifndef COHERENT_BLACK_SCHOLES_HPP
#define COHERENT_BLACK_SCHOLES_HPP

#include "coherent/option_chain.hpp"

#include <optional>
#include <string>
#include <vector>

namespace coherent {

struct BlackScholes {
  double spot;
  double rate;
  double sigma;
  double maturity;

  /// Throws ValidationError unless spot > 0, sigma > 0 and maturity > 0.
  void validate() const;
  double d2(double strike) const;
  /// Discounted call price; strike 0 gives the spot.
  double call(double strike) const;
  /// Risk-neutral survival e^{-rT} Phi(d2), the negative strike derivative
  /// of the call price. Strike 0 gives e^{-rT}.
  double survival(double strike) const;
};

double normal_cdf(double x);

/// Parses "lo:hi:step" into an inclusive grid.
std::vector<double> parse_grid(const std::string& text);

/// Synthetic chain priced by `model`, with the strike-0 row prepended when
/// the grid lacks it.
OptionChain<double> bs_chain(const BlackScholes& model, const std::vector<double>& strikes,
                             std::optional<double> x_star = std::nullopt);

}  // namespace coherent

#endif  // COHERENT_BLACK_SCHOLES_HPP
