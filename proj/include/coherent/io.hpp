#ifndef COHERENT_IO_HPP
#define COHERENT_IO_HPP

#include "coherent/market.hpp"
#include "coherent/option_chain.hpp"
#include "coherent/order.hpp"

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace coherent {

/// File or parse failure unrelated to the financial content.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LoadedMarket {
  Market market;
  OrderModel order;
  std::vector<std::string> warnings;
};

/// Market document (JSON):
///   { "states": [..], "assets": [{ticker, payoff, ask, bid, group}],
///     "fees": {group: fee}, "numeraire": ticker,
///     "generators": [{ticker: weight}], "negligible": [state] }
/// `generators` and `negligible` may be omitted. Unknown keys are errors.
LoadedMarket parse_market(const std::string& text, bool ignore_negligible = false);
LoadedMarket load_market(const std::string& path, bool ignore_negligible = false);

/// Strategies file for probes: a JSON list of {ticker: weight} maps.
std::vector<Strategy> parse_strategies(const std::string& text, const Market& market);

struct ChainOptions {
  std::optional<double> x_star;
  /// Used as the strike-0 quote when the file has no strike-0 row.
  std::optional<double> underlying_price;
  std::string underlying = "X";
};

struct LoadedChain {
  OptionChain<double> chain;
  std::vector<std::string> warnings;
};

/// CSV with header `strike,price` or `strike,bid,ask` (ask is the quote).
LoadedChain parse_chain(std::istream& in, const ChainOptions& options = {}, const std::string& source = "<chain>");
LoadedChain load_chain(const std::string& path, const ChainOptions& options = {});

std::string read_file(const std::string& path);

}  // namespace coherent

#endif  // COHERENT_IO_HPP
