#include "coherent/io.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace coherent {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

namespace {

void require_keys(const json& obj, const std::string& where, const std::set<std::string>& required,
                  const std::set<std::string>& optional = {}) {
  if (!obj.is_object()) throw ValidationError(where, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!required.count(key) && !optional.count(key))
      throw ValidationError(where.empty() ? key : where + "." + key, "unknown key");
  }
  for (const auto& key : required)
    if (!obj.contains(key)) throw ValidationError(where.empty() ? key : where + "." + key, "missing required key");
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ValidationError(where, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ValidationError(where, "expected a finite number");
  return x;
}

std::string text(const json& v, const std::string& where) {
  if (!v.is_string()) throw ValidationError(where, "expected a string");
  return v.get<std::string>();
}

const json& array(const json& v, const std::string& where) {
  if (!v.is_array()) throw ValidationError(where, "expected a list");
  return v;
}

Strategy strategy_from(const json& v, const std::string& where) {
  if (!v.is_object()) throw ValidationError(where, "expected a {ticker: weight} map");
  Strategy::Positions positions;
  for (const auto& [ticker, weight] : v.items()) positions[ticker] = number(weight, where + "." + ticker);
  return Strategy(std::move(positions));
}

json parse_json(const std::string& body, const std::string& source) {
  try {
    return json::parse(body);
  } catch (const json::parse_error& e) {
    throw IoError(source + ": malformed JSON: " + e.what());
  }
}

}  // namespace

LoadedMarket parse_market(const std::string& body, bool ignore_negligible) {
  const json doc = parse_json(body, "market");
  require_keys(doc, "", {"states", "assets", "fees", "numeraire"}, {"generators", "negligible"});

  std::vector<std::string> labels;
  const auto& states = array(doc["states"], "states");
  for (std::size_t i = 0; i < states.size(); ++i) labels.push_back(text(states[i], "states[" + std::to_string(i) + "]"));
  StateSpace space(labels);

  std::vector<Asset<double>> assets;
  const auto& list = array(doc["assets"], "assets");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string where = "assets[" + std::to_string(i) + "]";
    const json& a = list[i];
    require_keys(a, where, {"ticker", "payoff", "ask", "bid", "group"});
    const auto& values = array(a["payoff"], where + ".payoff");
    Vector<double> payoff(static_cast<Index>(values.size()));
    for (std::size_t s = 0; s < values.size(); ++s)
      payoff(static_cast<Index>(s)) = number(values[s], where + ".payoff[" + std::to_string(s) + "]");
    assets.push_back({text(a["ticker"], where + ".ticker"), std::move(payoff), number(a["ask"], where + ".ask"),
                      number(a["bid"], where + ".bid"), text(a["group"], where + ".group")});
  }

  std::map<std::string, double> fees;
  if (!doc["fees"].is_object()) throw ValidationError("fees", "expected a {group: fee} map");
  for (const auto& [group, fee] : doc["fees"].items()) fees[group] = number(fee, "fees." + group);

  std::vector<Strategy> generators;
  if (doc.contains("generators")) {
    const auto& gens = array(doc["generators"], "generators");
    for (std::size_t g = 0; g < gens.size(); ++g)
      generators.push_back(strategy_from(gens[g], "generators[" + std::to_string(g) + "]"));
  }

  std::vector<std::string> negligible;
  if (doc.contains("negligible")) {
    const auto& neg = array(doc["negligible"], "negligible");
    for (std::size_t i = 0; i < neg.size(); ++i)
      negligible.push_back(text(neg[i], "negligible[" + std::to_string(i) + "]"));
  }

  Market market(space, std::move(assets), std::move(fees), text(doc["numeraire"], "numeraire"), std::move(generators));
  std::vector<std::string> warnings;
  if (ignore_negligible && !negligible.empty()) {
    warnings.push_back("negligible set of " + std::to_string(negligible.size()) + " state(s) ignored");
    negligible.clear();
  }
  OrderModel order = OrderModel::from_labels(space, negligible);
  return {std::move(market), std::move(order), std::move(warnings)};
}

LoadedMarket load_market(const std::string& path, bool ignore_negligible) {
  const std::string body = read_file(path);
  try {
    return parse_market(body, ignore_negligible);
  } catch (const ValidationError& e) {
    throw ValidationError(path + (e.where().empty() ? "" : ": " + e.where()), e.message());
  }
}

std::vector<Strategy> parse_strategies(const std::string& body, const Market& market) {
  const json doc = parse_json(body, "strategies");
  const auto& list = array(doc, "strategies");
  std::vector<Strategy> out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string where = "strategies[" + std::to_string(i) + "]";
    out.push_back(strategy_from(list[i], where));
    for (const auto& [ticker, size] : out.back().positions())
      if (!market.find_asset(ticker)) throw ValidationError(where, "unknown ticker '" + ticker + "'");
  }
  return out;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream in(line);
  std::string cell;
  while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double cell_number(const std::string& cell, const std::string& where) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (cell.empty() || used != cell.size() || !std::isfinite(v)) throw ValidationError(where, "expected a finite number, got '" + cell + "'");
  return v;
}

struct Row {
  double strike;
  double ask;
  std::optional<double> bid;
  std::size_t line;
};

}  // namespace

LoadedChain parse_chain(std::istream& in, const ChainOptions& options, const std::string& source) {
  std::string line;
  std::size_t number_of_line = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++number_of_line;
    if (!trim(line).empty()) {
      header = split(line);
      break;
    }
  }
  if (header.empty()) throw ValidationError(source, "empty chain file");
  for (auto& h : header) std::transform(h.begin(), h.end(), h.begin(), [](unsigned char c) { return std::tolower(c); });

  auto column = [&](const std::string& name) -> std::optional<std::size_t> {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto strike_col = column("strike");
  const auto price_col = column("price");
  const auto ask_col = column("ask");
  const auto bid_col = column("bid");
  const bool two_sided = ask_col && bid_col && !price_col && header.size() == 3;
  const bool one_sided = price_col && !ask_col && !bid_col && header.size() == 2;
  if (!strike_col || (!two_sided && !one_sided))
    throw ValidationError(source + ":1", "header must be 'strike,price' or 'strike,bid,ask'");

  std::vector<Row> rows;
  while (std::getline(in, line)) {
    ++number_of_line;
    if (trim(line).empty()) continue;
    const std::string where = source + ":" + std::to_string(number_of_line);
    const auto cells = split(line);
    if (cells.size() != header.size())
      throw ValidationError(where, "expected " + std::to_string(header.size()) + " columns");
    Row r{cell_number(cells[*strike_col], where), cell_number(cells[two_sided ? *ask_col : *price_col], where),
          std::nullopt, number_of_line};
    if (two_sided) {
      r.bid = cell_number(cells[*bid_col], where);
      if (*r.bid > r.ask) throw ValidationError(where, "bid exceeds ask (bid/ask assumption: ask >= bid)");
      if (*r.bid < 0.0) throw ValidationError(where, "option prices must be nonnegative");
    }
    if (r.strike < 0.0) throw ValidationError(where, "strikes must be nonnegative");
    if (r.ask < 0.0) throw ValidationError(where, "option prices must be nonnegative");
    rows.push_back(r);
  }
  if (rows.empty()) throw ValidationError(source, "chain has no rows");

  std::vector<std::string> warnings;
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.strike < b.strike; });
  std::vector<Row> unique;
  for (const auto& r : rows) {
    if (!unique.empty() && unique.back().strike == r.strike) {
      const Row& kept = unique.back();
      if (kept.ask != r.ask || kept.bid != r.bid)
        throw ValidationError(source + ":" + std::to_string(r.line),
                              "duplicate strike with a conflicting quote (first seen on line " +
                                  std::to_string(kept.line) + ")");
      std::ostringstream os;
      os << "duplicate strike " << r.strike << " on line " << r.line << " dropped";
      warnings.push_back(os.str());
      continue;
    }
    unique.push_back(r);
  }

  if (unique.front().strike != 0.0) {
    if (!options.underlying_price)
      throw ValidationError(source, "no strike-0 row; supply the underlying price to synthesize it");
    if (*options.underlying_price < 0.0) throw ValidationError("underlying-price", "must be nonnegative");
    std::ostringstream os;
    os << "strike-0 quote synthesized from the underlying price " << *options.underlying_price;
    warnings.push_back(os.str());
    const bool any_bid = unique.front().bid.has_value();
    unique.insert(unique.begin(), Row{0.0, *options.underlying_price,
                                      any_bid ? std::optional<double>(*options.underlying_price) : std::nullopt, 0});
  }

  std::vector<double> strikes, prices, bids;
  for (const auto& r : unique) {
    strikes.push_back(r.strike);
    prices.push_back(r.ask);
    if (r.bid) bids.push_back(*r.bid);
  }
  return {OptionChain<double>(std::move(strikes), std::move(prices), options.x_star, options.underlying, std::move(bids)),
          std::move(warnings)};
}

LoadedChain load_chain(const std::string& path, const ChainOptions& options) {
  std::istringstream in(read_file(path));
  return parse_chain(in, options, path);
}

}  // namespace coherent
