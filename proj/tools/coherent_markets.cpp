// coherent-markets: command-line front end for market coherence,
// superhedging and option-chain analysis.

#include "coherent/black_scholes.hpp"
#include "coherent/io.hpp"
#include "coherent/option_chain.hpp"
#include "coherent/random_market.hpp"
#include "coherent/report.hpp"
#include "coherent/superhedge.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

namespace {

using namespace coherent;
using nlohmann::json;

enum Exit { ok = 0, usage = 1, incoherent = 2, arbitrage = 3, invalid = 4 };

json to_json(const Vector<double>& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json to_json(const std::vector<double>& v) { return json(v); }

json to_json(const Strategy& theta) {
  json out = json::object();
  for (const auto& [ticker, size] : theta.positions()) out[ticker] = size;
  return out;
}

json price_json(const SuperhedgeResult<double>& r) {
  switch (r.kind) {
    case PriceKind::finite:
      return r.value;
    case PriceKind::plus_infinity:
      return std::numeric_limits<double>::infinity();
    case PriceKind::minus_infinity:
      break;
  }
  return -std::numeric_limits<double>::infinity();
}

json state_map(const StateSpace& space, const Vector<double>& v) {
  json out = json::object();
  for (Index s = 0; s < space.size(); ++s) out[space.label(s)] = v(s);
  return out;
}

struct Common {
  std::string output;
  std::string format = "json";
  std::string emit_csv;
  std::string emit_svg;
  bool ignore_negligible = false;
};

void write_text(const std::string& path, const std::string& body) {
  if (path.empty() || path == "-") {
    std::cout << body;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << body;
}

void record_input(Report& report, const std::string& path) { report.input_digests[path] = sha256_hex(read_file(path)); }

Format parse_format(const std::string& name) {
  if (name == "json") return Format::json;
  if (name == "csv") return Format::csv;
  if (name == "svg") return Format::svg;
  throw IoError("unknown format '" + name + "'");
}

void finish(Report& report, const Common& common) {
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
  if (!common.emit_csv.empty()) write_text(common.emit_csv, emit(report, Format::csv));
  if (!common.emit_svg.empty()) write_text(common.emit_svg, emit(report, Format::svg));
  write_text(common.output, emit(report, parse_format(common.format)));
}

Vector<double> parse_payoff(const std::string& text, const Market& market) {
  if (text.rfind("asset:", 0) == 0) {
    const std::string ticker = text.substr(6);
    const auto i = market.find_asset(ticker);
    if (!i) throw ValidationError("payoff", "unknown ticker '" + ticker + "'");
    return market.discounted_payoffs().col(*i);
  }
  std::vector<double> values;
  std::stringstream in(text);
  std::string cell;
  while (std::getline(in, cell, ',')) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(cell, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != cell.size()) throw ValidationError("payoff", "cannot parse '" + cell + "' as a number");
    values.push_back(v);
  }
  if (static_cast<Index>(values.size()) != market.space().size())
    throw ValidationError("payoff", "payoff has " + std::to_string(values.size()) + " values, the market has " +
                                        std::to_string(market.space().size()) + " states");
  return Eigen::Map<Vector<double>>(values.data(), static_cast<Index>(values.size()));
}

// ---- market commands ----

int cmd_validate(const std::string& path, const Common& common) {
  Report report{"validate"};
  report.arguments["market"] = path;
  record_input(report, path);
  auto loaded = load_market(path, common.ignore_negligible);
  report.warnings = loaded.warnings;
  const auto& m = loaded.market;
  report.results["valid"] = true;
  report.results["states"] = m.space().labels();
  report.results["assets"] = m.asset_count();
  report.results["generators"] = m.generators().size();
  report.results["numeraire"] = m.numeraire().ticker;
  report.results["support"] = order_support(loaded.order);
  finish(report, common);
  return ok;
}

int cmd_coherence(const std::string& path, const std::string& probes_path, const Common& common) {
  Report report{"coherence"};
  report.arguments["market"] = path;
  record_input(report, path);
  auto loaded = load_market(path, common.ignore_negligible);
  report.warnings = loaded.warnings;
  std::vector<Strategy> probes;
  if (!probes_path.empty()) {
    report.arguments["probes"] = probes_path;
    record_input(report, probes_path);
    probes = parse_strategies(read_file(probes_path), loaded.market);
  }
  const auto r = check_coherence(loaded.market, loaded.order, probes);
  report.results["spread_coherent"] = r.coherent;
  report.results["arbitrage"] = r.arbitrage ? to_json(*r.arbitrage) : json(nullptr);
  json tc = json::array();
  for (const auto& theta : r.total_cost_violations) tc.push_back(to_json(theta));
  report.results["total_cost_violations"] = tc;
  json eff = json::array();
  for (const auto& [a, b] : r.efficiency_violations) eff.push_back({{"dominating", to_json(a)}, {"dominated", to_json(b)}});
  report.results["efficiency_violations"] = eff;
  report.results["notes"] = r.notes;
  const auto pol = pricing_polytope(loaded.market, loaded.order);
  if (auto m = pol.feasible_point()) report.results["pricing_measure"] = state_map(loaded.market.space(), *m);
  const bool coherent = r.coherent && r.total_cost_violations.empty();
  report.results["coherent"] = coherent;
  report.results["arbitrage_free"] = !r.arbitrage;
  finish(report, common);
  if (r.arbitrage) return arbitrage;
  return coherent ? ok : incoherent;
}

int cmd_superhedge(const std::string& path, const std::string& payoff, const std::string& objective,
                   const Common& common) {
  Report report{"superhedge"};
  report.arguments = {{"market", path}, {"payoff", payoff}, {"objective", objective}};
  record_input(report, path);
  auto loaded = load_market(path, common.ignore_negligible);
  report.warnings = loaded.warnings;
  const Vector<double> f = parse_payoff(payoff, loaded.market);
  const CostModel cost = objective == "total" ? CostModel::total : CostModel::spread_only;
  const auto r = superhedge_price(loaded.market, loaded.order, f, cost);
  report.results["price"] = price_json(r);
  report.results["achieved"] = r.achieved;
  if (r.finite()) {
    report.results["hedge"] = to_json(r.hedge);
    report.results["generator_weights"] = to_json(r.generator_weights);
    report.results["numeraire_weight"] = r.numeraire_weight;
    report.results["hedge_discounted_payoff"] = state_map(loaded.market.space(), discounted_payoff(loaded.market, r.hedge));
  }
  finish(report, common);
  return r.kind == PriceKind::minus_infinity ? incoherent : ok;
}

int cmd_measures(const std::string& path, const std::string& payoff, const Common& common) {
  Report report{"measures"};
  report.arguments = {{"market", path}, {"payoff", payoff}};
  record_input(report, path);
  auto loaded = load_market(path, common.ignore_negligible);
  report.warnings = loaded.warnings;
  const auto& market = loaded.market;
  const auto pol = pricing_polytope(market, loaded.order);
  report.results["dimension"] = pol.dimension();
  report.results["constraints"] = pol.constraint_matrix().rows();
  const auto point = pol.feasible_point();
  report.results["empty"] = !point.has_value();
  if (!point) {
    finish(report, common);
    return incoherent;
  }
  report.results["pricing_measure"] = state_map(market.space(), *point);
  json fundamentals = json::object();
  for (Index i = 0; i < market.asset_count(); ++i) {
    const Vector<double> x = market.discounted_payoffs().col(i);
    const auto hi = pol.maximize(x);
    const auto lo = pol.maximize(Vector<double>(-x));
    fundamentals[market.asset(i).ticker] = {{"low", -lo.value}, {"high", hi.value},
                                            {"bid", market.asset(i).bid}, {"ask", market.asset(i).ask}};
  }
  report.results["integral_ranges"] = fundamentals;
  if (!payoff.empty()) {
    const Vector<double> f = parse_payoff(payoff, market);
    const auto sup = pol.maximize(f);
    const auto price = superhedge_price(market, loaded.order, f);
    report.results["payoff"] = {{"sup_integral", sup.optimal() ? json(sup.value) : json(price_json(price))},
                                {"superhedge_price", price_json(price)}};
    if (sup.optimal()) report.results["payoff"]["maximizer"] = state_map(market.space(), sup.measure);
  }
  finish(report, common);
  return ok;
}

// ---- chain commands ----

struct ChainArgs {
  std::string path;
  std::optional<double> x_star;
  std::optional<double> underlying_price;
};

LoadedChain open_chain(const ChainArgs& a, Report& report, bool need_x_star) {
  report.arguments["chain"] = a.path;
  record_input(report, a.path);
  ChainOptions options{a.x_star, a.underlying_price};
  auto loaded = load_chain(a.path, options);
  report.warnings = loaded.warnings;
  if (need_x_star && !a.x_star) {
    const double guess = 2.0 * loaded.chain.strikes().back();
    if (!(guess > 0.0)) throw ValidationError("xstar", "cannot default x_star for a chain with a single strike 0");
    std::ostringstream os;
    os << "x_star not given; assuming " << guess << " (twice the largest strike)";
    report.warnings.push_back(os.str());
    loaded.chain = loaded.chain.with_x_star(guess);
  }
  if (loaded.chain.x_star()) report.arguments["xstar"] = *loaded.chain.x_star();
  return loaded;
}

json efficiency_json(const OptionChain<double>& chain, const EfficientStrikes<double>& J) {
  json out;
  out["efficient"] = to_json(J.strikes);
  json rejected = json::array();
  std::size_t next = 0;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    if (next < J.chain_index.size() && J.chain_index[next] == i) {
      ++next;
      continue;
    }
    rejected.push_back({{"strike", chain.strikes()[i]}, {"price", chain.prices()[i]},
                        {"reason", chain.x_star() && !(chain.strikes()[i] < *chain.x_star())
                                       ? "at or above x_star"
                                       : "butterfly spread condition"}});
  }
  out["rejected"] = rejected;
  return out;
}

json bubble_json(const BubbleEstimate<double>& b) {
  return {{"lower", b.lower}, {"upper", b.upper}, {"point", b.point ? json(*b.point) : json(nullptr)},
          {"method", b.method}};
}

json measure_json(const ImpliedMeasure<double>& m) {
  json atoms = json::array();
  for (const auto& [x, mass] : m.atoms) atoms.push_back({{"at", x}, {"mass", mass}});
  return {{"knots", to_json(m.knots)},
          {"survival", to_json(m.survival)},
          {"atoms", atoms},
          {"total_mass", m.total_mass},
          {"bubble", bubble_json(m.bubble)},
          {"reconstruction_error", m.reconstruction_error}};
}

void add_curves(Report& report, const CallCurve<double>& curve, const ImpliedMeasure<double>& m) {
  report.curves.push_back({"survival", m.knots, m.survival});
  report.curves.push_back({"call", curve.knots(), curve.values()});
}

int cmd_chain_analyze(const ChainArgs& a, std::optional<double> eta, const Common& common) {
  Report report{"chain-analyze"};
  auto loaded = open_chain(a, report, true);
  const auto& chain = loaded.chain;
  const auto J = efficient_strikes(chain);
  report.results["strikes"] = efficiency_json(chain, J);
  const auto curve = call_curve(J);
  const auto m = implied_measure(curve);
  report.results["call_curve"] = {{"knots", to_json(curve.knots())}, {"values", to_json(curve.values())}};
  report.results["implied"] = measure_json(m);
  report.results["quoted_bubble"] = bubble_json(bubble_estimate(quoted_curve(J), true));
  if (eta) {
    const auto nb = norm_bound_check(chain, *eta);
    report.arguments["eta"] = *eta;
    report.results["norm_bound"] = {{"mass", nb.mass}, {"bound", nb.bound ? json(*nb.bound) : json(nullptr)}, {"holds", nb.holds}};
  }
  add_curves(report, curve, m);
  finish(report, common);
  return ok;
}

int cmd_hedge(const ChainArgs& a, const std::vector<double>& calls, const Common& common) {
  Report report{"hedge"};
  auto loaded = open_chain(a, report, true);
  report.arguments["payoff_call"] = calls;
  const auto J = efficient_strikes(loaded.chain);
  ConvexPayoff<double> g{[calls](const double& x) {
                           double v = 0.0;
                           for (double k : calls) v += std::max(x - k, 0.0);
                           return v;
                         },
                         "calls"};
  const auto h = hedge_convex(J, g);
  json weights = json::array();
  for (std::size_t i = 0; i < J.size(); ++i) weights.push_back({{"strike", J.strikes[i]}, {"weight", h.weights(static_cast<Index>(i))}});
  report.results["weights"] = weights;
  report.results["duals"] = to_json(h.duals);
  report.results["cost"] = h.cost;
  report.results["dual_cost"] = h.duals.dot(h.targets);
  report.results["dominates"] = dominance_check(J, h.weights, g);
  finish(report, common);
  return ok;
}

int cmd_implied(const ChainArgs& a, const Common& common) {
  Report report{"implied"};
  auto loaded = open_chain(a, report, true);
  const auto J = efficient_strikes(loaded.chain);
  const auto curve = call_curve(J);
  const auto m = implied_measure(curve);
  report.results = measure_json(m);
  add_curves(report, curve, m);
  finish(report, common);
  return ok;
}

int cmd_bubble(const ChainArgs& a, const Common& common) {
  Report report{"bubble"};
  auto loaded = open_chain(a, report, false);
  const auto J = efficient_strikes(loaded.chain);
  const auto quoted = quoted_curve(J);
  report.results["quoted"] = bubble_json(bubble_estimate(quoted, true));
  if (loaded.chain.x_star()) report.results["terminal"] = bubble_json(bubble_estimate(call_curve(J)));
  report.curves.push_back({"quoted_call", quoted.knots(), quoted.values()});
  finish(report, common);
  return ok;
}

int cmd_bs_gen(const BlackScholes& model, const std::string& grid, const std::string& output) {
  const auto chain = bs_chain(model, parse_grid(grid));
  std::string body = "strike,price\n";
  char buf[96];
  for (std::size_t i = 0; i < chain.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", chain.strikes()[i], chain.prices()[i]);
    body += buf;
  }
  write_text(output, body);
  return ok;
}

// ---- self-check ----

int self_check(const Common& common) {
  const std::uint64_t seed = seed_from_environment(20240601);
  std::mt19937_64 rng(seed);
  Report report{"self-check"};
  report.arguments["seed"] = seed;
  int failures = 0;

  int duality = 0;
  for (int trial = 0; trial < 25; ++trial) {
    const auto rm = random_coherent_market(rng);
    const auto pol = pricing_polytope(rm.market, rm.order);
    std::normal_distribution<double> normal;
    Vector<double> f(rm.market.space().size());
    for (Index s = 0; s < f.size(); ++s) f(s) = normal(rng);
    const auto price = superhedge_price(rm.market, rm.order, f);
    const auto sup = pol.maximize(f);
    ++duality;
    if (price.finite() != sup.optimal() || (price.finite() && std::abs(price.value - sup.value) > 1e-8)) ++failures;
  }

  int hedges = 0;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<double> strikes{0.0}, prices;
    const int n = 2 + static_cast<int>(unit(rng) * 8);
    for (int i = 1; i < n; ++i) strikes.push_back(strikes.back() + 0.5 + unit(rng));
    const double x_star = strikes.back() + 0.5 + unit(rng);
    const BlackScholes model{strikes.back() / 2 + 0.5, 0.0, 0.3 + unit(rng) * 0.3, 1.0};
    for (double k : strikes) prices.push_back(model.call(k));
    const OptionChain<double> chain(strikes, prices, x_star);
    const auto J = efficient_strikes(chain);
    const double k = strikes[static_cast<std::size_t>(unit(rng) * static_cast<double>(strikes.size()))];
    const auto h = hedge_convex(J, ConvexPayoff<double>::call(k));
    ++hedges;
    if ((h.matrix().transpose() * h.duals - Eigen::Map<const Vector<double>>(J.prices.data(), static_cast<Index>(J.size())))
            .cwiseAbs()
            .maxCoeff() > 1e-10 ||
        h.weights.minCoeff() < -1e-12 || h.duals.minCoeff() < -1e-10)
      ++failures;
  }

  report.results = {{"duality_checks", duality}, {"hedge_checks", hedges}, {"failures", failures}};
  finish(report, common);
  return failures == 0 ? ok : usage;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frictional market pricing: coherence, superhedging and option-chain analysis"};
  app.require_subcommand(0, 1);
  app.fallthrough();
  Common common;
  bool run_self_check = false;
  app.add_option("-o,--output", common.output, "Write the report here instead of stdout");
  app.add_option("--format", common.format, "Report format")->check(CLI::IsMember({"json", "csv", "svg"}));
  app.add_flag("--ignore-negligible", common.ignore_negligible, "Treat every state as non-negligible");
  app.add_flag("--self-check", run_self_check, "Run randomized internal checks (seed: COHERENT_MARKETS_SEED)");

  std::string market_path, probes_path, payoff, objective = "spread";
  auto* validate = app.add_subcommand("validate", "Parse and validate a market file");
  validate->add_option("market", market_path)->required()->check(CLI::ExistingFile);

  auto* coherence = app.add_subcommand("coherence", "Decide coherence and search for arbitrage");
  coherence->add_option("market", market_path)->required()->check(CLI::ExistingFile);
  coherence->add_option("--probes", probes_path, "JSON list of strategies for total-cost and efficiency probes")
      ->check(CLI::ExistingFile);

  auto* superhedge = app.add_subcommand("superhedge", "Superhedging price of a payoff");
  superhedge->add_option("market", market_path)->required()->check(CLI::ExistingFile);
  superhedge->add_option("--payoff", payoff, "Comma-separated state values, or asset:TICKER")->required();
  superhedge->add_option("--objective", objective, "Cost functional")->check(CLI::IsMember({"spread", "total"}));

  auto* measures = app.add_subcommand("measures", "Pricing-measure polytope summary");
  measures->add_option("market", market_path)->required()->check(CLI::ExistingFile);
  measures->add_option("--payoff,--objective", payoff, "Payoff whose integral range is reported");

  ChainArgs chain_args;
  std::optional<double> eta;
  std::vector<double> calls;
  auto chain_command = [&](const std::string& name, const std::string& help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("chain", chain_args.path)->required()->check(CLI::ExistingFile);
    sub->add_option("--xstar", chain_args.x_star, "Supremum of the underlying");
    sub->add_option("--underlying-price", chain_args.underlying_price, "Strike-0 quote when the file lacks one");
    sub->add_option("--emit-csv", common.emit_csv, "Write curve data as CSV");
    sub->add_option("--emit-svg", common.emit_svg, "Write curve plot as SVG");
    return sub;
  };
  auto* analyze = chain_command("chain-analyze", "Efficient strikes, CALL curve, implied measure and bubble");
  analyze->add_option("--eta", eta, "Asserted lower bound of the underlying for the norm check");
  auto* hedge = chain_command("hedge", "Exact hedge of a sum of calls on the efficient strikes");
  hedge->add_option("--payoff-call", calls, "Strike of a call in the target payoff (repeatable)")->required();
  auto* implied = chain_command("implied", "Implied survival function and atoms");
  auto* bubble = chain_command("bubble", "Bubble bounds from the quoted curve");

  BlackScholes model{100.0, 0.0, 0.2, 1.0};
  std::string grid = "50:200:1";
  auto* bs = app.add_subcommand("bs-gen", "Write a Black-Scholes chain as CSV");
  bs->add_option("--s0", model.spot);
  bs->add_option("--sigma", model.sigma);
  bs->add_option("--t", model.maturity);
  bs->add_option("--r", model.rate);
  bs->add_option("--grid", grid, "lo:hi:step");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : usage;
  }

  try {
    if (run_self_check) return self_check(common);
    if (*validate) return cmd_validate(market_path, common);
    if (*coherence) return cmd_coherence(market_path, probes_path, common);
    if (*superhedge) return cmd_superhedge(market_path, payoff, objective, common);
    if (*measures) return cmd_measures(market_path, payoff, common);
    if (*analyze) return cmd_chain_analyze(chain_args, eta, common);
    if (*hedge) return cmd_hedge(chain_args, calls, common);
    if (*implied) return cmd_implied(chain_args, common);
    if (*bubble) return cmd_bubble(chain_args, common);
    if (*bs) return cmd_bs_gen(model, grid, common.output);
    std::cerr << app.help();
    return usage;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return invalid;
  } catch (const IncoherentMarket& e) {
    std::cerr << "error: " << e.what() << "\n";
    return incoherent;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return usage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return usage;
  }
}
