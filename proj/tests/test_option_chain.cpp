#include "coherent/black_scholes.hpp"
#include "coherent/option_chain.hpp"
#include "coherent/superhedge.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>

using namespace coherent;
using R = Rational;

namespace {

OptionChain<double> fixture_chain() { return OptionChain<double>({0, 1, 2}, {2.0, 1.0, 0.4}, 3.0); }

OptionChain<R> fixture_chain_exact() {
  return OptionChain<R>({R(0), R(1), R(2)}, {R(2), R(1), R(2, 5)}, R(3));
}

// Brute-force butterfly oracle: cheapest mix of two other quotes whose
// average strike is at most k (the terminal point (x_star, 0) included).
std::vector<double> oracle_efficient(const OptionChain<double>& c) {
  std::vector<double> ks, qs;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c.x_star() && c.strikes()[i] >= *c.x_star()) break;
    ks.push_back(c.strikes()[i]);
    qs.push_back(c.prices()[i]);
  }
  const std::size_t quoted = ks.size();
  if (c.x_star()) {
    ks.push_back(*c.x_star());
    qs.push_back(0.0);
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < quoted; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < ks.size(); ++a) {
      if (a == i) continue;
      if (ks[a] <= ks[i]) best = std::min(best, qs[a]);
      for (std::size_t b = 0; b < ks.size(); ++b) {
        if (b == i || !(ks[a] < ks[i] && ks[i] < ks[b])) continue;
        const double w = (ks[b] - ks[i]) / (ks[b] - ks[a]);
        best = std::min(best, w * qs[a] + (1 - w) * qs[b]);
      }
    }
    if (qs[i] <= best + 1e-12) out.push_back(ks[i]);
  }
  return out;
}

// Independent standard normal CDF from its Taylor series.
double series_cdf(double x) {
  double term = x, sum = x;
  for (int n = 1; n < 200; ++n) {
    term *= x * x / (2.0 * n + 1.0);
    sum += term;
  }
  return 0.5 + sum * std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

}  // namespace

TEST(OptionChainType, Validation) {
  EXPECT_THROW(OptionChain<double>({1, 2}, {1, 0.5}), ValidationError);     // strike 0 missing
  EXPECT_THROW(OptionChain<double>({0, 2, 1}, {1, 0.5, 0.7}), ValidationError);
  EXPECT_THROW(OptionChain<double>({0, 1}, {1, -0.5}), ValidationError);
  EXPECT_THROW(OptionChain<double>({0, 1}, {1}), ValidationError);
  EXPECT_THROW(OptionChain<double>({0, 1}, {1, 0.5}, 0.0), ValidationError);
}

TEST(EfficientStrikesTest, ButterflyExamples) {
  const auto keep = efficient_strikes(OptionChain<double>({0, 10, 20}, {10, 4, 1}));
  EXPECT_EQ(keep.strikes, (std::vector<double>{0, 10, 20}));
  const auto drop = efficient_strikes(OptionChain<double>({0, 10, 20}, {10, 6, 1}));
  EXPECT_EQ(drop.strikes, (std::vector<double>{0, 20}));
  EXPECT_EQ(drop.chain_index, (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(efficient_strikes(OptionChain<double>({0}, {5})).strikes, (std::vector<double>{0}));
}

TEST(EfficientStrikesTest, TiesAreEfficient) {
  const auto j = efficient_strikes(OptionChain<double>({0, 1, 2}, {3, 2, 1}));
  EXPECT_EQ(j.size(), 3u);
  const auto jr = efficient_strikes(OptionChain<R>({R(0), R(1), R(2)}, {R(3), R(2), R(1)}, R(3)));
  EXPECT_EQ(jr.size(), 3u);
}

TEST(EfficientStrikesTest, HigherQuoteThanLowerStrikeIsRejected) {
  const auto j = efficient_strikes(OptionChain<double>({0, 1, 2}, {3, 2, 2.5}));
  EXPECT_EQ(j.strikes, (std::vector<double>{0, 1}));
}

TEST(EfficientStrikesTest, TerminalPointFiltersStrikes) {
  // (2, 0.9) lies above the chord from (1, 1) to (x_star, 0) = (3, 0).
  const auto j = efficient_strikes(OptionChain<double>({0, 1, 2}, {2.0, 1.0, 0.9}, 3.0));
  EXPECT_EQ(j.strikes, (std::vector<double>{0, 1}));
  EXPECT_EQ(*j.terminal, 3.0);
  // Strikes at or beyond x_star are dropped.
  const auto k = efficient_strikes(OptionChain<double>({0, 1, 3, 4}, {2.0, 1.0, 0.0, 0.0}, 3.0));
  EXPECT_EQ(k.strikes, (std::vector<double>{0, 1}));
}

TEST(EfficientStrikesTest, MatchesBruteForceOracle) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> k{0}, q{1.0 + 3.0 * u(rng)};
    const int n = 1 + static_cast<int>(u(rng) * 9);
    for (int i = 0; i < n; ++i) {
      k.push_back(k.back() + 0.25 + u(rng));
      q.push_back(std::max(0.0, q.back() - u(rng) * 0.6 + 0.15 * u(rng)));
    }
    std::optional<double> x_star;
    if (trial % 2) x_star = k.back() * (0.7 + u(rng));
    if (x_star && *x_star <= 0.0) x_star.reset();
    const OptionChain<double> chain(k, q, x_star);
    EXPECT_EQ(efficient_strikes(chain).strikes, oracle_efficient(chain)) << "trial " << trial;
  }
}

TEST(HedgeConvex, WorkedFixture) {
  const auto J = efficient_strikes(fixture_chain());
  const auto h = hedge_convex(J, ConvexPayoff<double>::call(1.5));
  EXPECT_NEAR(h.weights(0), 0.0, 1e-15);
  EXPECT_NEAR(h.weights(1), 0.5, 1e-15);
  EXPECT_NEAR(h.weights(2), 0.5, 1e-15);
  EXPECT_NEAR(h.cost, 0.7, 1e-15);
  EXPECT_NEAR(h.duals(0), 0.4, 1e-15);
  EXPECT_NEAR(h.duals(1), 0.2, 1e-15);
  EXPECT_NEAR(h.duals(2), 0.4, 1e-15);
  const Vector<double> q = h.matrix().transpose() * h.duals;
  EXPECT_NEAR(q(0), 2.0, 1e-15);
  EXPECT_NEAR(q(1), 1.0, 1e-15);
  EXPECT_NEAR(q(2), 0.4, 1e-15);
  EXPECT_NEAR(h.duals.dot(h.targets), h.cost, 1e-15);
}

TEST(HedgeConvex, WorkedFixtureExact) {
  const auto J = efficient_strikes(fixture_chain_exact());
  const auto h = hedge_convex(J, ConvexPayoff<R>::call(R(3, 2)));
  EXPECT_EQ(h.weights(0), R(0));
  EXPECT_EQ(h.weights(1), R(1, 2));
  EXPECT_EQ(h.weights(2), R(1, 2));
  EXPECT_EQ(h.duals(0), R(2, 5));
  EXPECT_EQ(h.duals(1), R(1, 5));
  EXPECT_EQ(h.duals(2), R(2, 5));
  EXPECT_EQ(h.cost, R(7, 10));
}

TEST(HedgeConvex, CallOnEfficientStrikeIsItself) {
  const auto J = efficient_strikes(fixture_chain_exact());
  for (std::size_t i = 0; i < J.size(); ++i) {
    const auto h = hedge_convex(J, ConvexPayoff<R>::call(J.strikes[i]));
    for (std::size_t j = 0; j < J.size(); ++j) EXPECT_EQ(h.weights(static_cast<Index>(j)), R(i == j ? 1 : 0));
  }
}

TEST(HedgeConvex, RejectsPayoffsOutsideTheConvexClass) {
  const auto J = efficient_strikes(fixture_chain());
  EXPECT_THROW(hedge_convex(J, ConvexPayoff<double>{[](const double& x) { return std::sqrt(x); }, "sqrt"}),
               ValidationError);
  EXPECT_THROW(hedge_convex(J, ConvexPayoff<double>{[](const double& x) { return x + 1.0; }, "shifted"}),
               ValidationError);
  EXPECT_THROW(hedge_convex(J, ConvexPayoff<double>{[](const double& x) { return -x; }, "negative"}),
               ValidationError);
}

TEST(HedgeConvex, NeedsXStarAndEfficientStrikes) {
  const auto no_top = efficient_strikes(OptionChain<double>({0, 1, 2}, {2.0, 1.0, 0.4}));
  EXPECT_THROW(hedge_convex(no_top, ConvexPayoff<double>::call(1.0)), ValidationError);
  // Forcing an inefficient strike into the grid makes a dual price negative.
  EfficientStrikes<double> forced{{0, 1, 2}, {2.0, 1.0, 0.9}, {0, 1, 2}, 3.0};
  EXPECT_THROW(hedge_convex(forced, ConvexPayoff<double>::call(1.0)), ValidationError);
}

TEST(HedgeConvex, PiecewiseLinearPayoffAndAdditivity) {
  const auto J = efficient_strikes(OptionChain<double>({0, 1, 2, 4, 5}, {5.0, 4.1, 3.3, 2.0, 1.5}, 8.0));
  ASSERT_EQ(J.size(), 5u);
  const auto g1 = ConvexPayoff<double>::piecewise_linear({0, 1.5, 3}, {0.0, 0.5, 2.0});
  const auto g2 = ConvexPayoff<double>::call(2.5);
  const ConvexPayoff<double> sum{[&](const double& x) { return g1(x) + g2(x); }, "sum"};
  const auto h1 = hedge_convex(J, g1), h2 = hedge_convex(J, g2), hs = hedge_convex(J, sum);
  EXPECT_LE((hs.weights - h1.weights - h2.weights).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_GE(h1.weights.minCoeff(), 0.0);
  EXPECT_TRUE(dominance_check(J, h1.weights, g1));
  // The weights solve the triangular system D w = g at the knots.
  const Matrix<double> d = h1.matrix();
  const Vector<double> dense = d.fullPivLu().solve(h1.targets);
  EXPECT_LE((dense - h1.weights).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(DominanceCheck, Examples) {
  const auto J = efficient_strikes(fixture_chain());
  const auto g = ConvexPayoff<double>::call(1.0);
  EXPECT_TRUE(dominance_check(J, hedge_convex(J, g).weights, g));
  EXPECT_FALSE(dominance_check(J, Vector<double>(Vector<double>::Zero(3)), g));
  Vector<double> underlying = Vector<double>::Zero(3);
  underlying(0) = 1.0;
  EXPECT_TRUE(dominance_check(J, underlying, g));
}

TEST(CallCurveTest, StandardCallsThroughEfficientQuotes) {
  const auto J = efficient_strikes(fixture_chain());
  const auto curve = call_curve(J);
  EXPECT_EQ(curve.knots(), (std::vector<double>{0, 1, 2, 3}));
  EXPECT_TRUE(curve.terminal());
  EXPECT_NEAR(curve.value_at(0.0), 2.0, 1e-15);
  EXPECT_NEAR(curve.value_at(1.5), 0.7, 1e-15);
  EXPECT_EQ(curve.value_at(3.0), 0.0);
  EXPECT_EQ(curve.value_at(10.0), 0.0);
}

TEST(CallCurveTest, CustomFamilyEvaluatedByHedging) {
  const auto J = efficient_strikes(fixture_chain());
  CustomFamily<double> family{{0.0, 0.5, 1.5, 2.5, 3.0},
                              [](const double& t) { return ConvexPayoff<double>::call(t); }};
  const auto curve = call_curve(J, PayoffFamily<double>(family));
  EXPECT_NEAR(curve.values()[2], 0.7, 1e-15);
  EXPECT_NEAR(curve.values()[4], 0.0, 1e-15);
  EXPECT_TRUE(curve.terminal());
}

TEST(CallCurveTest, FamilyViolatingTheConditionIsRejected) {
  const auto J = efficient_strikes(fixture_chain());
  CustomFamily<double> rising{{0.0, 1.0, 2.0}, [](const double& t) {
                                const double scale = t < 1.5 ? 1.0 : 4.0;
                                return ConvexPayoff<double>{[t, scale](const double& x) { return scale * std::max(x - t, 0.0); },
                                                            "scaled call"};
                              }};
  EXPECT_THROW(call_curve(J, PayoffFamily<double>(rising)), ValidationError);
}

TEST(CallCurveTest, NonConvexCurveNamesTheTriple) {
  try {
    CallCurve<double>({0, 1, 2}, {2.0, 1.8, 0.0}, false);
    FAIL() << "expected a validation error";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("(0, 1, 2)"), std::string::npos) << e.what();
  }
  EXPECT_THROW(CallCurve<double>({0, 1}, {1.0, 1.5}, false), ValidationError);
}

TEST(ImpliedMeasureTest, FixtureSurvivalAndAtoms) {
  const auto m = implied_measure(call_curve(efficient_strikes(fixture_chain_exact())));
  EXPECT_EQ(m.survival, (std::vector<R>{R(1), R(3, 5), R(2, 5), R(0)}));
  ASSERT_EQ(m.atoms.size(), 3u);
  EXPECT_EQ(m.atoms[0], std::make_pair(R(1), R(2, 5)));
  EXPECT_EQ(m.atoms[1], std::make_pair(R(2), R(1, 5)));
  EXPECT_EQ(m.atoms[2], std::make_pair(R(3), R(2, 5)));
  EXPECT_EQ(m.total_mass, R(1));
  EXPECT_EQ(m.tail_integral(R(0)), R(2));
  EXPECT_EQ(m.reconstruction_error, R(0));
  EXPECT_EQ(*m.bubble.point, R(0));
  EXPECT_EQ(m.survival_at(R(3, 2)), R(3, 5));
  EXPECT_EQ(m.survival_at(R(1)), R(3, 5));  // right-continuous
}

TEST(ImpliedMeasureTest, ConstantCurveIsAllBubble) {
  const auto m = implied_measure(CallCurve<double>({0, 1, 2}, {0.3, 0.3, 0.3}, false));
  EXPECT_EQ(m.total_mass, 0.0);
  EXPECT_TRUE(m.atoms.empty());
  EXPECT_EQ(*m.bubble.point, 0.3);
  EXPECT_EQ(m.reconstruction_error, 0.0);
}

TEST(BubbleEstimateTest, Examples) {
  const auto terminal = bubble_estimate(call_curve(efficient_strikes(fixture_chain())));
  EXPECT_EQ(terminal.lower, 0.0);
  EXPECT_EQ(terminal.upper, 0.0);
  EXPECT_EQ(*terminal.point, 0.0);

  const auto flat = bubble_estimate(CallCurve<double>({0, 1, 2}, {1.0, 0.5, 0.5}, false), true);
  EXPECT_EQ(flat.lower, 0.5);
  EXPECT_EQ(*flat.point, 0.5);

  const auto decay = bubble_estimate(CallCurve<double>({8, 9, 10}, {0.40, 0.30, 0.25}, false), true);
  EXPECT_EQ(decay.lower, 0.0);
  EXPECT_NEAR(decay.upper, 0.25, 1e-15);
  EXPECT_NEAR(*decay.point, 0.20, 1e-12);
  EXPECT_EQ(decay.method, "geometric-slope-decay");

  const auto two_knots = bubble_estimate(CallCurve<double>({0, 1}, {1.0, 0.5}, false), true);
  EXPECT_FALSE(two_knots.point.has_value());
  EXPECT_EQ(two_knots.upper, 0.5);
}

TEST(BubbleEstimateTest, BoundsOrdered) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> k{0}, q{2.0}, slopes;
    double s = -0.9 * u(rng) - 0.05;
    for (int i = 0; i < 4; ++i) {
      k.push_back(k.back() + 0.5 + u(rng));
      q.push_back(std::max(0.0, q.back() + s * (k.back() - k[k.size() - 2])));
      s *= u(rng);
    }
    const auto b = bubble_estimate(CallCurve<double>(k, q, false), true);
    EXPECT_LE(0.0, b.lower);
    EXPECT_LE(b.lower, b.upper);
    if (b.point) {
      EXPECT_LE(b.lower, *b.point);
      EXPECT_LE(*b.point, b.upper);
    }
    EXPECT_LE(b.upper, q.back());
  }
}

TEST(BlackScholesTest, SurvivalOracleAndLimits) {
  const BlackScholes bs{100, 0.0, 0.2, 1.0};
  EXPECT_NEAR(bs.d2(100), -0.1, 1e-15);
  EXPECT_NEAR(bs.survival(100), series_cdf(-0.1), 1e-12);
  EXPECT_NEAR(bs.survival(100), 0.46017, 1e-5);
  const BlackScholes discounted{100, 0.05, 0.2, 2.0};
  EXPECT_NEAR(discounted.survival(1e-8), std::exp(-0.1), 1e-12);
  EXPECT_NEAR(bs.call(20), 80.0, 1e-6);
  for (double x : {-3.0, -1.2, 0.0, 0.7, 2.5}) EXPECT_NEAR(normal_cdf(x), series_cdf(x), 1e-13);
  EXPECT_THROW(bs_chain(BlackScholes{100, 0, 0.0, 1}, {100}), ValidationError);
}

TEST(BlackScholesTest, GridParsing) {
  EXPECT_EQ(parse_grid("50:52:1"), (std::vector<double>{50, 51, 52}));
  EXPECT_EQ(parse_grid("0:1:0.5").size(), 3u);
  EXPECT_THROW(parse_grid("1:0:1"), ValidationError);
  EXPECT_THROW(parse_grid("a:b:c"), ValidationError);
  EXPECT_THROW(parse_grid("1:2"), ValidationError);
}

TEST(NormBound, Examples) {
  const auto nb = norm_bound_check(fixture_chain(), 1.0);
  EXPECT_EQ(nb.mass, 1.0);
  EXPECT_EQ(*nb.bound, 2.0);
  EXPECT_TRUE(nb.holds);
  const auto vacuous = norm_bound_check(fixture_chain(), 0.0);
  EXPECT_FALSE(vacuous.bound.has_value());
  EXPECT_TRUE(vacuous.holds);
  const BlackScholes bs{100, 0.03, 0.25, 1.0};
  const auto chain = bs_chain(bs, parse_grid("0.001:400:0.5"), 800.0);
  const auto mass = norm_bound_check(chain, 1e-3).mass;
  EXPECT_NEAR(mass, std::exp(-0.03), 1e-4);
}

TEST(CrossCheck, HedgeCostEqualsLinearProgramOnOptionMarket) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int compared = 0;
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<double> strikes{0.0};
    const int n = 1 + static_cast<int>(u(rng) * 5);
    for (int i = 0; i < n; ++i) strikes.push_back(strikes.back() + 0.3 + u(rng));
    const double x_star = strikes.back() + 0.3 + u(rng);
    const BlackScholes model{strikes.back() * (0.4 + 0.4 * u(rng)) + 0.2, 0.0, 0.2 + 0.5 * u(rng), 1.0};
    std::vector<double> prices;
    for (double k : strikes) prices.push_back(model.call(k));
    const auto J = efficient_strikes(OptionChain<double>(strikes, prices, x_star));
    const double kink = x_star * u(rng);
    const auto g = ConvexPayoff<double>::piecewise_linear({0.0, kink}, {0.2 * u(rng), 1.0 + u(rng)});
    const auto h = hedge_convex(J, g);

    std::vector<double> xs{J.strikes.size() > 1 ? J.strikes[1] / 2 : x_star / 2};
    for (std::size_t i = 1; i < J.size(); ++i) {
      xs.push_back(J.strikes[i]);
      const double next = i + 1 < J.size() ? J.strikes[i + 1] : x_star;
      xs.push_back(0.5 * (J.strikes[i] + next));
    }
    xs.push_back(x_star);
    std::vector<std::string> labels;
    Vector<double> numeraire(static_cast<Index>(xs.size())), f(static_cast<Index>(xs.size()));
    for (std::size_t s = 0; s < xs.size(); ++s) {
      labels.push_back("x" + std::to_string(s));
      numeraire(static_cast<Index>(s)) = std::min(xs[s], 1.0);
      f(static_cast<Index>(s)) = g(xs[s]) / std::min(xs[s], 1.0);
    }
    StateSpace space(labels);
    std::vector<Asset<double>> assets{{"N", numeraire, 1e6, 0.0, "cash"}};
    std::vector<Strategy> gens;
    for (std::size_t i = 0; i < J.size(); ++i) {
      Vector<double> payoff(static_cast<Index>(xs.size()));
      for (std::size_t s = 0; s < xs.size(); ++s) payoff(static_cast<Index>(s)) = std::max(xs[s] - J.strikes[i], 0.0);
      assets.push_back({"C" + std::to_string(i), payoff, J.prices[i], 0.0, "calls"});
      gens.push_back(Strategy::unit(assets.back().ticker));
    }
    Market market(space, assets, {{"cash", 0.0}, {"calls", 0.0}}, "N", gens);
    const auto lp = superhedge_price(market, OrderModel(space), f);
    ASSERT_TRUE(lp.finite());
    EXPECT_NEAR(lp.value, h.cost, 1e-8) << "trial " << trial;
    ++compared;
  }
  EXPECT_EQ(compared, 40);
}
