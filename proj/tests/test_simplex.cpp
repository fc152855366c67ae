#include "coherent/simplex.hpp"

#include <gtest/gtest.h>

#include <limits>
#include <optional>
#include <random>

using namespace coherent;
using lp::Sense;
using lp::Status;

namespace {

template <class S>
lp::Problem<S> problem(std::initializer_list<S> c, bool maximize = false) {
  lp::Problem<S> p;
  p.objective.resize(static_cast<Index>(c.size()));
  Index i = 0;
  for (const S& v : c) p.objective(i++) = v;
  p.constraints.resize(0, p.objective.size());
  p.maximize = maximize;
  return p;
}

template <class S>
Vector<S> row(std::initializer_list<S> v) {
  Vector<S> out(static_cast<Index>(v.size()));
  Index i = 0;
  for (const S& x : v) out(i++) = x;
  return out;
}

// Independent oracle for two-variable programs: enumerate intersections of
// every pair of boundary lines (constraints and axes) and keep the best
// feasible vertex.
std::optional<double> vertex_optimum(const lp::Problem<double>& p) {
  std::vector<Vector<double>> a;
  std::vector<double> b;
  for (Index r = 0; r < p.rows(); ++r) {
    a.push_back(p.constraints.row(r).transpose());
    b.push_back(p.rhs(r));
  }
  a.push_back(row({1.0, 0.0}));
  b.push_back(0.0);
  a.push_back(row({0.0, 1.0}));
  b.push_back(0.0);
  auto feasible = [&](const Vector<double>& x) {
    if (x(0) < -1e-9 || x(1) < -1e-9) return false;
    for (Index r = 0; r < p.rows(); ++r) {
      const double lhs = p.constraints.row(r).dot(x);
      const double tol = 1e-9 * (1 + std::abs(p.rhs(r)));
      if (p.senses[static_cast<std::size_t>(r)] == Sense::less_equal && lhs > p.rhs(r) + tol) return false;
      if (p.senses[static_cast<std::size_t>(r)] == Sense::greater_equal && lhs < p.rhs(r) - tol) return false;
      if (p.senses[static_cast<std::size_t>(r)] == Sense::equal && std::abs(lhs - p.rhs(r)) > tol) return false;
    }
    return true;
  };
  std::optional<double> best;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const double det = a[i](0) * a[j](1) - a[i](1) * a[j](0);
      if (std::abs(det) < 1e-12) continue;
      Vector<double> x(2);
      x(0) = (b[i] * a[j](1) - a[i](1) * b[j]) / det;
      x(1) = (a[i](0) * b[j] - b[i] * a[j](0)) / det;
      if (!feasible(x)) continue;
      const double v = p.objective.dot(x);
      if (!best || (p.maximize ? v > *best : v < *best)) best = v;
    }
  }
  return best;
}

}  // namespace

TEST(Simplex, TextbookMaximum) {
  auto p = problem<double>({3, 5}, true);
  p.add_row(row({1.0, 0.0}), Sense::less_equal, 4);
  p.add_row(row({0.0, 2.0}), Sense::less_equal, 12);
  p.add_row(row({3.0, 2.0}), Sense::less_equal, 18);
  const auto s = lp::solve(p);
  ASSERT_EQ(s.status, Status::optimal);
  EXPECT_NEAR(s.value, 36.0, 1e-12);
  EXPECT_NEAR(s.x(0), 2.0, 1e-12);
  EXPECT_NEAR(s.x(1), 6.0, 1e-12);
}

TEST(Simplex, GreaterEqualAndEqualityRows) {
  auto p = problem<double>({2, 3});
  p.add_row(row({1.0, 1.0}), Sense::greater_equal, 4);
  p.add_row(row({1.0, -1.0}), Sense::equal, 1);
  const auto s = lp::solve(p);
  ASSERT_EQ(s.status, Status::optimal);
  EXPECT_NEAR(s.value, 2 * 2.5 + 3 * 1.5, 1e-12);
}

TEST(Simplex, NegativeRightHandSide) {
  auto p = problem<double>({1, 1});
  p.add_row(row({-1.0, -1.0}), Sense::less_equal, -3);
  const auto s = lp::solve(p);
  ASSERT_EQ(s.status, Status::optimal);
  EXPECT_NEAR(s.value, 3.0, 1e-12);
}

TEST(Simplex, Infeasible) {
  auto p = problem<double>({1, 1});
  p.add_row(row({1.0, 1.0}), Sense::less_equal, 1);
  p.add_row(row({1.0, 1.0}), Sense::greater_equal, 2);
  EXPECT_EQ(lp::solve(p).status, Status::infeasible);
}

TEST(Simplex, Unbounded) {
  auto p = problem<double>({-1, 0});
  p.add_row(row({1.0, -1.0}), Sense::less_equal, 1);
  EXPECT_EQ(lp::solve(p).status, Status::unbounded);
}

TEST(Simplex, RedundantEqualitiesAreDropped) {
  auto p = problem<double>({1, 2});
  p.add_row(row({1.0, 1.0}), Sense::equal, 2);
  p.add_row(row({2.0, 2.0}), Sense::equal, 4);
  const auto s = lp::solve(p);
  ASSERT_EQ(s.status, Status::optimal);
  EXPECT_NEAR(s.value, 2.0, 1e-12);
}

TEST(Simplex, DegenerateCyclingExampleTerminates) {
  // Beale's classic cycling instance; Bland's rule must terminate.
  auto p = problem<double>({-0.75, 150, -0.02, 6});
  p.add_row(row({0.25, -60.0, -0.04, 9.0}), Sense::less_equal, 0);
  p.add_row(row({0.5, -90.0, -0.02, 3.0}), Sense::less_equal, 0);
  p.add_row(row({0.0, 0.0, 1.0, 0.0}), Sense::less_equal, 1);
  const auto s = lp::solve(p);
  ASSERT_EQ(s.status, Status::optimal);
  EXPECT_NEAR(s.value, -0.05, 1e-12);
}

TEST(Simplex, NoConstraints) {
  auto p = problem<double>({1, 0});
  const auto s = lp::solve(p);
  ASSERT_EQ(s.status, Status::optimal);
  EXPECT_EQ(s.value, 0.0);
  EXPECT_EQ(lp::solve(problem<double>({-1, 0})).status, Status::unbounded);
}

TEST(Simplex, DimensionMismatchRejected) {
  auto p = problem<double>({1, 1});
  p.add_row(row({1.0, 1.0}), Sense::less_equal, 1);
  p.senses.clear();
  EXPECT_THROW(lp::solve(p), std::invalid_argument);
}

TEST(Simplex, ExactRationalSolution) {
  using R = Rational;
  auto p = problem<R>({R(1), R(1)}, true);
  p.add_row(row({R(3), R(1)}), Sense::less_equal, R(1));
  p.add_row(row({R(1), R(3)}), Sense::less_equal, R(1));
  const auto s = lp::solve(p);
  ASSERT_EQ(s.status, Status::optimal);
  EXPECT_EQ(s.value, R(1, 2));
  EXPECT_EQ(s.x(0), R(1, 4));
}

TEST(Simplex, RandomTwoVariableProgramsMatchVertexEnumeration) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> coef(-5, 5);
  int compared = 0;
  for (int trial = 0; trial < 500; ++trial) {
    auto p = problem<double>({static_cast<double>(coef(rng)), static_cast<double>(coef(rng))}, trial % 2 == 0);
    const int rows = 1 + trial % 4;
    for (int r = 0; r < rows; ++r) {
      const Sense sense = r == 0 ? Sense::less_equal : static_cast<Sense>(coef(rng) > 2 ? 1 : 0);
      p.add_row(row({static_cast<double>(coef(rng)), static_cast<double>(coef(rng))}), sense, std::abs(coef(rng)) + 1.0);
    }
    // Box the region so that every feasible program has a finite optimum.
    p.add_row(row({1.0, 1.0}), Sense::less_equal, 20);
    const auto s = lp::solve(p);
    const auto oracle = vertex_optimum(p);
    ASSERT_EQ(s.optimal(), oracle.has_value()) << "trial " << trial;
    if (oracle) {
      EXPECT_NEAR(s.value, *oracle, 1e-9) << "trial " << trial;
      ++compared;
    }
  }
  EXPECT_GT(compared, 100);
}
