#ifndef COHERENT_SIMPLEX_HPP
#define COHERENT_SIMPLEX_HPP

#include "coherent/scalar.hpp"

#include <vector>

namespace coherent::lp {

enum class Sense { less_equal, greater_equal, equal };
enum class Status { optimal, infeasible, unbounded };

/// optimize c'x subject to rows(A x <sense> b), x >= 0.
template <class Scalar>
struct Problem {
  Vector<Scalar> objective;
  Matrix<Scalar> constraints;
  Vector<Scalar> rhs;
  std::vector<Sense> senses;
  bool maximize = false;

  Index variables() const { return objective.size(); }
  Index rows() const { return constraints.rows(); }

  void add_row(const Vector<Scalar>& coefficients, Sense sense, const Scalar& bound) {
    const Index r = constraints.rows();
    Matrix<Scalar> grown(r + 1, objective.size());
    if (r > 0) grown.topRows(r) = constraints;
    grown.row(r) = coefficients.transpose();
    constraints = std::move(grown);
    Vector<Scalar> b(r + 1);
    if (r > 0) b.head(r) = rhs;
    b(r) = bound;
    rhs = std::move(b);
    senses.push_back(sense);
  }
};

template <class Scalar>
struct Solution {
  Status status = Status::infeasible;
  Vector<Scalar> x;
  Scalar value = Scalar(0);
  int pivots = 0;

  bool optimal() const { return status == Status::optimal; }
};

namespace detail {

// Dense tableau. Row `m` holds reduced costs, column `cols` the rhs.
template <class Scalar>
class Tableau {
 public:
  Tableau(const Problem<Scalar>& p) : eps_(Tolerance<Scalar>::pivot()) {
    const Index m = p.rows();
    const Index n = p.variables();
    n_original_ = n;

    Matrix<Scalar> a = p.constraints;
    Vector<Scalar> b = p.rhs;
    std::vector<Sense> senses = p.senses;
    for (Index i = 0; i < m; ++i) {
      if (b(i) < Scalar(0)) {
        a.row(i) *= Scalar(-1);
        b(i) = -b(i);
        if (senses[i] == Sense::less_equal)
          senses[i] = Sense::greater_equal;
        else if (senses[i] == Sense::greater_equal)
          senses[i] = Sense::less_equal;
      }
    }

    Index slacks = 0;
    Index artificials = 0;
    for (auto s : senses) {
      if (s != Sense::equal) ++slacks;
      if (s != Sense::less_equal) ++artificials;
    }
    first_artificial_ = n + slacks;
    cols_ = n + slacks + artificials;
    t_ = Matrix<Scalar>::Zero(m + 1, cols_ + 1);
    basis_.assign(static_cast<std::size_t>(m), 0);

    Index slack = n;
    Index art = first_artificial_;
    for (Index i = 0; i < m; ++i) {
      t_.row(i).head(n) = a.row(i);
      t_(i, cols_) = b(i);
      switch (senses[i]) {
        case Sense::less_equal:
          t_(i, slack) = Scalar(1);
          basis_[i] = slack++;
          break;
        case Sense::greater_equal:
          t_(i, slack++) = Scalar(-1);
          t_(i, art) = Scalar(1);
          basis_[i] = art++;
          break;
        case Sense::equal:
          t_(i, art) = Scalar(1);
          basis_[i] = art++;
          break;
      }
    }
    allowed_.assign(static_cast<std::size_t>(cols_), true);
  }

  Solution<Scalar> run(const Problem<Scalar>& p) {
    Solution<Scalar> out;
    const Index m = rows();

    // Phase 1: minimize the sum of artificials.
    if (first_artificial_ < cols_) {
      Vector<Scalar> phase1 = Vector<Scalar>::Zero(cols_);
      phase1.tail(cols_ - first_artificial_).setOnes();
      set_objective(phase1);
      if (!iterate(out.pivots)) {
        out.status = Status::unbounded;  // cannot happen for phase 1
        return out;
      }
      if (-t_(m, cols_) > Tolerance<Scalar>::feasibility()) {
        out.status = Status::infeasible;
        return out;
      }
      drive_out_artificials(out.pivots);
      for (Index j = first_artificial_; j < cols_; ++j) allowed_[static_cast<std::size_t>(j)] = false;
    }

    Vector<Scalar> cost = Vector<Scalar>::Zero(cols_);
    cost.head(n_original_) = p.maximize ? Vector<Scalar>(-p.objective) : p.objective;
    set_objective(cost);
    if (!iterate(out.pivots)) {
      out.status = Status::unbounded;
      return out;
    }

    out.status = Status::optimal;
    out.x = Vector<Scalar>::Zero(n_original_);
    for (Index i = 0; i < rows(); ++i) {
      const Index j = basis_[static_cast<std::size_t>(i)];
      if (j < n_original_) out.x(j) = t_(i, cols_);
    }
    out.value = p.objective.dot(out.x);
    return out;
  }

 private:
  Index rows() const { return t_.rows() - 1; }

  void set_objective(const Vector<Scalar>& cost) {
    const Index m = rows();
    t_.row(m).setZero();
    t_.row(m).head(cols_) = cost.transpose();
    for (Index i = 0; i < m; ++i) {
      const Scalar cb = cost(basis_[static_cast<std::size_t>(i)]);
      if (cb != Scalar(0)) t_.row(m) -= cb * t_.row(i);
    }
  }

  // Bland's rule: lowest-index improving column, lowest-index leaving
  // variable among ratio ties. Returns false on an unbounded ray.
  bool iterate(int& pivots) {
    const Index m = rows();
    for (;;) {
      Index enter = -1;
      for (Index j = 0; j < cols_; ++j) {
        if (allowed_[static_cast<std::size_t>(j)] && t_(m, j) < -eps_) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;

      Index leave = -1;
      Scalar best_ratio(0);
      for (Index i = 0; i < m; ++i) {
        if (t_(i, enter) > eps_) {
          const Scalar ratio = t_(i, cols_) / t_(i, enter);
          if (leave < 0 || ratio < best_ratio ||
              (ratio == best_ratio && basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)])) {
            leave = i;
            best_ratio = ratio;
          }
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
      ++pivots;
    }
  }

  void pivot(Index r, Index c) {
    const Scalar p = t_(r, c);
    t_.row(r) /= p;
    t_(r, c) = Scalar(1);
    for (Index i = 0; i < t_.rows(); ++i) {
      if (i == r) continue;
      const Scalar f = t_(i, c);
      if (f != Scalar(0)) {
        t_.row(i) -= f * t_.row(r);
        t_(i, c) = Scalar(0);
      }
    }
    basis_[static_cast<std::size_t>(r)] = c;
  }

  void drive_out_artificials(int& pivots) {
    for (Index i = 0; i < rows();) {
      if (basis_[static_cast<std::size_t>(i)] < first_artificial_) {
        ++i;
        continue;
      }
      Index c = -1;
      for (Index j = 0; j < first_artificial_; ++j) {
        if (abs_value(t_(i, j)) > eps_) {
          c = j;
          break;
        }
      }
      if (c >= 0) {
        pivot(i, c);
        ++pivots;
        ++i;
      } else {
        remove_row(i);  // redundant equality
      }
    }
  }

  void remove_row(Index r) {
    const Index total = t_.rows();
    Matrix<Scalar> shrunk(total - 1, t_.cols());
    if (r > 0) shrunk.topRows(r) = t_.topRows(r);
    shrunk.bottomRows(total - 1 - r) = t_.bottomRows(total - 1 - r);
    t_ = std::move(shrunk);
    basis_.erase(basis_.begin() + r);
  }

  Scalar eps_;
  Matrix<Scalar> t_;
  std::vector<Index> basis_;
  std::vector<bool> allowed_;
  Index n_original_ = 0;
  Index first_artificial_ = 0;
  Index cols_ = 0;
};

}  // namespace detail

template <class Scalar>
Solution<Scalar> solve(const Problem<Scalar>& problem) {
  if (problem.constraints.rows() != problem.rhs.size() ||
      static_cast<Index>(problem.senses.size()) != problem.rhs.size() ||
      (problem.constraints.rows() > 0 && problem.constraints.cols() != problem.objective.size()))
    throw std::invalid_argument("lp::solve: inconsistent problem dimensions");
  detail::Tableau<Scalar> tableau(problem);
  return tableau.run(problem);
}

}  // namespace coherent::lp

#endif  // COHERENT_SIMPLEX_HPP
