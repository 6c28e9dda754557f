#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pgap/common.hpp"

namespace pgap {

enum class Relation { LessEqual, GreaterEqual, Equal };
enum class LpStatus { Optimal, Infeasible, Unbounded };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
  }
  return "?";
}

/// A maximisation LP with sparse rows and per-variable bounds [lower, upper].
/// Lower bounds must be finite; upper bounds may be +inf.
struct LinearProgram {
  struct Term {
    std::size_t var;
    double coeff;
  };
  struct Constraint {
    std::vector<Term> terms;
    Relation relation = Relation::LessEqual;
    double rhs = 0.0;
  };

  std::vector<double> objective;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<Constraint> constraints;

  std::size_t num_vars() const { return objective.size(); }

  std::size_t add_variable(double obj, double lo = 0.0, double hi = kInf) {
    objective.push_back(obj);
    lower.push_back(lo);
    upper.push_back(hi);
    return objective.size() - 1;
  }

  void add_constraint(std::vector<Term> terms, Relation rel, double rhs) {
    constraints.push_back(Constraint{std::move(terms), rel, rhs});
  }

  void add_dense_constraint(const std::vector<double>& coeffs, Relation rel, double rhs) {
    std::vector<Term> terms;
    for (std::size_t j = 0; j < coeffs.size(); ++j)
      if (coeffs[j] != 0.0) terms.push_back({j, coeffs[j]});
    add_constraint(std::move(terms), rel, rhs);
  }

  double evaluate(const std::vector<double>& x) const {
    double z = 0.0;
    for (std::size_t j = 0; j < objective.size(); ++j) z += objective[j] * x[j];
    return z;
  }
};

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> values;
  double objective_value = 0.0;
  std::size_t pivots = 0;

  bool optimal() const { return status == LpStatus::Optimal; }
};

namespace detail {

// Dense tableau over the standard form  A x' (+ slacks/artificials) = b, b >= 0.
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * (cols + 1), 0.0) {}

  double& at(std::size_t i, std::size_t j) { return data_[i * (cols_ + 1) + j]; }
  double at(std::size_t i, std::size_t j) const { return data_[i * (cols_ + 1) + j]; }
  double& rhs(std::size_t i) { return data_[i * (cols_ + 1) + cols_]; }
  double rhs(std::size_t i) const { return data_[i * (cols_ + 1) + cols_]; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  void pivot(std::size_t p, std::size_t q, std::vector<double>& reduced, double& value) {
    const std::size_t stride = cols_ + 1;
    double* prow = &data_[p * stride];
    const double inv = 1.0 / prow[q];
    for (std::size_t j = 0; j < stride; ++j) prow[j] *= inv;
    prow[q] = 1.0;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i == p) continue;
      double* row = &data_[i * stride];
      const double f = row[q];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < stride; ++j)
        if (prow[j] != 0.0) row[j] -= f * prow[j];
      row[q] = 0.0;
    }
    const double rq = reduced[q];
    if (rq != 0.0) {
      for (std::size_t j = 0; j < cols_; ++j)
        if (prow[j] != 0.0) reduced[j] -= rq * prow[j];
      reduced[q] = 0.0;
      value += rq * prow[cols_];
    }
  }

 private:
  std::size_t rows_, cols_;
  std::vector<double> data_;
};

inline constexpr double kPivotEps = 1e-9;
inline constexpr double kCostEps = 1e-9;

// Primal simplex with Bland's rule: the entering column is the lowest index
// with positive reduced cost, ties in the ratio test go to the lowest basic
// variable index. Returns false when unbounded.
inline bool run_simplex(Tableau& tab, std::vector<std::size_t>& basis, std::vector<double>& reduced, double& value,
                        const std::vector<bool>& allowed, std::size_t& pivots) {
  while (true) {
    std::size_t enter = tab.cols();
    for (std::size_t j = 0; j < tab.cols(); ++j)
      if (allowed[j] && reduced[j] > kCostEps) {
        enter = j;
        break;
      }
    if (enter == tab.cols()) return true;

    std::size_t leave = tab.rows();
    double best = kInf;
    for (std::size_t i = 0; i < tab.rows(); ++i) {
      const double a = tab.at(i, enter);
      if (a <= kPivotEps) continue;
      const double ratio = tab.rhs(i) / a;
      if (leave == tab.rows() || ratio < best - 1e-12) {
        leave = i;
        best = ratio;
      } else if (ratio <= best + 1e-12 && basis[i] < basis[leave]) {
        leave = i;
        best = std::min(best, ratio);
      }
    }
    if (leave == tab.rows()) return false;
    tab.pivot(leave, enter, reduced, value);
    basis[leave] = enter;
    ++pivots;
  }
}

inline std::vector<double> price_out(const Tableau& tab, const std::vector<std::size_t>& basis,
                                     const std::vector<double>& cost, double& value) {
  std::vector<double> reduced = cost;
  value = 0.0;
  for (std::size_t i = 0; i < tab.rows(); ++i) {
    const double cb = cost[basis[i]];
    if (cb == 0.0) continue;
    for (std::size_t j = 0; j < tab.cols(); ++j) reduced[j] -= cb * tab.at(i, j);
    value += cb * tab.rhs(i);
  }
  return reduced;
}

}  // namespace detail

/// Two-phase dense primal simplex (Bland's rule). Deterministic; the optimal
/// solution returned is a basic (vertex) solution.
inline LpSolution solve(const LinearProgram& lp) {
  const std::size_t n = lp.num_vars();
  if (lp.lower.size() != n || lp.upper.size() != n) throw std::invalid_argument("lp: bound vectors have wrong length");
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(lp.lower[j])) throw std::invalid_argument("lp: lower bounds must be finite");
    if (!std::isfinite(lp.objective[j])) throw std::invalid_argument("lp: objective must be finite");
  }

  // Rows of the shifted problem x = lower + x'.
  struct Row {
    std::vector<LinearProgram::Term> terms;
    Relation rel;
    double rhs;
  };
  std::vector<Row> rows;
  rows.reserve(lp.constraints.size() + n);
  for (const auto& c : lp.constraints) {
    double rhs = c.rhs;
    for (const auto& t : c.terms) {
      if (t.var >= n) throw std::invalid_argument("lp: constraint references unknown variable");
      if (!std::isfinite(t.coeff)) throw std::invalid_argument("lp: coefficients must be finite");
      rhs -= t.coeff * lp.lower[t.var];
    }
    rows.push_back({c.terms, c.relation, rhs});
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (std::isfinite(lp.upper[j])) {
      const double width = lp.upper[j] - lp.lower[j];
      if (width < -kTol) return LpSolution{LpStatus::Infeasible, {}, 0.0, 0};
      rows.push_back({{{j, 1.0}}, Relation::LessEqual, std::max(width, 0.0)});
    }
  }
  for (auto& r : rows) {
    if (r.rhs < 0.0) {
      r.rhs = -r.rhs;
      for (auto& t : r.terms) t.coeff = -t.coeff;
      if (r.rel == Relation::LessEqual) r.rel = Relation::GreaterEqual;
      else if (r.rel == Relation::GreaterEqual) r.rel = Relation::LessEqual;
    }
  }

  // Column layout: structural | slack/surplus | artificial.
  std::size_t num_slack = 0, num_art = 0;
  for (const auto& r : rows) {
    if (r.rel != Relation::Equal) ++num_slack;
    if (r.rel != Relation::LessEqual) ++num_art;
  }
  const std::size_t cols = n + num_slack + num_art;
  detail::Tableau tab(rows.size(), cols);
  std::vector<std::size_t> basis(rows.size());
  std::size_t next_slack = n, next_art = n + num_slack;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const auto& t : rows[i].terms) tab.at(i, t.var) += t.coeff;
    tab.rhs(i) = rows[i].rhs;
    switch (rows[i].rel) {
      case Relation::LessEqual:
        tab.at(i, next_slack) = 1.0;
        basis[i] = next_slack++;
        break;
      case Relation::GreaterEqual:
        tab.at(i, next_slack++) = -1.0;
        tab.at(i, next_art) = 1.0;
        basis[i] = next_art++;
        break;
      case Relation::Equal:
        tab.at(i, next_art) = 1.0;
        basis[i] = next_art++;
        break;
    }
  }

  LpSolution sol;
  std::vector<bool> allowed(cols, true);
  double value = 0.0;

  if (num_art > 0) {
    std::vector<double> cost(cols, 0.0);
    for (std::size_t j = n + num_slack; j < cols; ++j) cost[j] = -1.0;
    auto reduced = detail::price_out(tab, basis, cost, value);
    detail::run_simplex(tab, basis, reduced, value, allowed, sol.pivots);
    double scale = 1.0;
    for (const auto& r : rows) scale = std::max(scale, std::abs(r.rhs));
    if (value < -1e-7 * scale) {
      sol.status = LpStatus::Infeasible;
      return sol;
    }
    // Drive remaining (zero-level) artificials out of the basis where possible.
    for (std::size_t i = 0; i < tab.rows(); ++i) {
      if (basis[i] < n + num_slack) continue;
      for (std::size_t j = 0; j < n + num_slack; ++j) {
        if (std::abs(tab.at(i, j)) > detail::kPivotEps) {
          tab.pivot(i, j, reduced, value);
          basis[i] = j;
          ++sol.pivots;
          break;
        }
      }
    }
    for (std::size_t j = n + num_slack; j < cols; ++j) allowed[j] = false;
  }

  std::vector<double> cost(cols, 0.0);
  for (std::size_t j = 0; j < n; ++j) cost[j] = lp.objective[j];
  auto reduced = detail::price_out(tab, basis, cost, value);
  if (!detail::run_simplex(tab, basis, reduced, value, allowed, sol.pivots)) {
    sol.status = LpStatus::Unbounded;
    return sol;
  }

  std::vector<double> shifted(cols, 0.0);
  for (std::size_t i = 0; i < tab.rows(); ++i) shifted[basis[i]] = std::max(tab.rhs(i), 0.0);
  sol.values.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    double x = lp.lower[j] + shifted[j];
    // Values within tolerance of a bound are snapped onto it.
    if (std::abs(x - lp.lower[j]) <= kTol * (1.0 + std::abs(lp.lower[j]))) x = lp.lower[j];
    if (std::isfinite(lp.upper[j]) && std::abs(x - lp.upper[j]) <= kTol * (1.0 + std::abs(lp.upper[j]))) x = lp.upper[j];
    sol.values[j] = x;
  }
  sol.objective_value = lp.evaluate(sol.values);
  sol.status = LpStatus::Optimal;
  return sol;
}

/// Largest scaled violation |excess| / (1 + |rhs|) over constraints and bounds.
inline double max_scaled_violation(const LinearProgram& lp, const std::vector<double>& x) {
  double worst = 0.0;
  for (const auto& c : lp.constraints) {
    double lhs = 0.0;
    for (const auto& t : c.terms) lhs += t.coeff * x[t.var];
    double excess = 0.0;
    switch (c.relation) {
      case Relation::LessEqual: excess = lhs - c.rhs; break;
      case Relation::GreaterEqual: excess = c.rhs - lhs; break;
      case Relation::Equal: excess = std::abs(lhs - c.rhs); break;
    }
    worst = std::max(worst, excess / (1.0 + std::abs(c.rhs)));
  }
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    worst = std::max(worst, (lp.lower[j] - x[j]) / (1.0 + std::abs(lp.lower[j])));
    if (std::isfinite(lp.upper[j])) worst = std::max(worst, (x[j] - lp.upper[j]) / (1.0 + std::abs(lp.upper[j])));
  }
  return worst;
}

/// CPLEX-LP-style text rendering, for debugging.
inline void write_lp_format(const LinearProgram& lp, std::ostream& out) {
  auto term = [](double c, std::size_t j, bool first) {
    std::ostringstream s;
    if (!first) s << (c < 0 ? " - " : " + ");
    else if (c < 0) s << "- ";
    s << format_double(std::abs(c)) << " x" << j;
    return s.str();
  };
  out << "Maximize\n obj:";
  bool first = true;
  for (std::size_t j = 0; j < lp.num_vars(); ++j)
    if (lp.objective[j] != 0.0) {
      out << ' ' << term(lp.objective[j], j, first);
      first = false;
    }
  if (first) out << " 0 x0";
  out << "\nSubject To\n";
  for (std::size_t i = 0; i < lp.constraints.size(); ++i) {
    const auto& c = lp.constraints[i];
    out << " c" << i << ':';
    bool f = true;
    for (const auto& t : c.terms) {
      out << ' ' << term(t.coeff, t.var, f);
      f = false;
    }
    if (f) out << " 0 x0";
    out << (c.relation == Relation::LessEqual ? " <= " : c.relation == Relation::GreaterEqual ? " >= " : " = ")
        << format_double(c.rhs) << '\n';
  }
  out << "Bounds\n";
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    out << ' ' << format_double(lp.lower[j]) << " <= x" << j;
    if (std::isfinite(lp.upper[j])) out << " <= " << format_double(lp.upper[j]);
    out << '\n';
  }
  out << "End\n";
}

}  // namespace pgap
