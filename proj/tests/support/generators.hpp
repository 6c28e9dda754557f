#pragma once

// Random test inputs shared by unit and acceptance tests.

#include <cmath>
#include <random>
#include <vector>

#include "pgap/instance.hpp"
#include "pgap/lp.hpp"
#include "pgap/matching.hpp"

namespace gen {

using Engine = std::mt19937_64;

inline double unif(Engine& e, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(e); }
inline int unif_int(Engine& e, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(e); }

// Bounded LP with at most 6 variables and 6 constraints. Half of the cases
// use small integer coefficients, which produces plenty of degeneracy.
inline pgap::LinearProgram random_lp(Engine& e) {
  pgap::LinearProgram lp;
  const int n = unif_int(e, 1, 6), m = unif_int(e, 1, 6);
  const bool integral = unif_int(e, 0, 1) == 1;
  auto coef = [&](double lo, double hi) {
    return integral ? static_cast<double>(unif_int(e, static_cast<int>(lo), static_cast<int>(hi))) : unif(e, lo, hi);
  };
  bool any_free = false;
  for (int j = 0; j < n; ++j) {
    const bool capped = unif_int(e, 0, 1) == 1;
    const double lo = unif_int(e, 0, 4) == 0 ? coef(-2, 0) : 0.0;
    lp.add_variable(coef(-3, 5), lo, capped ? lo + std::abs(coef(1, 4)) + 0.5 : pgap::kInf);
    any_free = any_free || !capped;
  }
  for (int i = 0; i < m; ++i) {
    std::vector<double> a(n);
    pgap::Relation rel;
    if (i == 0 && any_free) {
      for (auto& x : a) x = std::abs(coef(1, 3)) + 0.25;
      rel = pgap::Relation::LessEqual;
    } else {
      for (auto& x : a) x = unif_int(e, 0, 3) == 0 ? 0.0 : coef(-3, 3);
      const int r = unif_int(e, 0, 19);
      rel = r < 12 ? pgap::Relation::LessEqual : r < 17 ? pgap::Relation::GreaterEqual : pgap::Relation::Equal;
    }
    lp.add_dense_constraint(a, rel, coef(-2, 8));
  }
  return lp;
}

inline pgap::WeightedBipartite random_bipartite(Engine& e, std::size_t left, std::size_t right, bool integral) {
  pgap::WeightedBipartite g(left, right);
  for (auto& w : g.weight) w = integral ? static_cast<double>(unif_int(e, 0, 4)) : unif(e, 0, 1);
  return g;
}

// Small random GAP instance with capacities in [1, 2] and demands in [0, 1.5].
inline pgap::GapInstance random_gap(Engine& e, std::size_t m, std::size_t n, std::size_t D) {
  std::vector<std::vector<double>> caps(m, std::vector<double>(D));
  std::vector<std::vector<double>> w(m, std::vector<double>(n));
  std::vector<std::vector<std::vector<double>>> r(m, std::vector<std::vector<double>>(n, std::vector<double>(D)));
  std::vector<double> rates(n);
  for (auto& row : caps)
    for (auto& c : row) c = unif(e, 1, 2);
  for (std::size_t u = 0; u < m; ++u)
    for (std::size_t v = 0; v < n; ++v) {
      w[u][v] = unif_int(e, 0, 5) == 0 ? 0.0 : unif(e, 0, 1);
      for (auto& x : r[u][v]) x = unif(e, 0, 1.5);
    }
  for (auto& l : rates) l = unif(e, 0.1, 1);
  return pgap::GapInstance(caps, rates, w, r);
}

}  // namespace gen
