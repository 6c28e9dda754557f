#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pgap/common.hpp"
#include "pgap/policy.hpp"

namespace pgap {

struct BoundInputs {
  double h = 0.0;
  double N = 1.0;
  double delta = 0.05;
  std::size_t D = 1;
  std::size_t m = 1;
  PolicyParams params;
  // When set, these replace the computed widths (e.g. 0 for the N -> inf limit).
  std::optional<double> width;
  std::optional<double> width_prime;
};

struct BoundReport {
  double ratio = 0.0;
  double success_prob = 0.0;
  double width = 0.0;
  double width_prime = 0.0;
  std::string case_taken;
  std::map<std::string, double> intermediate;
  bool vacuous = false;
};

/// sqrt(8 ln(1/delta) / ((h + a) N)); +inf when h + a = 0.
inline double delta_width(double h, double a, double N, double delta) {
  if (!(N > 0.0)) throw std::invalid_argument("N must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (h + a <= 0.0) return kInf;
  return std::sqrt(8.0 * std::log(1.0 / delta) / ((h + a) * N));
}

namespace detail {

// x * ln(c / x) with the 0 * ln 0 convention.
inline double xlog_ratio(double x, double c) { return x == 0.0 ? 0.0 : x * std::log(c / x); }

// a * b with 0 * inf taken as 0.
inline double safe_mul(double a, double b) { return (a == 0.0 || b == 0.0) ? 0.0 : a * b; }

inline void check_inputs(const BoundInputs& in) {
  if (!(in.N > 0.0)) throw std::invalid_argument("N must be > 0");
  if (!(in.delta > 0.0 && in.delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (in.D < 1 || in.m < 1) throw std::invalid_argument("D and m must be >= 1");
  if (!(in.h >= 0.0 && in.h <= 1.0)) throw std::invalid_argument("h must lie in [0, 1]");
}

}  // namespace detail

/// exp(-gamma (1 + width) D (beta - alpha) / (1 - alpha)), with the exponent
/// taken as 0 whenever beta = alpha or gamma = 0.
inline double q_heavy_lp(double alpha, double beta, double gamma, double width, std::size_t D) {
  if (beta < alpha) throw std::invalid_argument("need alpha <= beta");
  if (beta == alpha || gamma == 0.0) return 1.0;
  return std::exp(-gamma * (1.0 + width) * (beta - alpha) / (1.0 - alpha) * static_cast<double>(D));
}

/// Competitive-ratio bound of the three-phase matching policy.
inline BoundReport theorem1_bound(const BoundInputs& in) {
  detail::check_inputs(in);
  const auto& p = in.params;
  const double h = in.h, a = p.alpha, b = p.beta;
  if (!(0.0 <= a && a <= b && b <= 1.0)) throw std::invalid_argument("need 0 <= alpha <= beta <= 1");
  BoundReport r;
  r.width = in.width.value_or(delta_width(h, a, in.N, in.delta));
  const double Q = q_heavy_lp(a, b, p.gamma, r.width, 1);
  const double lp_term = detail::safe_mul(detail::safe_mul(1.0 - 3.0 * r.width, 1.0 - a), 1.0 - Q);
  double S;
  if (b <= 1.0 - h) {
    S = (h + b == 0.0) ? 0.0 : (h + b) * (std::log(1.0 / (h + b)) + 1.0 - std::exp(-h));
    r.case_taken = "beta<=1-h";
  } else {
    S = 1.0 - std::exp(-(1.0 - b));
    r.case_taken = "beta>1-h";
  }
  r.ratio = lp_term + Q * S;
  r.success_prob = 1.0 - static_cast<double>(in.m) * in.delta -
                   static_cast<double>(in.m) * std::exp(-(h + a) * in.N / 8.0);
  r.intermediate = {{"Q", Q}, {"S", S}, {"lp_term", lp_term}};
  r.vacuous = !(r.ratio > 0.0);
  return r;
}

/// Competitive-ratio bound of the five-phase GAP policy: min(F^H, F^L).
inline BoundReport theorem2_bound(const BoundInputs& in) {
  detail::check_inputs(in);
  const auto& p = in.params;
  const double h = in.h, a = p.alpha, b = p.beta, e = p.eta, th = p.theta;
  const double D = static_cast<double>(in.D);
  if (!(0.0 <= a && a <= b && b <= e && e <= th && th <= 1.0))
    throw std::invalid_argument("need 0 <= alpha <= beta <= eta <= theta <= 1");
  BoundReport r;
  r.width = in.width.value_or(delta_width(h, a, in.N, in.delta));
  r.width_prime = in.width_prime.value_or(delta_width(h, e, in.N, in.delta));
  const double dw = r.width, dwp = r.width_prime;

  const double q_ab = q_heavy_lp(a, b, p.gamma, dw, in.D);
  const double f_ab = detail::safe_mul(detail::safe_mul((1.0 / D) * (1.0 - 3.0 * dw), 1.0 - a), 1.0 - q_ab);

  double heavy_max;
  std::string hcase;
  if (e <= 1.0 - h) {
    heavy_max = q_ab / D * detail::xlog_ratio(h + b, h + e);
    hcase = "eta<=1-h";
  } else if (b <= 1.0 - h) {
    heavy_max = (h + b == 0.0) ? 0.0 : q_ab / D * (h + b) * (std::log(1.0 / (h + b)) + 1.0 - std::exp(1.0 - h - e));
    hcase = "beta<=1-h<eta";
  } else {
    heavy_max = q_ab / D * (1.0 - std::exp(-(e - b)));
    hcase = "1-h<beta";
  }
  const double F_H = f_ab + heavy_max;

  double q_be;
  if (e <= 1.0 - h)
    q_be = (h + e == 0.0) ? 1.0 : (h + b) / (h + e);
  else if (b <= 1.0 - h)
    q_be = (h + b) * std::exp(1.0 - h - e);
  else
    q_be = std::exp(-(e - b));

  const bool light_lp = th != e && p.gamma_prime != 0.0;
  const double q_te = light_lp ? p.gamma_prime * (1.0 + dwp) * (th - e) / (1.0 - e) : 0.0;
  const double f_et = light_lp ? (1.0 - 2.0 * dwp) * p.gamma_prime * (th - e) * (1.0 - D * q_te) : 0.0;

  double f_t1;
  std::string lcase;
  if (th <= 1.0 - h) {
    const double lg = std::log(h + th);
    f_t1 = (1.0 + 2.0 * D) * (1.0 - h - th) + 2.0 * D * lg - 2.0 * D * detail::safe_mul(1.0 - th, q_te);
    if (h != 0.0) f_t1 += h * (1.0 + 2.0 * D * lg - D * h);
    lcase = "theta<=1-h";
  } else {
    f_t1 = (1.0 - th) * (1.0 - D * (1.0 - th)) - 2.0 * D * detail::safe_mul(1.0 - th, q_te);
    lcase = e <= 1.0 - h ? "eta<=1-h<theta" : (b <= 1.0 - h ? "beta<=1-h<eta" : "1-h<beta");
  }
  // An unbounded width in an active light LP phase makes the light side vacuous.
  const double F_L = (light_lp && std::isinf(dwp)) ? -kInf : detail::safe_mul(q_ab * q_be, f_et + f_t1);

  r.ratio = std::min(F_H, F_L);
  r.case_taken = "H:" + hcase + ";L:" + lcase;
  const double m = static_cast<double>(in.m);
  r.success_prob = 1.0 - 2.0 * m * in.delta - m * std::exp(-(h + a) * in.N / 8.0) - m * std::exp(-(h + e) * in.N / 8.0);
  r.intermediate = {{"q_ab", q_ab}, {"f_ab", f_ab}, {"q_be", q_be}, {"f_be", heavy_max}, {"f_et", f_et},
                    {"q_te", q_te}, {"f_t1", f_t1}, {"F_H", F_H},     {"F_L", F_L}};
  r.vacuous = !(r.ratio > 0.0);
  return r;
}

/// alpha with 3 * width(alpha) = alpha at h = 0.
inline double sampling_fraction(double N, double delta) { return std::cbrt(72.0 * std::log(1.0 / delta) / N); }

struct Advice {
  PolicyParams params;
  BoundReport report;
  std::string regime;
  bool infeasible = false;
};

/// Parameters for the matching policy without history.
inline Advice cor1_params(double N, double delta, std::size_t m = 1) {
  if (!(N > 0.0)) throw std::invalid_argument("N must be > 0");
  Advice out;
  out.regime = "cor1";
  double alpha = sampling_fraction(N, delta);
  if (alpha > 1.0) {
    alpha = 1.0;
    out.infeasible = true;
  }
  out.params.alpha = alpha;
  out.params.beta = 1.0;
  out.params.gamma = 1.0;
  out.params.h = 0.0;
  out.params.delta = delta;
  auto& r = out.report;
  r.ratio = (1.0 - 4.0 * std::cbrt(9.0 * std::log(1.0 / delta) / N)) * (1.0 - std::exp(-1.0));
  r.success_prob = 1.0 - static_cast<double>(m) * delta - static_cast<double>(m) * std::exp(-alpha * N / 8.0);
  r.width = delta_width(0.0, alpha, N, delta);
  r.case_taken = "cor1";
  r.vacuous = out.infeasible || !(r.ratio > 0.0);
  return out;
}

/// Root of e^{D eta} = (5 - eta) / 4 in (0, 1).
inline double solve_eta1(std::size_t D) {
  if (D < 1) throw std::invalid_argument("D must be >= 1");
  const double d = static_cast<double>(D);
  auto g = [d](double x) { return std::exp(d * x) - (5.0 - x) / 4.0; };
  double lo = 0.0, hi = 1.0;
  while (hi - lo > 1e-15) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline double nomax_asymptotic_ratio(std::size_t D) {
  const double e1 = solve_eta1(D);
  return (1.0 / static_cast<double>(D)) * (1.0 - e1) / (5.0 - e1);
}

/// No max phases: beta = eta = eta1, theta = 1. The report is the exact
/// bound at these parameters.
inline Advice advise_nomax(double h, double N, std::size_t D, double delta, std::size_t m = 1) {
  Advice out;
  out.regime = "nomax";
  const double e1 = solve_eta1(D);
  double alpha = sampling_fraction(N, delta);
  if (alpha > e1) {
    alpha = e1;
    out.infeasible = true;
  }
  out.params = PolicyParams{alpha, e1, e1, 1.0, 1.0, 1.0 / (2.0 * static_cast<double>(D)), h, 1.0, delta};
  BoundInputs in{h, N, delta, D, m, out.params, std::nullopt, std::nullopt};
  out.report = theorem2_bound(in);
  out.report.vacuous = out.report.vacuous || out.infeasible;
  return out;
}

inline double nolp_h0(std::size_t D) {
  const double d = static_cast<double>(D);
  return (2.0 * d * d + 1.0) * (std::sqrt(1.0 + 1.0 / (4.0 * d * d)) - 1.0) + 1.0 / (2.0 * d);
}

/// No LP phases (beta = alpha, theta = eta). Picks the regime by h.
inline Advice advise_nolp(double h, std::size_t D) {
  if (!(h >= 0.0 && h <= 1.0)) throw std::invalid_argument("h must lie in [0, 1]");
  if (D < 1) throw std::invalid_argument("D must be >= 1");
  const double d = static_cast<double>(D);
  Advice out;
  double alpha, eta, ratio;
  if (h <= 1.0 / (2.0 * d)) {
    const double s = 2.0 * d * (1.0 + h) / (2.0 * d + 1.0);
    const double f1 = 1.0 - 2.0 * d * h + 2.0 * d * (1.0 + h) * std::log(s) + h - d * h * h;
    const double decay = std::exp(-f1 * (2.0 * d + 1.0) / (2.0 * (1.0 + h)));
    eta = s - h;
    alpha = s * decay - h;
    ratio = f1 * decay;
    out.regime = "nolp1";
  } else if (h >= nolp_h0(D)) {
    alpha = 1.0 - h;
    eta = 2.0 - 1.0 / (2.0 * d) - std::sqrt(1.0 + 1.0 / (4.0 * d * d));
    ratio = std::exp(1.0 - h - eta) * (1.0 - eta) * (1.0 - d * (1.0 - eta));
    out.regime = "nolp2";
  } else {
    eta = 1.0 - 1.0 / (2.0 * d);
    const double g = std::exp(1.0 / (2.0 * d) - h);
    const double a1 = std::exp(1.0 - 1.25 * g) - h;
    const double a2 = std::exp(-g) - h;
    if (a1 <= 1.0 - h) {
      alpha = std::max({a1, a2, 0.0});
      ratio = (1.0 / d) * (h + alpha) * (std::log(1.0 / (h + alpha)) + 1.0 - g);
      out.regime = "nolp3a";
    } else {
      alpha = 1.0 - h;
      ratio = g / (4.0 * d);
      out.regime = "nolp3b";
    }
  }
  out.params = PolicyParams{alpha, alpha, eta, eta, 1.0, 1.0, h, 1.0, 0.05};
  out.report.ratio = ratio;
  out.report.case_taken = out.regime;
  out.report.vacuous = !(ratio > 0.0);
  return out;
}

/// Parameters for the GAP policy without history; N fixes alpha.
inline Advice cor_nosamples_gap(std::size_t D, double N = 1e6, double delta = 0.05) {
  if (D < 1) throw std::invalid_argument("D must be >= 1");
  const double d = static_cast<double>(D);
  Advice out;
  out.regime = "nosamples";
  const double eta = 2.0 * d / (2.0 * d + 1.0);
  out.params = PolicyParams{sampling_fraction(N, delta), 0.935 * eta, eta, eta, 0.084 * (2.0 * d + 1.0) / (d * d),
                            1.0, 0.0, 1.0, delta};
  if (out.params.alpha > out.params.beta) out.infeasible = true;
  out.report.ratio = std::exp(-0.225) / (4.0 * d + 2.0);
  out.report.case_taken = out.regime;
  return out;
}

enum class BoundKind { T1, T2 };

struct GridPoint {
  PolicyParams params;
  BoundReport report;
};

struct GridResult {
  std::vector<GridPoint> table;
  std::size_t best = 0;
  bool empty() const { return table.empty(); }
  const GridPoint& argmax() const { return table.at(best); }
};

/// Exhaustive sweep over ordered parameter tuples on the uniform grid
/// {0, 1/(r-1), ..., 1}. T1 sweeps (alpha, beta, gamma); T2 sweeps
/// (alpha, beta, eta, theta, gamma, gamma'). The first tuple in lexicographic
/// order attaining the maximum wins.
inline GridResult grid_optimize(BoundKind kind, const BoundInputs& base, std::size_t resolution) {
  if (resolution < 2) throw std::invalid_argument("grid resolution must be >= 2");
  const std::size_t r = resolution;
  auto val = [r](std::size_t k) { return static_cast<double>(k) / static_cast<double>(r - 1); };
  GridResult out;
  double best = -kInf;
  auto consider = [&](const PolicyParams& p) {
    BoundInputs in = base;
    in.params = p;
    in.params.h = base.h;
    GridPoint gp{in.params, kind == BoundKind::T1 ? theorem1_bound(in) : theorem2_bound(in)};
    if (gp.report.ratio > best + 1e-12 || out.table.empty()) {
      if (gp.report.ratio > best + 1e-12) best = gp.report.ratio;
      out.best = out.table.size();
    }
    out.table.push_back(std::move(gp));
  };
  for (std::size_t ia = 0; ia < r; ++ia)
    for (std::size_t ib = ia; ib < r; ++ib) {
      if (kind == BoundKind::T1) {
        for (std::size_t ig = 0; ig < r; ++ig) {
          PolicyParams p;
          p.alpha = val(ia);
          p.beta = val(ib);
          p.gamma = val(ig);
          consider(p);
        }
        continue;
      }
      for (std::size_t ie = ib; ie < r; ++ie)
        for (std::size_t it = ie; it < r; ++it)
          for (std::size_t ig = 0; ig < r; ++ig)
            for (std::size_t igp = 0; igp < r; ++igp) {
              PolicyParams p{val(ia), val(ib), val(ie), val(it), val(ig), val(igp), base.h, 1.0, base.delta};
              consider(p);
            }
    }
  return out;
}

inline const std::vector<std::string>& surface_intermediate_columns() {
  static const std::vector<std::string> cols{"Q",    "S",    "lp_term", "q_ab", "f_ab", "q_be", "f_be",
                                             "f_et", "q_te", "f_t1",    "F_H",  "F_L"};
  return cols;
}

inline void write_surface_header(std::ostream& out) {
  out << "h,alpha,beta,eta,theta,gamma,gamma_prime,width,width_prime";
  for (const auto& c : surface_intermediate_columns()) out << ',' << c;
  out << ",ratio,case,argmax\n";
}

/// One row per grid point; the last column marks the argmax.
inline void write_surface_rows(const GridResult& grid, std::ostream& out) {
  for (std::size_t k = 0; k < grid.table.size(); ++k) {
    const auto& [p, rep] = grid.table[k];
    out << format_double(p.h) << ',' << format_double(p.alpha) << ',' << format_double(p.beta) << ','
        << format_double(p.eta) << ',' << format_double(p.theta) << ',' << format_double(p.gamma) << ','
        << format_double(p.gamma_prime) << ',' << format_double(rep.width) << ',' << format_double(rep.width_prime);
    for (const auto& c : surface_intermediate_columns()) {
      out << ',';
      if (auto it = rep.intermediate.find(c); it != rep.intermediate.end()) out << format_double(it->second);
    }
    out << ',' << format_double(rep.ratio) << ',' << rep.case_taken << ',' << (k == grid.best ? 1 : 0) << '\n';
  }
}

inline void write_surface_csv(const GridResult& grid, std::ostream& out) {
  write_surface_header(out);
  write_surface_rows(grid, out);
}

}  // namespace pgap
