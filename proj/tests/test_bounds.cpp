#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "pgap/bounds.hpp"

using pgap::BoundInputs;
using pgap::PolicyParams;

namespace {

PolicyParams pp(double a, double b, double e, double th, double g, double gp) {
  PolicyParams p;
  p.alpha = a;
  p.beta = b;
  p.eta = e;
  p.theta = th;
  p.gamma = g;
  p.gamma_prime = gp;
  return p;
}

BoundInputs inputs(double h, const PolicyParams& p, std::size_t D = 1, double N = 1e4, double delta = 0.05) {
  BoundInputs in;
  in.h = h;
  in.N = N;
  in.delta = delta;
  in.D = D;
  in.params = p;
  return in;
}

BoundInputs exact(double h, const PolicyParams& p, std::size_t D = 1) {
  auto in = inputs(h, p, D);
  in.width = 0.0;
  in.width_prime = 0.0;
  return in;
}

// Hand evaluation of the matching bound.
double t1_by_hand(double h, double a, double b, double g, double dw) {
  const double Q = b == a ? 1.0 : std::exp(-g * (1 + dw) * (b - a) / (1 - a));
  const double S = b <= 1 - h ? (h + b) * (std::log(1 / (h + b)) + 1 - std::exp(-h)) : 1 - std::exp(-(1 - b));
  return (1 - 3 * dw) * (1 - a) * (1 - Q) + Q * S;
}

}  // namespace

TEST(DeltaWidth, Examples) {
  const double d = 0.05;
  EXPECT_NEAR(pgap::delta_width(0.5, 0.5, 8 * std::log(1 / d), d), 1.0, 1e-12);
  EXPECT_NEAR(pgap::delta_width(0.0, 0.1, 10000, 0.01), std::sqrt(8 * 4.605170185988091 / 1000), 1e-12);
  EXPECT_NEAR(pgap::delta_width(0.0, 0.1, 10000, 0.01), 0.19194, 1e-5);
  EXPECT_LT(pgap::delta_width(0.2, 0.1, 1e12, 0.01), 1e-4);
  EXPECT_TRUE(std::isinf(pgap::delta_width(0.0, 0.0, 100, 0.01)));
  EXPECT_THROW(pgap::delta_width(0.1, 0.1, 0, 0.01), std::invalid_argument);
}

TEST(Theorem1, ClassicalLimit) {
  auto r = pgap::theorem1_bound(exact(0.0, pp(0, 1, 1, 1, 1, 1)));
  EXPECT_NEAR(r.ratio, 1 - std::exp(-1.0), 1e-12);
  EXPECT_EQ(r.case_taken, "beta<=1-h");
}

TEST(Theorem1, CollapsedLpPhaseIsPureMaxTerm) {
  for (double g : {0.0, 0.4, 1.0}) {
    auto r = pgap::theorem1_bound(exact(0.3, pp(0.2, 0.2, 1, 1, g, 1)));
    EXPECT_NEAR(r.intermediate.at("Q"), 1.0, 0.0);
    EXPECT_NEAR(r.ratio, 0.5 * (std::log(2.0) + 1 - std::exp(-0.3)), 1e-12);
  }
  // alpha = beta = 1 must not produce 0/0
  auto r = pgap::theorem1_bound(exact(0.0, pp(1, 1, 1, 1, 1, 1)));
  EXPECT_FALSE(std::isnan(r.ratio));
}

TEST(Theorem1, AgreesWithHandFormula) {
  for (double h : {0.0, 0.2, 0.6, 1.0})
    for (double a : {0.0, 0.1, 0.4})
      for (double b : {0.4, 0.7, 1.0})
        for (double g : {0.3, 1.0}) {
          auto in = inputs(h, pp(a, b, 1, 1, g, 1), 1, 5e4, 0.05);
          if (h + a == 0.0) continue;
          const double dw = pgap::delta_width(h, a, 5e4, 0.05);
          auto r = pgap::theorem1_bound(in);
          EXPECT_NEAR(r.ratio, t1_by_hand(h, a, b, g, dw), 1e-12);
          EXPECT_NEAR(r.width, dw, 0.0);
          EXPECT_NEAR(r.success_prob, 1 - 0.05 - std::exp(-(h + a) * 5e4 / 8), 1e-12);
        }
}

TEST(Cor1, Examples) {
  auto c = pgap::cor1_params(1e4, 0.01);
  EXPECT_NEAR(c.params.alpha, std::cbrt(72 * std::log(100.0) / 1e4), 1e-15);
  EXPECT_NEAR(c.params.alpha, 0.32143, 2e-4);
  EXPECT_NEAR(c.report.ratio, 0.22597, 1e-5);
  EXPECT_FALSE(c.report.vacuous);
  EXPECT_EQ(c.params.beta, 1.0);
  EXPECT_EQ(c.params.gamma, 1.0);
  // alpha balances 3 Delta = alpha at h = 0
  EXPECT_NEAR(3 * pgap::delta_width(0, c.params.alpha, 1e4, 0.01), c.params.alpha, 1e-12);
  EXPECT_NEAR(pgap::cor1_params(1e15, 0.01).report.ratio, 1 - std::exp(-1.0), 1e-3);
  auto small = pgap::cor1_params(100, 0.01);
  EXPECT_LT(small.report.ratio, 0.0);
  EXPECT_TRUE(small.report.vacuous);
  EXPECT_LE(small.params.alpha, 1.0);
}

TEST(QHeavyLp, Examples) {
  EXPECT_EQ(pgap::q_heavy_lp(0.3, 0.3, 1, 0.2, 3), 1.0);
  EXPECT_NEAR(pgap::q_heavy_lp(0, 1, 1, 0, 1), std::exp(-1.0), 1e-15);
  const double q1 = pgap::q_heavy_lp(0.1, 0.6, 0.7, 0.1, 1);
  EXPECT_NEAR(pgap::q_heavy_lp(0.1, 0.6, 0.7, 0.1, 2), q1 * q1, 1e-15);
  EXPECT_THROW(pgap::q_heavy_lp(0.5, 0.4, 1, 0, 1), std::invalid_argument);
}

TEST(Theorem2, PhaseCollapse) {
  auto r = pgap::theorem2_bound(exact(0.2, pp(0.3, 0.3, 0.6, 0.6, 0.5, 0.5)));
  EXPECT_EQ(r.intermediate.at("f_ab"), 0.0);
  EXPECT_EQ(r.intermediate.at("f_et"), 0.0);
  EXPECT_EQ(r.intermediate.at("q_ab"), 1.0);
  EXPECT_EQ(r.intermediate.at("q_te"), 0.0);
}

TEST(Theorem2, NoSamplesAdvisorPoint) {
  const double e = 2.0 / 3.0;
  auto r = pgap::theorem2_bound(exact(0.0, pp(0, 0.935 * e, e, e, 0.252, 1)));
  EXPECT_GE(r.ratio, std::exp(-0.225) / 6 - 1e-9);
  EXPECT_NEAR(std::exp(-0.225) / 6, 0.133086, 1e-6);
}

TEST(Theorem2, AllPhasesCollapsedIsPureLightMax) {
  // D = 1, h = 0.5, alpha = 0.5: only the light max term survives, f1 at theta = 0.5.
  auto r = pgap::theorem2_bound(exact(0.5, pp(0.5, 0.5, 0.5, 0.5, 1, 1)));
  const double f1 = 3 * (1 - 0.5 - 0.5) + 2 * std::log(1.0) + 0.5 * (1 + 2 * std::log(1.0) - 0.5);
  EXPECT_NEAR(r.intermediate.at("f_t1"), f1, 1e-12);
  EXPECT_NEAR(r.intermediate.at("F_L"), f1, 1e-12);
  EXPECT_EQ(r.intermediate.at("q_te"), 0.0);
}

TEST(Theorem2, HeavySideEqualsTheorem1AtUnitDimension) {
  for (double h : {0.0, 0.25, 0.5, 0.9})
    for (double a = 0.05; a <= 1.0; a += 0.15)
      for (double b = a; b <= 1.0; b += 0.15)
        for (double g : {0.0, 0.5, 1.0}) {
          auto in = inputs(h, pp(a, b, 1, 1, g, 0), 1, 1e5, 0.05);
          EXPECT_NEAR(pgap::theorem2_bound(in).intermediate.at("F_H"), pgap::theorem1_bound(in).ratio, 1e-12)
              << h << " " << a << " " << b << " " << g;
        }
}

TEST(Theorem2, RatioIsMinOfSides) {
  auto r = pgap::theorem2_bound(inputs(0.3, pp(0.1, 0.2, 0.4, 0.7, 0.8, 0.5), 2, 1e5));
  EXPECT_EQ(r.ratio, std::min(r.intermediate.at("F_H"), r.intermediate.at("F_L")));
  EXPECT_NEAR(r.success_prob,
              1 - 2 * 0.05 - std::exp(-(0.3 + 0.1) * 1e5 / 8) - std::exp(-(0.3 + 0.4) * 1e5 / 8), 1e-12);
}

TEST(Theorem2, NeverNaNOnFeasibleRegion) {
  const double v[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  for (double h : v)
    for (double a : v)
      for (double b : v)
        for (double e : v)
          for (double th : v) {
            if (!(a <= b && b <= e && e <= th)) continue;
            for (double g : {0.0, 1.0})
              for (std::size_t D : {1u, 3u}) {
                auto r = pgap::theorem2_bound(inputs(h, pp(a, b, e, th, g, g), D, 1e3));
                EXPECT_FALSE(std::isnan(r.ratio)) << h << a << b << e << th;
                for (const auto& [k, x] : r.intermediate) EXPECT_FALSE(std::isnan(x)) << k;
                // a zero sampling window gives infinite width and zero survival
                if (h + a > 0) {
                  EXPECT_GT(r.intermediate.at("q_ab"), 0.0);
                }
                EXPECT_LE(r.intermediate.at("q_ab"), 1.0);
                if (h + b > 0) {
                  EXPECT_GT(r.intermediate.at("q_be"), 0.0);
                }
                EXPECT_GE(r.intermediate.at("q_be"), 0.0);
                EXPECT_LE(r.intermediate.at("q_be"), 1.0 + 1e-12);
                EXPECT_GE(r.intermediate.at("q_te"), 0.0);
              }
          }
  auto t1 = pgap::theorem1_bound(inputs(0, pp(0, 0.5, 1, 1, 1, 1)));
  EXPECT_FALSE(std::isnan(t1.ratio));
}

TEST(Eta1, Values) {
  const double e1 = pgap::solve_eta1(1);
  EXPECT_NEAR(e1, 0.18537, 1e-5);
  EXPECT_NEAR(std::exp(e1), (5 - e1) / 4, 1e-13);
  const double e2 = pgap::solve_eta1(2);
  EXPECT_NEAR(std::exp(2 * e2), (5 - e2) / 4, 1e-13);
  EXPECT_NEAR(e2, 0.10133, 1e-5);
  EXPECT_LT(pgap::solve_eta1(50), 0.005);
  EXPECT_GT(pgap::solve_eta1(50), 0.0);
}

TEST(Nomax, AsymptoticAndFinite) {
  const double e1 = pgap::solve_eta1(1);
  EXPECT_NEAR(pgap::nomax_asymptotic_ratio(1), (1 - e1) / (5 - e1), 1e-15);
  EXPECT_NEAR(pgap::nomax_asymptotic_ratio(1), 0.16920, 1e-5);
  const double e2 = pgap::solve_eta1(2);
  EXPECT_NEAR(pgap::nomax_asymptotic_ratio(2), 0.5 * (1 - e2) / (5 - e2), 1e-15);

  // The exact bound approaches the asymptote slowly: the heavy LP term needs
  // alpha << eta1, so at N = 1e6 it is still about 0.104.
  auto a = pgap::advise_nomax(0.0, 1e6, 1, 0.01);
  EXPECT_FALSE(a.infeasible);
  EXPECT_NEAR(a.report.ratio, 0.103838, 1e-6);
  double prev = 0.0;
  for (double N : {1e6, 1e8, 1e10, 1e14}) {
    const double r = pgap::advise_nomax(0.0, N, 1, 0.01).report.ratio;
    EXPECT_GT(r, prev);
    EXPECT_LE(r, 0.16920);
    prev = r;
  }
  EXPECT_NEAR(prev, 0.16920, 1e-3);
  EXPECT_EQ(a.params.beta, e1);
  EXPECT_EQ(a.params.eta, e1);
  EXPECT_EQ(a.params.theta, 1.0);
  EXPECT_EQ(a.params.gamma_prime, 0.5);

  auto small = pgap::advise_nomax(0.0, 1e3, 1, 0.01);
  EXPECT_TRUE(small.infeasible);
  EXPECT_LE(small.params.alpha, small.params.beta);
}

TEST(Nolp, RegimeExamples) {
  auto a = pgap::advise_nolp(0.0, 1);
  EXPECT_EQ(a.regime, "nolp1");
  EXPECT_NEAR(a.params.eta, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(a.params.alpha, 0.50205, 2e-5);
  EXPECT_NEAR(a.report.ratio, 0.14240, 5e-5);
  const double f1 = 1 + 2 * std::log(2.0 / 3.0);
  EXPECT_NEAR(f1, 0.18907, 1e-5);
  EXPECT_NEAR(a.report.ratio, f1 * std::exp(-1.5 * f1), 1e-12);
  // cross-check: the heavy max term (h + alpha) ln((h + eta) / (h + alpha)) equals the ratio
  EXPECT_NEAR(a.params.alpha * std::log(a.params.eta / a.params.alpha), a.report.ratio, 1e-9);

  EXPECT_NEAR(pgap::nolp_h0(1), 3 * (std::sqrt(1.25) - 1) + 0.5, 1e-15);
  EXPECT_NEAR(pgap::nolp_h0(1), 0.854102, 1e-6);

  auto b = pgap::advise_nolp(0.9, 1);
  EXPECT_EQ(b.regime, "nolp2");
  EXPECT_NEAR(b.params.eta, 0.381966, 1e-6);
  EXPECT_NEAR(b.report.ratio, std::exp(-0.281966) * 0.618034 * 0.381966, 1e-6);
  EXPECT_NEAR(b.report.ratio, 0.17807, 1e-5);
  EXPECT_NEAR(b.params.alpha, 0.1, 1e-12);

  EXPECT_EQ(pgap::advise_nolp(0.6, 1).regime.substr(0, 5), "nolp3");
}

TEST(Nolp, ConsistentWithTheorem2) {
  for (std::size_t D : {1u, 2u, 3u, 5u})
    for (int k = 0; k <= 40; ++k) {
      const double h = k / 40.0;
      auto a = pgap::advise_nolp(h, D);
      EXPECT_EQ(a.params.alpha, a.params.beta);
      EXPECT_EQ(a.params.eta, a.params.theta);
      EXPECT_NO_THROW(a.params.validate(true));
      auto r = pgap::theorem2_bound(exact(h, a.params, D));
      EXPECT_NEAR(r.ratio, a.report.ratio, 1e-9) << "D=" << D << " h=" << h << " " << a.regime;
    }
}

TEST(NoSamples, Examples) {
  auto a = pgap::cor_nosamples_gap(1);
  EXPECT_NEAR(a.params.beta, 0.935 * 2 / 3, 1e-15);
  EXPECT_NEAR(a.params.beta, 0.62333, 1e-5);
  EXPECT_NEAR(a.params.gamma, 0.252, 1e-15);
  EXPECT_NEAR(a.report.ratio, 0.133086, 1e-6);
  auto b = pgap::cor_nosamples_gap(2);
  EXPECT_NEAR(b.params.beta, 0.748, 1e-15);
  EXPECT_NEAR(b.params.gamma, 0.105, 1e-15);
  EXPECT_NEAR(b.report.ratio, 0.0798516, 1e-7);
  EXPECT_LT(pgap::cor_nosamples_gap(1000).report.ratio, 1e-3);
}

TEST(Grid, Theorem1FullHistoryNeedsNoSampling) {
  for (double N : {1e3, 1e5, 1e8}) {
    auto g = pgap::grid_optimize(pgap::BoundKind::T1, inputs(1.0, pp(0, 1, 1, 1, 1, 1), 1, N), 11);
    EXPECT_EQ(g.argmax().params.alpha, 0.0) << N;
  }
}

TEST(Grid, Theorem1MonotoneInNAndH) {
  double prev = -1e9;
  for (double N : {1e2, 1e3, 1e4, 1e5, 1e6}) {
    const double v = pgap::grid_optimize(pgap::BoundKind::T1, inputs(0.3, pp(0, 1, 1, 1, 1, 1), 1, N), 11).argmax().report.ratio;
    EXPECT_GE(v, prev - 1e-12);
    prev = v;
  }
  prev = -1e9;
  for (double h = 0.0; h <= 1.0; h += 0.1) {
    const double v = pgap::grid_optimize(pgap::BoundKind::T1, inputs(h, pp(0, 1, 1, 1, 1, 1), 1, 1e4), 11).argmax().report.ratio;
    EXPECT_GE(v, prev - 1e-12) << h;
    prev = v;
  }
}

TEST(Grid, Theorem1ArgmaxAlphaShrinksWithHistory) {
  double prev = 2.0;
  for (double h = 0.0; h <= 1.0; h += 0.1) {
    const double a =
        pgap::grid_optimize(pgap::BoundKind::T1, inputs(h, pp(0, 1, 1, 1, 1, 1), 1, 1e5), 21).argmax().params.alpha;
    EXPECT_LE(a, prev + 1e-12) << h;
    prev = a;
  }
}

TEST(Grid, Theorem2HigherDimensionIsHarder) {
  for (double h : {0.0, 0.5, 1.0}) {
    auto g1 = pgap::grid_optimize(pgap::BoundKind::T2, inputs(h, pp(0, 1, 1, 1, 1, 1), 1, 1e6), 5);
    auto g2 = pgap::grid_optimize(pgap::BoundKind::T2, inputs(h, pp(0, 1, 1, 1, 1, 1), 2, 1e6), 5);
    EXPECT_LT(g2.argmax().report.ratio, g1.argmax().report.ratio) << h;
  }
}

TEST(Grid, TableCoversOrderedTuplesAndTiesAreLexicographic) {
  auto g = pgap::grid_optimize(pgap::BoundKind::T1, inputs(0.2, pp(0, 1, 1, 1, 1, 1), 1, 1e4), 3);
  EXPECT_EQ(g.table.size(), 6u * 3u);  // (alpha <= beta pairs) x gamma
  for (std::size_t k = 0; k < g.table.size(); ++k) {
    EXPECT_LE(g.table[k].report.ratio, g.argmax().report.ratio);
    if (k < g.best) {
      EXPECT_LT(g.table[k].report.ratio, g.argmax().report.ratio);
    }
  }
  EXPECT_THROW(pgap::grid_optimize(pgap::BoundKind::T1, inputs(0.2, pp(0, 1, 1, 1, 1, 1)), 1), std::invalid_argument);
}

TEST(Surface, CsvShape) {
  auto g = pgap::grid_optimize(pgap::BoundKind::T2, inputs(0.4, pp(0, 1, 1, 1, 1, 1), 2, 1e5), 3);
  std::ostringstream ss;
  pgap::write_surface_csv(g, ss);
  std::istringstream in(ss.str());
  std::string line;
  std::getline(in, line);
  const auto columns = std::count(line.begin(), line.end(), ',') + 1;
  EXPECT_EQ(line.rfind("h,alpha,beta,eta,theta,gamma,gamma_prime", 0), 0u);
  std::size_t rows = 0, flagged = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ',') + 1, columns);
    flagged += line.back() == '1';
  }
  EXPECT_EQ(rows, g.table.size());
  EXPECT_EQ(flagged, 1u);
}
