#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "pgap/arrivals.hpp"
#include "pgap/policy_matching.hpp"
#include "support/generators.hpp"
#include "support/helpers.hpp"
#include "support/reference_sim.hpp"

using pgap::Phase;
using pgap::PolicyParams;

namespace {

PolicyParams params(double a, double b, double g, double h, double T) {
  PolicyParams p;
  p.alpha = a;
  p.beta = b;
  p.gamma = g;
  p.h = h;
  p.T = T;
  return p;
}

pgap::GapInstance two_by_two() { return pgap::make_matching_instance({{0.9, 0.2}, {0.4, 0.7}}, {0.6, 0.4}); }

}  // namespace

TEST(Alg1, ZeroGammaRejectsWholeLpPhase) {
  auto inst = two_by_two();
  auto tr = pgap::sample_trace(inst.rates(), 100.0, 0.2, 4);
  auto log = pgap::run_alg1(inst, tr, params(0.1, 0.8, 0.0, 0.2, 100.0), 9);
  std::size_t lp_arrivals = 0;
  for (const auto& d : log.decisions)
    if (d.phase == Phase::Lp) {
      ++lp_arrivals;
      EXPECT_EQ(d.bin, -1);
    }
  EXPECT_GT(lp_arrivals, 0u);
  EXPECT_EQ(log.reward_in(Phase::Lp), 0.0);
}

TEST(Alg1, PureMaxPhaseTakesFirstArrivalOnSingleBin) {
  // One bin, one type, no history: the first online vertex is the only copy
  // in V', so floor(U * 1) = 0 always selects the bin.
  auto inst = pgap::make_matching_instance({{1.0}}, {1.0});
  auto tr = pgap::sample_trace({1.0}, 20.0, 0.0, 3);
  ASSERT_GT(tr.events.size(), 1u);
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto log = pgap::run_alg1(inst, tr, params(0, 0, 1, 0, 20.0), s);
    EXPECT_EQ(log.decisions.front().bin, 0);
    EXPECT_DOUBLE_EQ(log.total_reward, 1.0);
  }
}

TEST(Alg1, FullHistoryFreezesVPrime) {
  // h = 1: V' is the history plus the current vertex, so with k history
  // copies of the only type each arrival takes the bin with chance 1/(k+1).
  auto inst = pgap::make_matching_instance({{1.0}}, {1.0});
  auto tr = pgap::sample_trace({1.0}, 10.0, 1.0, 11);
  const std::size_t k = tr.first_online();
  ASSERT_GT(k, 0u);
  int first_taken = 0;
  const int runs = 4000;
  for (int s = 0; s < runs; ++s) {
    auto log = pgap::run_alg1(inst, tr, params(0, 0, 1, 1.0, 10.0), s);
    EXPECT_LE(log.total_reward, 1.0);
    first_taken += log.decisions.front().bin == 0;
  }
  const double p = 1.0 / static_cast<double>(k + 1);
  EXPECT_NEAR(first_taken / static_cast<double>(runs), p, 4 * std::sqrt(p * (1 - p) / runs) + 1e-3);
}

TEST(Alg1, RejectsBadInputs) {
  auto inst = two_by_two();
  auto tr = pgap::sample_trace(inst.rates(), 50.0, 0.0, 1);
  EXPECT_THROW(pgap::run_alg1(inst, tr, params(0.1, 0.5, 1, 0, 60.0), 1), std::invalid_argument);
  EXPECT_THROW(pgap::run_alg1(inst, tr, params(0.6, 0.5, 1, 0, 50.0), 1), std::invalid_argument);
  auto gap = pgap::GapInstance({{2.0}}, {1.0}, {{1.0}}, {{{1.0}}});
  EXPECT_THROW(pgap::run_alg1(gap, tr, params(0.1, 0.5, 1, 0, 50.0), 1), std::invalid_argument);
}

TEST(Alg1, Deterministic) {
  auto inst = two_by_two();
  auto tr = pgap::sample_trace(inst.rates(), 200.0, 0.3, 21);
  auto p = params(0.1, 0.6, 1, 0.3, 200.0);
  EXPECT_EQ(helpers::bins_of(pgap::run_alg1(inst, tr, p, 5)), helpers::bins_of(pgap::run_alg1(inst, tr, p, 5)));
}

TEST(Alg1, MatchesReferenceSimulation) {
  auto inst = two_by_two();
  auto p = params(0.1, 0.6, 1, 0.3, 200.0);
  for (std::uint64_t s = 0; s < 10; ++s) {
    auto tr = pgap::sample_trace(inst.rates(), 200.0, 0.3, 100 + s);
    auto live = pgap::run_alg1(inst, tr, p, s);
    auto ref = reference::alg1(inst, tr, p, s);
    EXPECT_EQ(helpers::bins_of(live), ref.bins) << "seed " << s;
    EXPECT_NEAR(live.total_reward, ref.reward, 1e-9);
  }
}

TEST(Alg1, RandomInstancesMatchReference) {
  gen::Engine e(31);
  for (int k = 0; k < 15; ++k) {
    const std::size_t m = gen::unif_int(e, 1, 4), n = gen::unif_int(e, 1, 4);
    std::vector<std::vector<double>> w(m, std::vector<double>(n));
    for (auto& row : w)
      for (auto& x : row) x = gen::unif_int(e, 0, 4) == 0 ? 0.0 : gen::unif(e, 0, 1);
    std::vector<double> rates(n);
    for (auto& l : rates) l = gen::unif(e, 0.05, 0.5);
    auto inst = pgap::make_matching_instance(w, rates);
    const double a = gen::unif(e, 0, 0.5), b = gen::unif(e, a, 1), h = gen::unif(e, 0, 1);
    auto p = params(a, b, gen::unif(e, 0, 1), h, 40.0);
    auto tr = pgap::sample_trace(rates, 40.0, h, 500 + k);
    auto live = pgap::run_alg1(inst, tr, p, k);
    auto ref = reference::alg1(inst, tr, p, k);
    EXPECT_EQ(helpers::bins_of(live), ref.bins) << "case " << k;
  }
}

TEST(Alg1, FrozenReward) {
  auto inst = two_by_two();
  auto tr = pgap::sample_trace(inst.rates(), 200.0, 0.3, 2024);
  auto log = pgap::run_alg1(inst, tr, params(0.1, 0.6, 1, 0.3, 200.0), 7);
  EXPECT_NEAR(log.total_reward, 1.6, 1e-12);
}

TEST(Alg1, InvariantsOnRandomInstances) {
  gen::Engine e(41);
  for (int k = 0; k < 40; ++k) {
    const std::size_t m = gen::unif_int(e, 1, 5), n = gen::unif_int(e, 1, 5);
    std::vector<std::vector<double>> w(m, std::vector<double>(n));
    for (auto& row : w)
      for (auto& x : row) x = gen::unif(e, 0, 1);
    std::vector<double> rates(n);
    for (auto& l : rates) l = gen::unif(e, 0.05, 0.5);
    auto inst = pgap::make_matching_instance(w, rates);
    const double T = 30.0, a = gen::unif(e, 0, 0.6), b = gen::unif(e, a, 1), h = gen::unif(e, 0, 1);
    auto p = params(a, b, gen::unif(e, 0, 1), h, T);
    auto tr = pgap::sample_trace(rates, T, h, 900 + k);
    auto log = pgap::run_alg1(inst, tr, p, k);

    EXPECT_EQ(pgap::verify_log(inst, tr, log, a * T), std::nullopt) << "case " << k;
    std::set<long> used;
    double sum = 0.0;
    for (const auto& d : log.decisions) {
      if (d.t < a * T) {
        EXPECT_EQ(d.bin, -1);
      }
      if (d.bin >= 0) {
        EXPECT_TRUE(used.insert(d.bin).second);
        EXPECT_DOUBLE_EQ(d.reward, inst.weight(d.bin, d.type));
      }
      sum += d.reward;
    }
    EXPECT_NEAR(sum, log.total_reward, 1e-9);
    EXPECT_LE(log.total_reward, helpers::matching_opt(inst, tr) + 1e-9);
  }
}

TEST(SamPresets, Values) {
  EXPECT_NEAR(pgap::sam_alpha(0.0), std::exp(-1.0), 1e-15);
  EXPECT_EQ(pgap::sam_alpha(1.0), 0.0);
  auto s1 = pgap::preset_sam(0.0, pgap::SamVariant::Sam1);
  EXPECT_NEAR(s1.alpha, std::exp(-1.0), 1e-15);
  EXPECT_EQ(s1.beta, 1.0);
  EXPECT_EQ(pgap::preset_sam(1.0, pgap::SamVariant::Sam1).beta, 0.0);
  EXPECT_EQ(pgap::preset_sam(1.0, pgap::SamVariant::Sam1).alpha, 0.0);
  auto s2 = pgap::preset_sam(0.3, pgap::SamVariant::Sam2);
  EXPECT_EQ(s2.beta, 1.0);
  EXPECT_NEAR(s2.alpha, std::exp(-std::exp(-0.3)) - 0.3, 1e-15);
  // alpha never exceeds beta = 1 - h for Sam1
  for (double h = 0.0; h <= 1.0; h += 0.05) {
    auto p = pgap::preset_sam(h, pgap::SamVariant::Sam1);
    EXPECT_LE(p.alpha, p.beta);
    EXPECT_NO_THROW(p.validate(false));
  }
  EXPECT_THROW(pgap::preset_sam(1.5, pgap::SamVariant::Sam2), std::invalid_argument);
}
