#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "vlab/core.hpp"
#include "vlab/random.hpp"

using namespace vlab;

namespace {

const BaseSequence m232({2, 3, 2});

// Digit-by-digit coset membership, independent of the rank arithmetic.
bool in_coset(const GroupPoint& y, const GroupPoint& x, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k)
    if (y.digits[k] != x.digits[k]) return false;
  return true;
}

// sup over lambda of lambda * mu(|f| > lambda)^{1/p}, lambda taken just below
// every value and at every midpoint.
double weak_norm_bruteforce(const FiniteFunction& f, double p) {
  std::vector<double> mags;
  for (auto v : f.values()) mags.push_back(std::abs(v));
  std::set<double> lambdas;
  for (double v : mags) {
    if (v > 0) lambdas.insert(v * (1 - 1e-13));
    for (double w : mags) lambdas.insert(0.5 * (v + w));
  }
  double best = 0;
  for (double lambda : lambdas) {
    if (lambda <= 0) continue;
    std::size_t count = 0;
    for (double v : mags) count += v > lambda;
    best = std::max(best, lambda * std::pow(double(count) / double(mags.size()), 1 / p));
  }
  return best;
}

}  // namespace

TEST(BaseSequence, PowersAreRunningProducts) {
  EXPECT_EQ(m232.resolution(), 3u);
  EXPECT_EQ(m232.size(), 12u);
  const std::vector<std::size_t> expected = {1, 2, 6, 12};
  EXPECT_EQ(std::vector<std::size_t>(m232.powers().begin(), m232.powers().end()), expected);
  EXPECT_EQ(m232.max_base(), 3u);
  EXPECT_FALSE(m232.is_walsh());
  EXPECT_TRUE(BaseSequence::walsh(4).is_walsh());
  EXPECT_EQ(BaseSequence::walsh(4).size(), 16u);
}

TEST(BaseSequence, RejectsInvalidSequences) {
  EXPECT_THROW(BaseSequence(std::vector<std::uint32_t>{}), DomainError);
  EXPECT_THROW(BaseSequence({2, 1, 2}), DomainError);
  EXPECT_THROW(BaseSequence::walsh(17), DomainError);
  EXPECT_NO_THROW(BaseSequence::walsh(16));
  EXPECT_THROW(BaseSequence::walsh(6, 32), DomainError);
  EXPECT_THROW(BaseSequence::walsh(2, std::size_t{1} << 17), DomainError);
}

TEST(BaseSequence, Truncation) {
  EXPECT_EQ(m232.truncated(2), BaseSequence({2, 3}));
  EXPECT_THROW(m232.truncated(0), DomainError);
  EXPECT_THROW(m232.truncated(4), DomainError);
}

TEST(GroupPoint, UnrankExample) {
  EXPECT_EQ(unrank(5, m232), (GroupPoint{{1, 2, 0}}));
  EXPECT_EQ(rank(GroupPoint{{0, 0, 0}}, m232), 0u);
}

TEST(GroupPoint, RankRoundTripExhaustive) {
  for (std::size_t r = 0; r < m232.size(); ++r) EXPECT_EQ(rank(unrank(r, m232), m232), r);
  const BaseSequence b({3, 5, 2, 4});
  std::set<std::size_t> seen;
  for (std::size_t r = 0; r < b.size(); ++r) {
    const GroupPoint x = unrank(r, b);
    EXPECT_EQ(rank(x, b), r);
    seen.insert(x.digits[0] + 3 * x.digits[1] + 15 * x.digits[2] + 30 * x.digits[3]);
  }
  EXPECT_EQ(seen.size(), b.size());
}

TEST(GroupPoint, DigitOutOfRange) {
  EXPECT_THROW(rank(GroupPoint{{0, 3, 0}}, m232), DomainError);
  EXPECT_THROW(rank(GroupPoint{{0, 0}}, m232), DomainError);
  EXPECT_THROW(unrank(12, m232), DomainError);
}

TEST(GroupArithmetic, Examples) {
  EXPECT_EQ(group_add(GroupPoint{{1, 2, 0}}, GroupPoint{{1, 2, 1}}, m232), (GroupPoint{{0, 1, 1}}));
  const GroupPoint x{{1, 1, 1}};
  EXPECT_EQ(group_add(x, zero_point(m232), m232), x);
  EXPECT_THROW(group_add(x, GroupPoint{{0, 0}}, m232), DomainError);
  EXPECT_THROW(group_sub(x, GroupPoint{{0, 0, 0, 0}}, m232), DomainError);
}

TEST(GroupArithmetic, ExhaustiveAxiomsOn232) {
  const std::size_t M = m232.size();
  for (std::size_t a = 0; a < M; ++a) {
    const GroupPoint x = unrank(a, m232);
    EXPECT_EQ(group_sub(x, x, m232), zero_point(m232));
    for (std::size_t b = 0; b < M; ++b) {
      const GroupPoint y = unrank(b, m232);
      const GroupPoint s = group_add(x, y, m232);
      EXPECT_EQ(s, group_add(y, x, m232));
      EXPECT_EQ(group_sub(s, y, m232), x);
      EXPECT_EQ(rank_add(a, b, m232), rank(s, m232));
      EXPECT_EQ(rank_sub(a, b, m232), rank(group_sub(x, y, m232), m232));
      for (std::size_t c = 0; c < M; ++c) {
        const GroupPoint z = unrank(c, m232);
        EXPECT_EQ(group_add(s, z, m232), group_add(x, group_add(y, z, m232), m232));
      }
    }
  }
}

TEST(GroupArithmetic, RandomizedAxiomsLargeBase) {
  const BaseSequence b({3, 2, 5, 2, 4, 3});
  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    const std::size_t a = rng.below(b.size()), c = rng.below(b.size()), d = rng.below(b.size());
    EXPECT_EQ(rank_add(a, c, b), rank_add(c, a, b));
    EXPECT_EQ(rank_add(rank_add(a, c, b), d, b), rank_add(a, rank_add(c, d, b), b));
    EXPECT_EQ(rank_sub(rank_add(a, c, b), c, b), a);
  }
}

TEST(VilenkinIndex, DigitsAndOrder) {
  const VilenkinIndex n(11, m232);  // 1 + 2*2 + 1*6
  EXPECT_EQ(n.digit(0), 1u);
  EXPECT_EQ(n.digit(1), 2u);
  EXPECT_EQ(n.digit(2), 1u);
  EXPECT_EQ(n.order(), 2u);
  EXPECT_EQ(VilenkinIndex(0, m232).order(), 0u);
  EXPECT_EQ(VilenkinIndex(4, m232).order(), 1u);
  const VilenkinIndex top(12, m232);
  EXPECT_EQ(top.order(), 3u);
  EXPECT_EQ(top.digit(3), 1u);
  EXPECT_THROW(VilenkinIndex(13, m232), DomainError);
}

TEST(VilenkinIndex, ExpansionReconstructsValue) {
  const BaseSequence b({3, 5, 2, 4});
  for (std::size_t n = 0; n <= b.size(); ++n) {
    const VilenkinIndex idx(n, b);
    std::size_t sum = 0;
    for (std::size_t j = 0; j <= b.resolution(); ++j) {
      if (j < b.resolution()) {
        EXPECT_LT(idx.digit(j), b.base(j));
      }
      sum += idx.digit(j) * b.power(j);
    }
    EXPECT_EQ(sum, n);
  }
}

TEST(FiniteFunction, LengthMustMatch) {
  EXPECT_THROW(FiniteFunction(m232, std::vector<Complex>(11)), DomainError);
  const auto f = FiniteFunction::constant(m232, 2.0);
  const auto g = FiniteFunction::from_ranks(m232, [](std::size_t r) { return Complex(double(r)); });
  EXPECT_EQ((f + g)[5], Complex(7.0));
  EXPECT_EQ((g - f)[5], Complex(3.0));
  EXPECT_EQ((g * Complex(0, 1))[2], Complex(0, 2));
  EXPECT_EQ((g / 2.0)[4], Complex(2.0));
  EXPECT_THROW(f + FiniteFunction::zeros(BaseSequence::walsh(3)), DomainError);
}

TEST(FiniteFunction, RelativeDistance) {
  const auto f = FiniteFunction::constant(m232, 4.0);
  auto v = std::vector<Complex>(12, 4.0);
  v[3] = 4.4;
  const FiniteFunction g(m232, v);
  EXPECT_NEAR(relative_distance(f, g), 0.4 / 4.4, 1e-15);
  EXPECT_EQ(relative_distance(FiniteFunction::zeros(m232), FiniteFunction::zeros(m232)), 0.0);
}

TEST(HaarIntegral, ConstantAndCosetIndicator) {
  EXPECT_EQ(haar_integral(FiniteFunction::constant(m232, 1.0)), Complex(1.0));
  // M_2 on I_2 has integral M_2 * mu(I_2) = 1.
  const BaseSequence w = BaseSequence::walsh(5);
  const auto d = FiniteFunction::from_ranks(w, [](std::size_t r) { return Complex(r % 4 == 0 ? 4.0 : 0.0); });
  EXPECT_NEAR(std::abs(haar_integral(d) - 1.0), 0.0, 1e-15);
  // r_0 on Walsh: +1 on even ranks, -1 on odd ranks.
  const auto r0 = FiniteFunction::from_ranks(BaseSequence::walsh(3), [](std::size_t r) { return Complex(r % 2 ? -1.0 : 1.0); });
  EXPECT_EQ(haar_integral(r0), Complex(0.0));
}

TEST(Norms, HandValues) {
  const FiniteFunction d3(BaseSequence::walsh(2), {3.0, 1.0, 1.0, -1.0});
  EXPECT_DOUBLE_EQ(lp_norm(d3, 1.0), 1.5);
  EXPECT_DOUBLE_EQ(linf_norm(d3), 3.0);
  EXPECT_DOUBLE_EQ(lp_norm(d3, 2.0), std::sqrt(12.0 / 4.0));
  EXPECT_DOUBLE_EQ(lp_norm_pow(d3, 0.5), (std::sqrt(3.0) + 3.0) / 4.0);
  const auto unimodular =
      FiniteFunction::from_ranks(m232, [](std::size_t r) { return std::polar(1.0, 0.7 * double(r)); });
  for (double p : {0.25, 0.5, 1.0, 2.0}) EXPECT_NEAR(lp_norm(unimodular, p), 1.0, 1e-14);
  EXPECT_THROW(lp_norm(d3, 0.0), DomainError);
  EXPECT_THROW(lp_norm(d3, -1.0), DomainError);
  EXPECT_THROW(weak_lp_norm(d3, 0.0), DomainError);
}

TEST(Norms, WeakNormExamples) {
  EXPECT_DOUBLE_EQ(weak_lp_norm(FiniteFunction::constant(m232, 2.5), 0.5), 2.5);
  EXPECT_DOUBLE_EQ(weak_lp_norm(FiniteFunction::constant(m232, 2.5), 1.0), 2.5);
  const FiniteFunction f(BaseSequence::walsh(2), {3.0, 1.0, 1.0, 1.0});
  EXPECT_NEAR(weak_lp_norm(f, 0.5), 1.0, 1e-15);
  EXPECT_NEAR(weak_norm_bruteforce(f, 0.5), 1.0, 1e-9);
}

TEST(Norms, ZeroFunctionHasZeroNorms) {
  const auto z = FiniteFunction::zeros(m232);
  for (double p : {0.25, 0.5, 1.0}) {
    EXPECT_EQ(lp_norm(z, p), 0.0);
    EXPECT_EQ(weak_lp_norm(z, p), 0.0);
  }
  EXPECT_EQ(linf_norm(z), 0.0);
}

TEST(Norms, WeakNormMatchesBruteForceAndIsBelowStrongNorm) {
  Rng rng(3);
  const BaseSequence b({2, 3, 2, 2});
  for (int i = 0; i < 100; ++i) {
    const FiniteFunction f = random_function(b, rng);
    for (double p : {0.25, 0.5, 0.75, 1.0}) {
      const double weak = weak_lp_norm(f, p);
      EXPECT_LE(weak, lp_norm(f, p) * (1 + 1e-12));
      EXPECT_NEAR(weak, weak_norm_bruteforce(f, p), 1e-9 * weak);
    }
  }
}

TEST(Intervals, MeasureNestingAndMembership) {
  const BaseSequence b({3, 2, 4});
  const GroupPoint x{{2, 1, 3}};
  for (std::size_t n = 0; n <= b.resolution(); ++n) {
    const IntervalSpec I{n, x};
    EXPECT_DOUBLE_EQ(I.measure(b), 1.0 / double(b.power(n)));
    const auto members = I.ranks(b);
    EXPECT_EQ(members.size(), b.size() / b.power(n));
    std::size_t count = 0;
    for (std::size_t r = 0; r < b.size(); ++r) {
      const bool inside = in_coset(unrank(r, b), x, n);
      EXPECT_EQ(I.contains_rank(r, b), inside);
      count += inside;
      if (n > 0 && inside) {
        EXPECT_TRUE((IntervalSpec{n - 1, x}.contains_rank(r, b)));
      }
    }
    EXPECT_EQ(count, members.size());
  }
  EXPECT_THROW((IntervalSpec{4, x}.check(b)), DomainError);
}

TEST(Shells, WalshThreeLevels) {
  const BaseSequence b = BaseSequence::walsh(3);
  const ShellDecomposition d = shell_decomposition(b, 3);
  ASSERT_EQ(d.shells.size(), 3u);
  EXPECT_EQ(d.shells[0].size(), 4u);
  EXPECT_EQ(d.shells[1].size(), 2u);
  EXPECT_EQ(d.shells[2].size(), 1u);
  EXPECT_EQ(d.core, std::vector<std::size_t>{0});
}

TEST(Shells, MixedBasePartition) {
  const ShellDecomposition d = shell_decomposition(m232, 2);
  EXPECT_EQ(d.shells[0].size(), 6u);
  EXPECT_EQ(d.shells[1].size(), 4u);
  EXPECT_EQ(d.core.size(), 2u);
  EXPECT_THROW(shell_decomposition(m232, 4), DomainError);
}

TEST(Shells, ExactCoverAndMeasureExhaustive) {
  for (const BaseSequence& b : {m232, BaseSequence({3, 2, 4, 2}), BaseSequence::walsh(6)}) {
    for (std::size_t depth = 0; depth <= b.resolution(); ++depth) {
      const ShellDecomposition d = shell_decomposition(b, depth);
      std::vector<int> hits(b.size(), 0);
      double measure = 0;
      for (std::size_t s = 0; s < depth; ++s) {
        for (auto r : d.shells[s]) {
          ++hits[r];
          // Shell s: first nonzero digit at position s, by digit inspection.
          const GroupPoint x = unrank(r, b);
          for (std::size_t k = 0; k < s; ++k) EXPECT_EQ(x.digits[k], 0u);
          EXPECT_NE(x.digits[s], 0u);
        }
        EXPECT_EQ(d.shells[s].size() * b.power(s + 1), (b.base(s) - 1) * b.size());
        measure += double(d.shells[s].size()) / double(b.size());
      }
      for (auto r : d.core) ++hits[r];
      measure += double(d.core.size()) / double(b.size());
      for (int h : hits) EXPECT_EQ(h, 1);
      EXPECT_DOUBLE_EQ(measure, 1.0);
    }
  }
}

TEST(Rng, DeterministicAndInRange) {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform01();
    EXPECT_EQ(u, b.uniform01());
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_LT(a.below(7), 7u);
    b.below(7);
  }
}
