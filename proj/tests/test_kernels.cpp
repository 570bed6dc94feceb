#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "vlab/kernels.hpp"

using namespace vlab;

namespace {

const BaseSequence m232({2, 3, 2});

// D_n(x) = sum_{k<n} exp(2 pi i sum_j k_j x_j / m_j), evaluated term by term.
Complex dirichlet_oracle(std::size_t n, std::size_t r, const BaseSequence& b) {
  Complex sum = 0;
  for (std::size_t k = 0; k < n; ++k) {
    double turns = 0;
    for (std::size_t j = 0; j < b.resolution(); ++j)
      turns += double(((k / b.power(j)) % b.base(j)) * ((r / b.power(j)) % b.base(j))) / double(b.base(j));
    sum += std::polar(1.0, 2 * std::numbers::pi * turns);
  }
  return sum;
}

double max_gap(const FiniteFunction& a, const FiniteFunction& b) {
  double gap = 0;
  for (std::size_t r = 0; r < a.size(); ++r) gap = std::max(gap, std::abs(a[r] - b[r]));
  return gap;
}

}  // namespace

TEST(Dirichlet, SmallKernels) {
  const BaseSequence w = BaseSequence::walsh(3);
  EXPECT_EQ(max_gap(dirichlet(w, 1), FiniteFunction::constant(w, 1.0)), 0.0);
  const FiniteFunction d2 = dirichlet(w, 2);
  for (std::size_t r = 0; r < 8; ++r) EXPECT_NEAR(d2[r].real(), r % 2 == 0 ? 2.0 : 0.0, 1e-15);
  // D_5 = D_4 + r_2: 5 and 3 on I_2 = {0, 4}, then the sign of x_2.
  const double d5[8] = {5, 1, 1, 1, 3, -1, -1, -1};
  const FiniteFunction f = dirichlet(w, 5);
  for (std::size_t r = 0; r < 8; ++r) {
    EXPECT_NEAR(f[r].real(), d5[r], 1e-14);
    EXPECT_NEAR(f[r].imag(), 0.0, 1e-14);
  }
  EXPECT_NEAR(lebesgue_constant(f), 1.75, 1e-15);
}

TEST(Dirichlet, IndexGuards) {
  EXPECT_THROW(dirichlet(m232, 0), DomainError);
  EXPECT_THROW(dirichlet(m232, 13), DomainError);
  EXPECT_NO_THROW(dirichlet(m232, 12));
  EXPECT_THROW(dirichlet_factored(m232, 0), DomainError);
  EXPECT_THROW(dirichlet_paley(m232, 4), DomainError);
}

TEST(Dirichlet, MatchesTermwiseOracle) {
  for (const BaseSequence& b : {m232, BaseSequence({3, 2, 4})}) {
    for (std::size_t n = 1; n <= b.size(); ++n) {
      const FiniteFunction d = dirichlet(b, n);
      for (std::size_t r = 0; r < b.size(); ++r) EXPECT_NEAR(std::abs(d[r] - dirichlet_oracle(n, r, b)), 0.0, 1e-12);
      EXPECT_NEAR(d[0].real(), double(n), 1e-12);
    }
  }
}

TEST(Dirichlet, SweepMatchesDirectSum) {
  const BaseSequence b({3, 2, 2, 3});
  DirichletSweep sweep(b);
  while (sweep.n() < b.size()) {
    const std::size_t n = sweep.advance();
    EXPECT_LE(max_gap(sweep.current(), dirichlet(b, n)), 1e-12);
  }
  EXPECT_THROW(sweep.advance(), DomainError);
}

TEST(Paley, ClosedForm) {
  const BaseSequence w = BaseSequence::walsh(3);
  EXPECT_EQ(max_gap(dirichlet_paley(w, 0), FiniteFunction::constant(w, 1.0)), 0.0);
  const FiniteFunction p2 = dirichlet_paley(w, 2);
  for (std::size_t r = 0; r < 8; ++r) EXPECT_EQ(p2[r], Complex(r == 0 || r == 4 ? 4.0 : 0.0));
  for (std::size_t j = 0; j <= m232.resolution(); ++j) {
    EXPECT_LE(max_gap(dirichlet_paley(m232, j), dirichlet(m232, m232.power(j))), 1e-12);
    EXPECT_DOUBLE_EQ(lebesgue_constant(dirichlet_paley(m232, j)), 1.0);
  }
}

TEST(Factored, AgreesWithDefinitionExhaustive) {
  for (const BaseSequence& b : {m232, BaseSequence::walsh(6), BaseSequence({3, 2, 4}), BaseSequence({2, 3, 2, 3})}) {
    for (std::size_t n = 1; n <= b.size(); ++n) {
      const FiniteFunction direct = dirichlet(b, n);
      EXPECT_LE(max_gap(direct, dirichlet_factored(b, n)), 1e-9 * double(n)) << "n=" << n;
    }
  }
}

TEST(Factored, ReproducesPaleyAtPowers) {
  const BaseSequence b({3, 2, 4, 2});
  for (std::size_t j = 0; j <= b.resolution(); ++j)
    EXPECT_LE(max_gap(dirichlet_factored(b, b.power(j)), dirichlet_paley(b, j)), 1e-12);
}

TEST(KernelReport, RoutesAgree) {
  const KernelReport r = kernel_report(m232, 6);
  EXPECT_EQ(r.n, 6u);
  EXPECT_DOUBLE_EQ(r.l1_norm, 1.0);
  EXPECT_LT(r.route_agreement, 1e-12);
  const KernelReport s = kernel_report(m232, 7);
  EXPECT_LT(s.route_agreement, 1e-12);
}

TEST(KernelReport, DetectsPerturbedRoute) {
  const FiniteFunction d = dirichlet(m232, 7);
  std::vector<Complex> v(d.values().begin(), d.values().end());
  v[3] += 1e-6;
  const KernelReport r = kernel_report(d, 7, FiniteFunction(m232, v));
  EXPECT_GT(r.route_agreement, 1e-9);
}

TEST(Lebesgue, HandValues) {
  const BaseSequence w = BaseSequence::walsh(6);
  EXPECT_NEAR(lebesgue_constant(w, 3), 1.5, 1e-15);
  EXPECT_NEAR(lebesgue_constant(w, 5), 1.75, 1e-15);
  for (std::size_t j = 0; j <= 6; ++j) EXPECT_NEAR(lebesgue_constant(w, w.power(j)), 1.0, 1e-12);
}

TEST(QIndex, Variants) {
  const BaseSequence w = BaseSequence::walsh(8);
  EXPECT_EQ(q_index(w, 1, QVariant::even_sum), 5u);
  EXPECT_EQ(q_index(w, 3, QVariant::literal), 85u);
  EXPECT_EQ(q_index(w, 3, QVariant::even_sum), 85u);
  EXPECT_EQ(q_index(w, 0, QVariant::literal), 1u);
  EXPECT_EQ(q_index(w, 1, QVariant::literal), 5u);
  EXPECT_EQ(q_index(w, 4, QVariant::literal), 1u + 4 + 64 + 256);
  EXPECT_EQ(q_index(w, 4, QVariant::even_sum), 1u + 4 + 16 + 64 + 256);
  EXPECT_THROW(q_index(w, 5), DomainError);
  const BaseSequence b({2, 3, 2, 3});
  EXPECT_EQ(q_index(b, 2), 1u + 6 + 36);
}

TEST(QIndex, LebesgueGrowthWalsh12) {
  const BaseSequence w = BaseSequence::walsh(12);
  // Values from an independent dense-matrix evaluation.
  const double expected[5] = {1.75, 2.4375, 3.109375, 3.77734375, 4.4443359375};
  double prev = 0;
  for (std::size_t k = 1; k <= 5; ++k) {
    const double L = lebesgue_constant(w, q_index(w, k));
    EXPECT_NEAR(L, expected[k - 1], 1e-12);
    EXPECT_GE(L, prev);
    EXPECT_GE(L / double(k), 0.25);
    prev = L;
  }
}

TEST(Lemma2, VanishesOffSupportForPaleyKernels) {
  const BaseSequence w = BaseSequence::walsh(6);
  for (std::size_t j = 1; j <= 4; ++j) {
    const auto rows = lemma2_profile(w, w.power(j), 5);
    // Shells s < j lie outside I_j.
    for (std::size_t s = 0; s < j; ++s) {
      EXPECT_EQ(rows[s].anchor_ratio, 0.0);
      EXPECT_EQ(rows[s].max_ratio, 0.0);
    }
  }
}

TEST(Lemma2, WalshFiveDepthThree) {
  const BaseSequence w = BaseSequence::walsh(3);
  for (const auto& row : lemma2_profile(w, 5, 3)) EXPECT_LE(row.max_ratio, 2.0);
}

TEST(Lemma2, AnchorMatchesDigitLevelIntegral) {
  const BaseSequence b({2, 3, 2, 2});
  const std::size_t depth = 2;
  for (std::size_t n : {1u, 5u, 7u, 13u, 24u}) {
    const FiniteFunction dn = dirichlet(b, n);
    const auto rows = lemma2_profile(b, n, depth);
    for (std::size_t s = 0; s < depth; ++s) {
      GroupPoint x = zero_point(b);
      x.digits[s] = 1;
      double integral = 0;
      for (std::size_t t = 0; t < b.size(); ++t) {
        const GroupPoint pt = unrank(t, b);
        bool in_core = true;
        for (std::size_t k = 0; k < depth; ++k) in_core &= pt.digits[k] == 0;
        if (in_core) integral += std::abs(dn[rank(group_sub(x, pt, b), b)]) / double(b.size());
      }
      EXPECT_NEAR(rows[s].anchor_ratio, integral * double(b.power(depth)) / double(b.power(s)), 1e-12);
      EXPECT_GE(rows[s].max_ratio, rows[s].anchor_ratio);
    }
  }
}

TEST(Lemma2, BoundedAcrossAllIndicesWalsh6) {
  const BaseSequence w = BaseSequence::walsh(6);
  Rng rng(1);
  DirichletSweep sweep(w);
  double worst = 0;
  while (sweep.n() < w.size()) {
    sweep.advance();
    for (const auto& row : lemma2_profile(sweep.current(), 6, rng)) worst = std::max(worst, row.max_ratio);
  }
  EXPECT_LE(worst, 1.0 + 1e-12);
  EXPECT_GT(worst, 0.5);
}
