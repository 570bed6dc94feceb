#pragma once

// Dirichlet kernels D_n = sum_{k<n} psi_k by three independent routes,
// Lebesgue constants ||D_n||_1, the special indices q_k and the
// shell-integral profile of |D_n|.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vlab/core.hpp"
#include "vlab/random.hpp"
#include "vlab/transform.hpp"

namespace vlab {

/// Walks D_1, D_2, ... adding one character row per step.
class DirichletSweep {
 public:
  explicit DirichletSweep(const BaseSequence& base)
      : chars_(base), values_(base.size()), row_(base.size()) {}

  /// Advances from D_n to D_{n+1}; returns the new n.
  std::size_t advance() {
    detail::require(n_ < chars_.base().size(), "Dirichlet sweep is past M_N");
    chars_.row(n_, row_);
    for (std::size_t r = 0; r < values_.size(); ++r) values_[r] += row_[r];
    return ++n_;
  }

  std::size_t n() const noexcept { return n_; }
  FiniteFunction current() const { return FiniteFunction(chars_.base(), values_); }

 private:
  Characters chars_;
  std::vector<Complex> values_;
  std::vector<Complex> row_;
  std::size_t n_ = 0;
};

inline void check_kernel_index(const BaseSequence& base, std::size_t n) {
  detail::require(n > 0, "D_0 is not defined; kernel index must be positive");
  detail::require(n <= base.size(), "kernel index exceeds M_N");
}

/// Sum of the first n characters.
inline FiniteFunction dirichlet(const BaseSequence& base, std::size_t n) {
  check_kernel_index(base, n);
  const Characters chars(base);
  std::vector<Complex> sum(base.size()), row(base.size());
  for (std::size_t k = 0; k < n; ++k) {
    chars.row(k, row);
    for (std::size_t r = 0; r < sum.size(); ++r) sum[r] += row[r];
  }
  return FiniteFunction(base, std::move(sum));
}

/// D_{M_j}: M_j on I_j, zero elsewhere.
inline FiniteFunction dirichlet_paley(const BaseSequence& base, std::size_t j) {
  detail::require(j <= base.resolution(), "Paley level exceeds resolution");
  const std::size_t stride = base.power(j);
  return FiniteFunction::from_ranks(base, [&](std::size_t r) {
    return r % stride == 0 ? Complex(static_cast<double>(stride)) : Complex(0.0);
  });
}

/// D_n(x) = psi_n(x) sum_j D_{M_j}(x) sum_{u=m_j-n_j}^{m_j-1} r_j(x)^u.
///
/// D_{M_j}(x) vanishes unless j <= shell(x), and r_j(x) = 1 for j below the
/// shell, so each point needs only its first nonzero digit. The digit n_N of
/// n = M_N pairs with r_N, which is identically 1 on resolution-N points.
inline FiniteFunction dirichlet_factored(const BaseSequence& base, std::size_t n) {
  check_kernel_index(base, n);
  const Characters chars(base);
  const VilenkinIndex index(n, base);
  const std::size_t N = base.resolution();
  return FiniteFunction::from_ranks(base, [&](std::size_t r) {
    const GroupPoint x = unrank(r, base);
    const std::size_t s = shell_of(r, base);
    const Complex psi = n < base.size() ? chars.vilenkin(n, x) : Complex(1.0);
    Complex sum = 0.0;
    const std::size_t top = std::min(s, index.order());
    for (std::size_t j = 0; j <= top; ++j) {
      const std::uint32_t nj = index.digit(j);
      if (nj == 0) continue;
      const double Mj = static_cast<double>(base.power(j));
      if (j < s || j == N) {
        sum += Mj * static_cast<double>(nj);
        continue;
      }
      const std::uint32_t m = base.base(j);
      Complex inner = 0.0;
      for (std::uint32_t u = m - nj; u < m; ++u) inner += chars.root(j, u * x.digits[j]);
      sum += Mj * inner;
    }
    return detail::cmul(psi, sum);
  });
}

inline double lebesgue_constant(const FiniteFunction& dn) { return lp_norm(dn, 1.0); }

inline double lebesgue_constant(const BaseSequence& base, std::size_t n) {
  return lebesgue_constant(dirichlet(base, n));
}

enum class QVariant { literal, even_sum };

/// Index with a digit 1 at the even positions of the chosen variant.
///
/// literal: the positions {2k, 2k-2, 2, 0}, each counted once (they overlap
/// for k <= 2). even_sum: every even position 0, 2, ..., 2k.
inline std::size_t q_index(const BaseSequence& base, std::size_t k, QVariant variant = QVariant::even_sum) {
  detail::require(2 * k <= base.resolution(), "q index needs 2k <= N");
  std::vector<std::size_t> positions;
  if (variant == QVariant::even_sum) {
    for (std::size_t l = 0; l <= k; ++l) positions.push_back(2 * l);
  } else {
    positions = {0};
    if (k >= 1) positions.insert(positions.end(), {2, 2 * k - 2, 2 * k});
    std::sort(positions.begin(), positions.end());
    positions.erase(std::unique(positions.begin(), positions.end()), positions.end());
  }
  std::size_t q = 0;
  for (auto pos : positions) q += base.power(pos);
  return q;
}

struct KernelReport {
  std::size_t n = 0;
  double l1_norm = 0;
  /// Largest pointwise gap between the kernel routes, relative to D_n(0) = n.
  double route_agreement = 0;
};

/// Compares a summed kernel against the factored route, and the Paley form
/// when n = M_j.
inline KernelReport kernel_report(const FiniteFunction& summed, std::size_t n,
                                  const FiniteFunction& factored) {
  const BaseSequence& base = summed.base();
  KernelReport report;
  report.n = n;
  report.l1_norm = lebesgue_constant(summed);
  double gap = 0;
  for (std::size_t r = 0; r < summed.size(); ++r) gap = std::max(gap, std::abs(summed[r] - factored[r]));
  for (std::size_t j = 0; j <= base.resolution(); ++j) {
    if (base.power(j) != n) continue;
    const FiniteFunction paley = dirichlet_paley(base, j);
    for (std::size_t r = 0; r < summed.size(); ++r) gap = std::max(gap, std::abs(summed[r] - paley[r]));
  }
  report.route_agreement = gap / static_cast<double>(n);
  return report;
}

inline KernelReport kernel_report(const BaseSequence& base, std::size_t n) {
  return kernel_report(dirichlet(base, n), n, dirichlet_factored(base, n));
}

struct Lemma2Row {
  std::size_t shell = 0;
  /// K(x) M_depth / M_s at the anchor point (digit 1 at position s).
  double anchor_ratio = 0;
  /// Largest ratio over the anchor and the sampled shell members.
  double max_ratio = 0;
};

/// For x in I_s \ I_{s+1}, K(x) = int_{I_depth} |D_n(x - t)| dmu(t), reported
/// as K(x) / (M_s / M_depth) for one anchor and `samples` random members per shell.
inline std::vector<Lemma2Row> lemma2_profile(const FiniteFunction& dn, std::size_t depth, Rng& rng,
                                             std::size_t samples = 3) {
  const BaseSequence& base = dn.base();
  detail::require(depth <= base.resolution(), "integration depth exceeds resolution");
  const std::vector<std::size_t> coset = IntervalSpec::at_zero(depth, base).ranks(base);
  const double inv_size = 1.0 / static_cast<double>(base.size());

  auto kernel_integral = [&](std::size_t x) {
    double sum = 0;
    for (auto t : coset) sum += std::abs(dn[rank_sub(x, t, base)]);
    return sum * inv_size;
  };

  std::vector<Lemma2Row> rows;
  for (std::size_t s = 0; s < depth; ++s) {
    const double scale = static_cast<double>(base.power(depth)) / static_cast<double>(base.power(s));
    Lemma2Row row;
    row.shell = s;
    row.anchor_ratio = kernel_integral(base.power(s)) * scale;
    row.max_ratio = row.anchor_ratio;
    // A shell-s member: digits below s zero, digit s nonzero, the rest free.
    const std::uint32_t ms = base.base(s);
    const std::size_t upper = base.size() / base.power(s + 1);
    for (std::size_t i = 0; i < samples; ++i) {
      const std::size_t xs = 1 + rng.below(ms - 1);
      const std::size_t x = xs * base.power(s) + rng.below(upper) * base.power(s + 1);
      row.max_ratio = std::max(row.max_ratio, kernel_integral(x) * scale);
    }
    rows.push_back(row);
  }
  return rows;
}

inline std::vector<Lemma2Row> lemma2_profile(const BaseSequence& base, std::size_t n, std::size_t depth,
                                             std::uint64_t seed = 0) {
  Rng rng(seed);
  return lemma2_profile(dirichlet(base, n), depth, rng);
}

}  // namespace vlab
