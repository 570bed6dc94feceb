#pragma once

// Partial sums S_n f = sum_{k<n} fhat(k) psi_k, conditional expectations,
// the maximal operators S* and S~_p*, and the strong/logarithmic sums.

#include <algorithm>
#include <cmath>
#include <vector>

#include "vlab/core.hpp"
#include "vlab/kernels.hpp"
#include "vlab/transform.hpp"

namespace vlab {

/// w(n) = (n+1)^{1/p-1} log^{[p]}(n+1), 0 < p <= 1.
class WeightSpec {
 public:
  explicit WeightSpec(double p) : p_(p) {
    detail::require(p > 0 && p <= 1, "weight exponent p must lie in (0, 1]");
  }

  double p() const noexcept { return p_; }
  /// Integer part [p]: 1 for p = 1, else 0.
  int bracket() const noexcept { return p_ >= 1 ? 1 : 0; }

  double operator()(std::size_t n) const {
    const double n1 = static_cast<double>(n) + 1.0;
    const double power = std::pow(n1, 1.0 / p_ - 1.0);
    return bracket() ? power * std::log(n1) : power;
  }

 private:
  double p_;
};

inline void check_partial_index(const BaseSequence& base, std::size_t n) {
  detail::require(n <= base.size(), "partial-sum index exceeds M_N");
}

inline FiniteFunction partial_sum(const Spectrum& spectrum, std::size_t n, const Characters& chars) {
  check_partial_index(spectrum.base(), n);
  return synthesize(spectrum.window(0, n), chars);
}

inline FiniteFunction partial_sum(const FiniteFunction& f, std::size_t n) {
  const Characters chars(f.base());
  return partial_sum(analyze_fast(f, chars), n, chars);
}

/// f - S_n f, formed from the tail of the spectrum so small residuals keep
/// their relative accuracy.
inline FiniteFunction tail(const Spectrum& spectrum, std::size_t n, const Characters& chars) {
  check_partial_index(spectrum.base(), n);
  return synthesize(spectrum.window(n, spectrum.size()), chars);
}

inline FiniteFunction tail(const FiniteFunction& f, std::size_t n) {
  const Characters chars(f.base());
  return tail(analyze_fast(f, chars), n, chars);
}

/// S_n f(x) = int f(t) D_n(x - t) dmu(t), by direct convolution.
inline FiniteFunction partial_sum_conv(const FiniteFunction& f, std::size_t n) {
  const BaseSequence& base = f.base();
  check_partial_index(base, n);
  detail::require(base.size() <= kNaiveCap, "convolution route capped at 4096 points");
  if (n == 0) return FiniteFunction::zeros(base);
  const FiniteFunction dn = dirichlet(base, n);
  const double inv = 1.0 / static_cast<double>(base.size());
  return FiniteFunction::from_ranks(base, [&](std::size_t x) {
    Complex sum = 0.0;
    for (std::size_t t = 0; t < base.size(); ++t) sum += detail::cmul(f[t], dn[rank_sub(x, t, base)]);
    return sum * inv;
  });
}

/// E_j f: each I_j coset replaced by its mean.
inline FiniteFunction conditional_expectation(const FiniteFunction& f, std::size_t j) {
  const BaseSequence& base = f.base();
  detail::require(j <= base.resolution(), "conditional expectation level exceeds resolution");
  const std::size_t stride = base.power(j);
  const double count = static_cast<double>(base.size() / stride);
  std::vector<Complex> means(stride);
  for (std::size_t r = 0; r < f.size(); ++r) means[r % stride] += f[r];
  for (auto& m : means) m /= count;
  return FiniteFunction::from_ranks(base, [&](std::size_t r) { return means[r % stride]; });
}

/// Coefficients below this fraction of the largest one are treated as zero
/// when sweeping partial sums.
inline constexpr double kSpectralZero = 1e-14;

/// Walks S_1 f, S_2 f, ... adding one spectral term per step.
class PartialSumSweep {
 public:
  PartialSumSweep(Spectrum spectrum, Characters chars)
      : spectrum_(std::move(spectrum)),
        chars_(std::move(chars)),
        values_(spectrum_.size()),
        row_(spectrum_.size()) {
    double peak = 0;
    for (const auto& c : spectrum_.coeffs()) peak = std::max(peak, std::abs(c));
    threshold_ = peak * kSpectralZero;
    last_active_ = 0;
    for (std::size_t k = 0; k < spectrum_.size(); ++k)
      if (std::abs(spectrum_[k]) > threshold_) last_active_ = k + 1;
  }

  explicit PartialSumSweep(const FiniteFunction& f)
      : PartialSumSweep(analyze_fast(f), Characters(f.base())) {}

  /// Moves from S_n to S_{n+1}; returns false when the added term is zero.
  bool advance() {
    detail::require(n_ < spectrum_.size(), "partial-sum sweep is past M_N");
    const Complex c = spectrum_[n_++];
    if (std::abs(c) <= threshold_) return false;
    chars_.row(n_ - 1, row_);
    for (std::size_t r = 0; r < values_.size(); ++r) values_[r] += detail::cmul(c, row_[r]);
    return true;
  }

  std::size_t n() const noexcept { return n_; }
  /// One past the last nonzero coefficient: S_k f is constant for k >= this.
  std::size_t last_active() const noexcept { return last_active_; }
  std::span<const Complex> values() const noexcept { return values_; }
  FiniteFunction current() const { return FiniteFunction(spectrum_.base(), values_); }
  const Spectrum& spectrum() const noexcept { return spectrum_; }

 private:
  Spectrum spectrum_;
  Characters chars_;
  std::vector<Complex> values_;
  std::vector<Complex> row_;
  std::size_t n_ = 0;
  std::size_t last_active_ = 0;
  double threshold_ = 0;
};

namespace detail {

template <class WeightFn>
FiniteFunction sup_over_partial_sums(const FiniteFunction& f, WeightFn&& weight) {
  PartialSumSweep sweep(f);
  std::vector<double> best(f.size(), 0.0);
  const std::size_t M = f.size();
  for (std::size_t n = 1; n <= M; ++n) {
    const bool changed = sweep.advance();
    // Unchanged S_n under a nondecreasing weight cannot raise the sup.
    if (!changed && n > 1) continue;
    const double w = weight(n);
    const auto v = sweep.values();
    for (std::size_t r = 0; r < M; ++r) best[r] = std::max(best[r], std::abs(v[r]) / w);
  }
  return FiniteFunction::from_ranks(f.base(), [&](std::size_t r) { return Complex(best[r]); });
}

}  // namespace detail

/// S* f = sup_{1 <= n <= M_N} |S_n f|. For n >= M_N, S_n f = f.
inline FiniteFunction maximal_S(const FiniteFunction& f) {
  return detail::sup_over_partial_sums(f, [](std::size_t) { return 1.0; });
}

/// S~_p* f = sup_{1 <= n <= M_N} |S_n f| / w(n). Larger n only grow the weight.
inline FiniteFunction weighted_maximal(const FiniteFunction& f, const WeightSpec& w) {
  return detail::sup_over_partial_sums(f, w);
}

struct StrongSum {
  double total = 0;
  /// running[k-1] = sum_{i=1}^{k} ||S_i f||_p^p / i^{2-p}.
  std::vector<double> running;
};

/// sum_{k=1}^{K} ||S_k f||_p^p / k^{2-p} for 0 < p < 1.
inline StrongSum strong_sum(const FiniteFunction& f, double p, std::size_t K) {
  detail::require(p > 0 && p < 1, "strong sum needs 0 < p < 1");
  detail::require(K <= f.size(), "strong sum range exceeds M_N");
  PartialSumSweep sweep(f);
  StrongSum out;
  out.running.reserve(K);
  double norm_p = 0;  // ||S_k f||_p^p, refreshed only when S_k changes
  for (std::size_t k = 1; k <= K; ++k) {
    if (sweep.advance()) {
      double sum = 0;
      for (const auto& v : sweep.values()) sum += std::pow(std::abs(v), p);
      norm_p = sum / static_cast<double>(f.size());
    }
    out.total += norm_p / std::pow(static_cast<double>(k), 2.0 - p);
    out.running.push_back(out.total);
  }
  return out;
}

/// (1/log n) sum_{k=1}^{n} ||S_k f - f||_1 / k.
inline double gat_log_mean(const FiniteFunction& f, std::size_t n) {
  detail::require(n >= 2, "logarithmic mean needs n >= 2");
  detail::require(n <= f.size(), "logarithmic mean range exceeds M_N");
  const Characters chars(f.base());
  const Spectrum spectrum = analyze_fast(f, chars);
  double sum = 0;
  for (std::size_t k = 1; k <= n; ++k)
    sum += lp_norm(tail(spectrum, k, chars), 1.0) / static_cast<double>(k);
  return sum / std::log(static_cast<double>(n));
}

}  // namespace vlab
