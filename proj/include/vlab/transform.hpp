#pragma once

// Generalized Rademacher functions, the Vilenkin system and the
// Vilenkin-Chrestenson transform.
//
// Analysis uses conjugated characters, synthesis unconjugated ones:
//   fhat(k) = (1/M_N) sum_x f(x) conj(psi_k(x)),  f = sum_k fhat(k) psi_k.

#include <cmath>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "vlab/core.hpp"

namespace vlab {

namespace detail {

// Plain complex multiply; the std::complex operator carries NaN/Inf recovery
// that blocks vectorization in the O(M^2) loops.
inline Complex cmul(const Complex& a, const Complex& b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

/// exp(2 pi i u / m) for u < m. Powers come from one principal root by
/// repeated multiplication, renormalised each step; quarter turns are exact.
inline std::vector<Complex> unit_roots(std::uint32_t m) {
  std::vector<Complex> roots(m);
  roots[0] = 1.0;
  const double angle = 2.0 * std::numbers::pi / static_cast<double>(m);
  const Complex principal(std::cos(angle), std::sin(angle));
  for (std::uint32_t u = 1; u < m; ++u) {
    Complex z = cmul(roots[u - 1], principal);
    z /= std::abs(z);
    if ((4 * u) % m == 0) {
      static constexpr double re[4] = {1, 0, -1, 0};
      static constexpr double im[4] = {0, 1, 0, -1};
      const std::uint32_t quarter = (4 * u / m) % 4;
      z = Complex(re[quarter], im[quarter]);
    }
    roots[u] = z;
  }
  return roots;
}

}  // namespace detail

/// Per-axis root tables for one base sequence; builds character rows in O(M_N).
class Characters {
 public:
  explicit Characters(BaseSequence base) : base_(std::move(base)) {
    roots_.reserve(base_.resolution());
    for (auto m : base_.bases()) roots_.push_back(detail::unit_roots(m));
  }

  const BaseSequence& base() const noexcept { return base_; }

  /// exp(2 pi i u / m_k).
  const Complex& root(std::size_t k, std::uint32_t u) const { return roots_[k][u % base_.base(k)]; }

  Complex rademacher(std::size_t k, const GroupPoint& x) const {
    detail::require(k < base_.resolution(), "Rademacher coordinate out of range");
    check_point(x, base_);
    return roots_[k][x.digits[k]];
  }

  Complex vilenkin(std::size_t n, const GroupPoint& x) const {
    detail::require(n < base_.size(), "character index must be below M_N");
    check_point(x, base_);
    Complex value = 1.0;
    for (std::size_t k = 0; k < base_.resolution(); ++k) {
      const std::uint32_t m = base_.base(k);
      const std::uint32_t nk = static_cast<std::uint32_t>((n / base_.power(k)) % m);
      value = detail::cmul(value, roots_[k][(nk * x.digits[k]) % m]);
    }
    return value;
  }

  /// Writes psi_n (or its conjugate) for every rank into out, by Kronecker
  /// expansion over the axes.
  void row(std::size_t n, std::span<Complex> out, bool conjugate = false) const {
    detail::require(n < base_.size(), "character index must be below M_N");
    detail::require(out.size() == base_.size(), "row buffer has wrong length");
    out[0] = 1.0;
    for (std::size_t k = 0; k < base_.resolution(); ++k) {
      const std::size_t len = base_.power(k);
      const std::uint32_t m = base_.base(k);
      const std::uint32_t nk = static_cast<std::uint32_t>((n / len) % m);
      for (std::uint32_t u = m; u-- > 1;) {
        Complex w = roots_[k][(nk * u) % m];
        if (conjugate) w = std::conj(w);
        Complex* dst = out.data() + u * len;
        for (std::size_t i = 0; i < len; ++i) dst[i] = detail::cmul(out[i], w);
      }
    }
  }

  FiniteFunction character(std::size_t n) const {
    std::vector<Complex> v(base_.size());
    row(n, v);
    return FiniteFunction(base_, std::move(v));
  }

 private:
  BaseSequence base_;
  std::vector<std::vector<Complex>> roots_;
};

inline Complex rademacher(std::size_t k, const GroupPoint& x, const BaseSequence& base) {
  return Characters(base).rademacher(k, x);
}

inline Complex vilenkin(const VilenkinIndex& n, const GroupPoint& x, const BaseSequence& base) {
  return Characters(base).vilenkin(n.value(), x);
}

/// psi_n as a resolution-N function.
inline FiniteFunction character(const BaseSequence& base, std::size_t n) {
  return Characters(base).character(n);
}

/// The M_N Vilenkin-Fourier coefficients of a FiniteFunction.
class Spectrum {
 public:
  Spectrum() = default;
  Spectrum(BaseSequence base, std::vector<Complex> coeffs)
      : base_(std::move(base)), coeffs_(std::move(coeffs)) {
    detail::require(coeffs_.size() == base_.size(), "spectrum length must equal M_N");
  }

  static Spectrum unit(const BaseSequence& base, std::size_t k) {
    detail::require(k < base.size(), "spectral index must be below M_N");
    std::vector<Complex> c(base.size());
    c[k] = 1.0;
    return Spectrum(base, std::move(c));
  }

  const BaseSequence& base() const noexcept { return base_; }
  std::size_t size() const noexcept { return coeffs_.size(); }
  std::span<const Complex> coeffs() const noexcept { return coeffs_; }
  const Complex& operator[](std::size_t k) const { return coeffs_[k]; }

  /// Copy with coefficients outside [begin, end) set to zero.
  Spectrum window(std::size_t begin, std::size_t end) const {
    detail::require(begin <= end && end <= size(), "spectral window out of range");
    std::vector<Complex> c(size());
    std::copy(coeffs_.begin() + static_cast<std::ptrdiff_t>(begin),
              coeffs_.begin() + static_cast<std::ptrdiff_t>(end),
              c.begin() + static_cast<std::ptrdiff_t>(begin));
    return Spectrum(base_, std::move(c));
  }

 private:
  BaseSequence base_;
  std::vector<Complex> coeffs_;
};

/// Reference O(M_N^2) analysis, one conjugated character row per coefficient.
inline std::vector<Spectrum> analyze_naive(std::span<const FiniteFunction> batch) {
  std::vector<Spectrum> out;
  if (batch.empty()) return out;
  const BaseSequence& base = batch.front().base();
  for (const auto& f : batch)
    detail::require(f.base() == base, "batch mixes base sequences");
  detail::require(base.size() <= kNaiveCap, "naive transform capped at 4096 points");

  const std::size_t size = base.size();
  const Characters chars(base);
  std::vector<std::vector<Complex>> coeffs(batch.size(), std::vector<Complex>(size));
  std::vector<Complex> row(size);
  const double scale = 1.0 / static_cast<double>(size);
  for (std::size_t k = 0; k < size; ++k) {
    chars.row(k, row, /*conjugate=*/true);
    for (std::size_t b = 0; b < batch.size(); ++b) {
      const Complex* v = batch[b].values().data();
      double re = 0, im = 0;
      for (std::size_t r = 0; r < size; ++r) {
        re += v[r].real() * row[r].real() - v[r].imag() * row[r].imag();
        im += v[r].real() * row[r].imag() + v[r].imag() * row[r].real();
      }
      coeffs[b][k] = Complex(re * scale, im * scale);
    }
  }
  out.reserve(batch.size());
  for (auto& c : coeffs) out.emplace_back(base, std::move(c));
  return out;
}

inline Spectrum analyze_naive(const FiniteFunction& f) {
  return std::move(analyze_naive(std::span<const FiniteFunction>(&f, 1)).front());
}

namespace detail {

// One small DFT of length m_k along every axis-k line, x_0 axis first.
inline void axis_transform(const Characters& chars, std::vector<Complex>& data, bool conjugate) {
  const BaseSequence& base = chars.base();
  std::vector<Complex> line;
  for (std::size_t k = 0; k < base.resolution(); ++k) {
    const std::uint32_t m = base.base(k);
    const std::size_t stride = base.power(k);
    const std::size_t block = base.power(k + 1);
    line.assign(m, 0.0);
    for (std::size_t start = 0; start < data.size(); start += block) {
      for (std::size_t i = 0; i < stride; ++i) {
        Complex* p = data.data() + start + i;
        for (std::uint32_t u = 0; u < m; ++u) line[u] = p[u * stride];
        for (std::uint32_t a = 0; a < m; ++a) {
          Complex acc = 0.0;
          for (std::uint32_t u = 0; u < m; ++u) {
            Complex w = chars.root(k, (a * u) % m);
            if (conjugate) w = std::conj(w);
            acc += cmul(line[u], w);
          }
          p[a * stride] = acc;
        }
      }
    }
  }
}

}  // namespace detail

/// Axis-wise analysis in O(M_N sum_k m_k).
inline Spectrum analyze_fast(const FiniteFunction& f, const Characters& chars) {
  detail::require(f.base() == chars.base(), "character table built for another base");
  std::vector<Complex> data(f.values().begin(), f.values().end());
  detail::axis_transform(chars, data, /*conjugate=*/true);
  const double scale = 1.0 / static_cast<double>(data.size());
  for (auto& c : data) c *= scale;
  return Spectrum(f.base(), std::move(data));
}

inline Spectrum analyze_fast(const FiniteFunction& f) { return analyze_fast(f, Characters(f.base())); }

inline FiniteFunction synthesize(const Spectrum& s, const Characters& chars) {
  detail::require(s.base() == chars.base(), "character table built for another base");
  std::vector<Complex> data(s.coeffs().begin(), s.coeffs().end());
  detail::axis_transform(chars, data, /*conjugate=*/false);
  return FiniteFunction(s.base(), std::move(data));
}

inline FiniteFunction synthesize(const Spectrum& s) { return synthesize(s, Characters(s.base())); }

inline double relative_distance(const Spectrum& a, const Spectrum& b) {
  detail::require(a.base() == b.base(), "spectra live on different base sequences");
  double diff = 0, scale = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    diff = std::max(diff, std::abs(a[k] - b[k]));
    scale = std::max({scale, std::abs(a[k]), std::abs(b[k])});
  }
  return scale > 0 ? diff / scale : diff;
}

}  // namespace vlab
