#pragma once

// Bounded Vilenkin group arithmetic at finite resolution.
//
// A resolution-N function lives on the M_N cosets of I_N. Storage is
// mixed-radix little-endian: rank(x) = sum_k x_k M_k, so x_0 varies fastest
// and the coset I_n(x) is the arithmetic progression {r0 + t M_n}.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace vlab {

using Complex = std::complex<double>;

/// Largest M_N any BaseSequence may reach.
inline constexpr std::size_t kMaxCeiling = std::size_t{1} << 16;
/// O(M_N^2) reference routes refuse inputs above this many points.
inline constexpr std::size_t kNaiveCap = 4096;
/// Relative tolerance for comparing computed functions.
inline constexpr double kRelTol = 1e-9;

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

}  // namespace detail

/// The generating sequence m_0..m_{N-1} together with M_0..M_N.
class BaseSequence {
 public:
  BaseSequence() : BaseSequence(std::vector<std::uint32_t>{2}) {}

  explicit BaseSequence(std::vector<std::uint32_t> bases,
                        std::size_t ceiling = kMaxCeiling)
      : bases_(std::move(bases)) {
    detail::require(!bases_.empty(), "base sequence must have resolution N >= 1");
    detail::require(ceiling <= kMaxCeiling,
                    "resolution ceiling may not exceed 65536 points");
    powers_.reserve(bases_.size() + 1);
    powers_.push_back(1);
    for (auto m : bases_) {
      detail::require(m >= 2, "every base m_k must be at least 2");
      const std::size_t next = powers_.back() * m;
      detail::require(next <= ceiling,
                      "M_N would reach " + std::to_string(next) +
                          ", above the resolution ceiling " + std::to_string(ceiling));
      powers_.push_back(next);
    }
  }

  static BaseSequence walsh(std::size_t n, std::size_t ceiling = kMaxCeiling) {
    return BaseSequence(std::vector<std::uint32_t>(n, 2), ceiling);
  }

  std::size_t resolution() const noexcept { return bases_.size(); }
  std::size_t size() const noexcept { return powers_.back(); }
  std::uint32_t base(std::size_t k) const { return bases_.at(k); }
  /// M_k for 0 <= k <= N.
  std::size_t power(std::size_t k) const { return powers_.at(k); }
  std::span<const std::uint32_t> bases() const noexcept { return bases_; }
  std::span<const std::size_t> powers() const noexcept { return powers_; }
  std::uint32_t max_base() const { return *std::max_element(bases_.begin(), bases_.end()); }
  bool is_walsh() const {
    return std::all_of(bases_.begin(), bases_.end(), [](auto m) { return m == 2; });
  }

  /// The same sequence cut to its first n coordinates.
  BaseSequence truncated(std::size_t n) const {
    detail::require(n >= 1 && n <= resolution(), "truncation depth out of range");
    return BaseSequence(std::vector<std::uint32_t>(bases_.begin(), bases_.begin() + n));
  }

  friend bool operator==(const BaseSequence& a, const BaseSequence& b) {
    return a.bases_ == b.bases_;
  }

 private:
  std::vector<std::uint32_t> bases_;
  std::vector<std::size_t> powers_;
};

/// A point of G_m given by its first N digits.
struct GroupPoint {
  std::vector<std::uint32_t> digits;

  friend bool operator==(const GroupPoint&, const GroupPoint&) = default;
};

inline void check_point(const GroupPoint& x, const BaseSequence& base) {
  detail::require(x.digits.size() == base.resolution(), "point has wrong number of digits");
  for (std::size_t k = 0; k < x.digits.size(); ++k)
    detail::require(x.digits[k] < base.base(k),
                    "digit x_" + std::to_string(k) + " out of range for base");
}

inline std::size_t rank(const GroupPoint& x, const BaseSequence& base) {
  check_point(x, base);
  std::size_t r = 0;
  for (std::size_t k = 0; k < x.digits.size(); ++k) r += x.digits[k] * base.power(k);
  return r;
}

inline GroupPoint unrank(std::size_t r, const BaseSequence& base) {
  detail::require(r < base.size(), "rank out of range");
  GroupPoint x;
  x.digits.resize(base.resolution());
  for (std::size_t k = 0; k < base.resolution(); ++k) {
    x.digits[k] = static_cast<std::uint32_t>(r % base.base(k));
    r /= base.base(k);
  }
  return x;
}

inline GroupPoint zero_point(const BaseSequence& base) {
  return GroupPoint{std::vector<std::uint32_t>(base.resolution(), 0)};
}

inline GroupPoint group_add(const GroupPoint& x, const GroupPoint& y, const BaseSequence& base) {
  check_point(x, base);
  check_point(y, base);
  GroupPoint z = x;
  for (std::size_t k = 0; k < z.digits.size(); ++k)
    z.digits[k] = (x.digits[k] + y.digits[k]) % base.base(k);
  return z;
}

inline GroupPoint group_sub(const GroupPoint& x, const GroupPoint& y, const BaseSequence& base) {
  check_point(x, base);
  check_point(y, base);
  GroupPoint z = x;
  for (std::size_t k = 0; k < z.digits.size(); ++k)
    z.digits[k] = (x.digits[k] + base.base(k) - y.digits[k]) % base.base(k);
  return z;
}

/// Rank-level group subtraction, rank(unrank(a) - unrank(b)), without allocating.
inline std::size_t rank_sub(std::size_t a, std::size_t b, const BaseSequence& base) {
  std::size_t r = 0;
  for (std::size_t k = 0; k < base.resolution(); ++k) {
    const std::uint32_t m = base.base(k);
    const std::size_t da = a % m, db = b % m;
    a /= m;
    b /= m;
    r += ((da + m - db) % m) * base.power(k);
  }
  return r;
}

inline std::size_t rank_add(std::size_t a, std::size_t b, const BaseSequence& base) {
  std::size_t r = 0;
  for (std::size_t k = 0; k < base.resolution(); ++k) {
    const std::uint32_t m = base.base(k);
    const std::size_t da = a % m, db = b % m;
    a /= m;
    b /= m;
    r += ((da + db) % m) * base.power(k);
  }
  return r;
}

/// Index n >= 0 with its mixed-radix digits n_j (j may reach N when n = M_N).
class VilenkinIndex {
 public:
  VilenkinIndex(std::size_t value, const BaseSequence& base) : value_(value) {
    detail::require(value <= base.size(), "Vilenkin index exceeds M_N");
    std::size_t rest = value;
    for (std::size_t j = 0; j < base.resolution() && rest > 0; ++j) {
      digits_.push_back(static_cast<std::uint32_t>(rest % base.base(j)));
      rest /= base.base(j);
    }
    // Only n = M_N leaves a carry, a single 1 at position N.
    if (rest > 0) digits_.push_back(static_cast<std::uint32_t>(rest));
  }

  std::size_t value() const noexcept { return value_; }
  std::uint32_t digit(std::size_t j) const { return j < digits_.size() ? digits_[j] : 0; }
  std::span<const std::uint32_t> digits() const noexcept { return digits_; }
  /// |n| = max{j : n_j != 0}; zero for n = 0.
  std::size_t order() const noexcept { return digits_.empty() ? 0 : digits_.size() - 1; }

 private:
  std::size_t value_;
  std::vector<std::uint32_t> digits_;
};

/// Complex function constant on the rank-N cosets, values in rank order.
class FiniteFunction {
 public:
  FiniteFunction() = default;

  FiniteFunction(BaseSequence base, std::vector<Complex> values)
      : base_(std::move(base)), values_(std::move(values)) {
    detail::require(values_.size() == base_.size(),
                    "function has " + std::to_string(values_.size()) + " values, expected M_N = " +
                        std::to_string(base_.size()));
  }

  static FiniteFunction zeros(const BaseSequence& base) {
    return FiniteFunction(base, std::vector<Complex>(base.size()));
  }
  static FiniteFunction constant(const BaseSequence& base, Complex c) {
    return FiniteFunction(base, std::vector<Complex>(base.size(), c));
  }
  template <class Fn>
  static FiniteFunction from_ranks(const BaseSequence& base, Fn&& fn) {
    std::vector<Complex> v(base.size());
    for (std::size_t r = 0; r < v.size(); ++r) v[r] = fn(r);
    return FiniteFunction(base, std::move(v));
  }

  const BaseSequence& base() const noexcept { return base_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const Complex> values() const noexcept { return values_; }
  const Complex& operator[](std::size_t r) const { return values_[r]; }
  /// Largest modulus, used to scale relative comparisons.
  double max_abs() const {
    double m = 0;
    for (const auto& v : values_) m = std::max(m, std::abs(v));
    return m;
  }

  friend FiniteFunction operator+(const FiniteFunction& a, const FiniteFunction& b) {
    return combine(a, b, std::plus<>{});
  }
  friend FiniteFunction operator-(const FiniteFunction& a, const FiniteFunction& b) {
    return combine(a, b, std::minus<>{});
  }
  friend FiniteFunction operator*(Complex c, const FiniteFunction& f) {
    std::vector<Complex> v(f.values_);
    for (auto& x : v) x *= c;
    return FiniteFunction(f.base_, std::move(v));
  }
  friend FiniteFunction operator*(const FiniteFunction& f, Complex c) { return c * f; }
  friend FiniteFunction operator/(const FiniteFunction& f, Complex c) { return (1.0 / c) * f; }

 private:
  template <class Op>
  static FiniteFunction combine(const FiniteFunction& a, const FiniteFunction& b, Op op) {
    detail::require(a.base_ == b.base_, "functions live on different base sequences");
    std::vector<Complex> v(a.size());
    for (std::size_t r = 0; r < v.size(); ++r) v[r] = op(a.values_[r], b.values_[r]);
    return FiniteFunction(a.base_, std::move(v));
  }

  BaseSequence base_;
  std::vector<Complex> values_;
};

/// Pointwise modulus |f|.
inline FiniteFunction abs(const FiniteFunction& f) {
  return FiniteFunction::from_ranks(f.base(), [&](std::size_t r) { return Complex(std::abs(f[r])); });
}

/// max_r |a(r) - b(r)| divided by max(max|a|, max|b|); plain difference when both vanish.
inline double relative_distance(const FiniteFunction& a, const FiniteFunction& b) {
  detail::require(a.base() == b.base(), "functions live on different base sequences");
  double diff = 0;
  for (std::size_t r = 0; r < a.size(); ++r) diff = std::max(diff, std::abs(a[r] - b[r]));
  const double scale = std::max(a.max_abs(), b.max_abs());
  return scale > 0 ? diff / scale : diff;
}

/// The coset I_n(anchor): points agreeing with anchor in digits 0..n-1.
struct IntervalSpec {
  std::size_t depth = 0;
  GroupPoint anchor;

  static IntervalSpec at_zero(std::size_t depth, const BaseSequence& base) {
    return IntervalSpec{depth, zero_point(base)};
  }

  void check(const BaseSequence& base) const {
    detail::require(depth <= base.resolution(), "interval depth exceeds resolution");
    check_point(anchor, base);
  }

  double measure(const BaseSequence& base) const {
    return 1.0 / static_cast<double>(base.power(depth));
  }

  /// rank mod M_depth shared by all members.
  std::size_t offset(const BaseSequence& base) const {
    check(base);
    std::size_t r = 0;
    for (std::size_t k = 0; k < depth; ++k) r += anchor.digits[k] * base.power(k);
    return r;
  }

  bool contains_rank(std::size_t r, const BaseSequence& base) const {
    return r % base.power(depth) == offset(base);
  }

  std::vector<std::size_t> ranks(const BaseSequence& base) const {
    const std::size_t stride = base.power(depth);
    std::vector<std::size_t> out;
    out.reserve(base.size() / stride);
    for (std::size_t r = offset(base); r < base.size(); r += stride) out.push_back(r);
    return out;
  }
};

/// Shell index s of a nonzero point: x in I_s \ I_{s+1}. Returns N for x = 0.
inline std::size_t shell_of(std::size_t r, const BaseSequence& base) {
  for (std::size_t k = 0; k < base.resolution(); ++k) {
    if (r % base.base(k) != 0) return k;
    r /= base.base(k);
  }
  return base.resolution();
}

struct ShellDecomposition {
  /// shells[s] holds the ranks of I_s \ I_{s+1}, s < depth.
  std::vector<std::vector<std::size_t>> shells;
  /// The ranks of I_depth.
  std::vector<std::size_t> core;
};

inline ShellDecomposition shell_decomposition(const BaseSequence& base, std::size_t depth) {
  detail::require(depth <= base.resolution(), "shell depth exceeds resolution");
  ShellDecomposition d;
  d.shells.resize(depth);
  for (std::size_t r = 0; r < base.size(); ++r) {
    const std::size_t s = shell_of(r, base);
    if (s < depth)
      d.shells[s].push_back(r);
    else
      d.core.push_back(r);
  }
  return d;
}

// ---------------------------------------------------------------------------
// Integrals and quasi-norms. Every point carries Haar mass 1/M_N.

inline Complex haar_integral(const FiniteFunction& f) {
  Complex sum = 0;
  for (const auto& v : f.values()) sum += v;
  return sum / static_cast<double>(f.size());
}

inline double lp_norm(const FiniteFunction& f, double p) {
  detail::require(p > 0, "L_p exponent must be positive");
  double sum = 0;
  for (const auto& v : f.values()) sum += std::pow(std::abs(v), p);
  return std::pow(sum / static_cast<double>(f.size()), 1.0 / p);
}

/// ||f||_p^p, avoiding the final root.
inline double lp_norm_pow(const FiniteFunction& f, double p) {
  detail::require(p > 0, "L_p exponent must be positive");
  double sum = 0;
  for (const auto& v : f.values()) sum += std::pow(std::abs(v), p);
  return sum / static_cast<double>(f.size());
}

inline double linf_norm(const FiniteFunction& f) { return f.max_abs(); }

/// sup_lambda lambda mu(|f| > lambda)^{1/p}, exact by order statistics.
inline double weak_lp_norm(const FiniteFunction& f, double p) {
  detail::require(p > 0, "weak L_p exponent must be positive");
  std::vector<double> mags(f.size());
  for (std::size_t r = 0; r < f.size(); ++r) mags[r] = std::abs(f[r]);
  std::sort(mags.begin(), mags.end(), std::greater<>{});
  const double total = static_cast<double>(mags.size());
  double best = 0;
  for (std::size_t k = 0; k < mags.size(); ++k) {
    if (mags[k] == 0) break;
    best = std::max(best, mags[k] * std::pow(static_cast<double>(k + 1) / total, 1.0 / p));
  }
  return best;
}

}  // namespace vlab
