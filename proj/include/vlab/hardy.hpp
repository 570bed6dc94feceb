#pragma once

// Martingale Hardy spaces at finite resolution: maximal function, H_p
// quasi-norm, p-atoms and their assembly, and moduli of continuity.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "vlab/core.hpp"
#include "vlab/random.hpp"
#include "vlab/sums.hpp"

namespace vlab {

/// A martingale represented by its terminal resolution-N term;
/// f^(j) = E_j(terminal) for j <= N.
class MartingaleApprox {
 public:
  MartingaleApprox() = default;
  explicit MartingaleApprox(FiniteFunction terminal) : terminal_(std::move(terminal)) {}

  const FiniteFunction& terminal() const noexcept { return terminal_; }
  const BaseSequence& base() const noexcept { return terminal_.base(); }
  std::size_t resolution() const noexcept { return base().resolution(); }
  FiniteFunction level(std::size_t j) const { return conditional_expectation(terminal_, j); }

 private:
  FiniteFunction terminal_;
};

/// f* = sup_j |f^(j)|, j = 0..N, from per-level coset means.
inline FiniteFunction maximal_function(const MartingaleApprox& f) {
  const FiniteFunction& g = f.terminal();
  const BaseSequence& base = g.base();
  std::vector<double> best(g.size(), 0.0);
  std::vector<Complex> means;
  for (std::size_t j = 0; j <= base.resolution(); ++j) {
    const std::size_t stride = base.power(j);
    means.assign(stride, 0.0);
    for (std::size_t r = 0; r < g.size(); ++r) means[r % stride] += g[r];
    const double count = static_cast<double>(g.size() / stride);
    for (std::size_t r = 0; r < g.size(); ++r)
      best[r] = std::max(best[r], std::abs(means[r % stride]) / count);
  }
  return FiniteFunction::from_ranks(base, [&](std::size_t r) { return Complex(best[r]); });
}

/// f*(x) = sup_n |I_n(x)|^{-1} |int_{I_n(x)} f|, enumerating each coset by digits.
inline FiniteFunction maximal_function_averaged(const FiniteFunction& f) {
  const BaseSequence& base = f.base();
  const std::size_t N = base.resolution();
  return FiniteFunction::from_ranks(base, [&](std::size_t x) {
    const GroupPoint px = unrank(x, base);
    double best = 0;
    for (std::size_t n = 0; n <= N; ++n) {
      // Members of I_n(x): digits 0..n-1 copied from x, the rest free.
      GroupPoint y = px;
      for (std::size_t k = n; k < N; ++k) y.digits[k] = 0;
      Complex sum = 0.0;
      std::size_t count = 0;
      while (true) {
        sum += f[rank(y, base)];
        ++count;
        std::size_t k = n;
        while (k < N && ++y.digits[k] == base.base(k)) y.digits[k++] = 0;
        if (k == N) break;
      }
      best = std::max(best, std::abs(sum) / static_cast<double>(count));
    }
    return Complex(best);
  });
}

inline double hardy_norm(const MartingaleApprox& f, double p) {
  detail::require(p > 0, "Hardy exponent must be positive");
  return lp_norm(maximal_function(f), p);
}

inline double hardy_norm(const FiniteFunction& f, double p) { return hardy_norm(MartingaleApprox(f), p); }

struct AtomSpec {
  IntervalSpec support;
  double p = 1;
  FiniteFunction a;
};

struct AtomCheck {
  bool support_ok = false;
  bool mean_ok = false;
  bool sup_ok = false;
  /// |mean of a over I| / mu(I)^{-1/p}.
  double scaled_mean = 0;
  double sup = 0;
  double bound = 0;
  std::string diagnostics;

  bool ok() const noexcept { return support_ok && mean_ok && sup_ok; }
};

/// supp(a) in I, int_I a = 0 and ||a||_inf <= mu(I)^{-1/p}.
inline AtomCheck validate_atom(const AtomSpec& atom) {
  const BaseSequence& base = atom.a.base();
  AtomCheck check;
  std::ostringstream msg;
  if (!(atom.p > 0 && atom.p <= 1)) {
    msg << "atom exponent p=" << atom.p << " outside (0,1]; ";
    check.diagnostics = msg.str();
    return check;
  }
  atom.support.check(base);
  check.bound = std::pow(atom.support.measure(base), -1.0 / atom.p);
  constexpr double tol = 1e-12;

  Complex inside = 0.0;
  double outside = 0;
  std::size_t count = 0;
  for (std::size_t r = 0; r < atom.a.size(); ++r) {
    const double mag = std::abs(atom.a[r]);
    check.sup = std::max(check.sup, mag);
    if (atom.support.contains_rank(r, base)) {
      inside += atom.a[r];
      ++count;
    } else {
      outside = std::max(outside, mag);
    }
  }
  check.scaled_mean = std::abs(inside) / static_cast<double>(count) / check.bound;
  check.support_ok = outside <= tol * check.bound;
  check.mean_ok = check.scaled_mean <= tol;
  check.sup_ok = check.sup <= check.bound * (1 + tol);
  if (!check.support_ok) msg << "nonzero value " << outside << " outside the support; ";
  if (!check.mean_ok) msg << "mean over the support is " << check.scaled_mean << " of the bound; ";
  if (!check.sup_ok) msg << "sup " << check.sup << " exceeds mu(I)^(-1/p) = " << check.bound << "; ";
  check.diagnostics = msg.str();
  return check;
}

/// Random p-atom on I_depth(anchor). Values are i.i.d. uniform in [-1,1] on
/// each I_{depth+levels} sub-coset, mean-subtracted and rescaled so the sup
/// equals mu(I)^{-1/p}. levels >= N - depth gives one value per point. An
/// atom with a single cell is zero.
inline AtomSpec random_atom(const BaseSequence& base, const IntervalSpec& support, double p, Rng& rng,
                            std::size_t levels = static_cast<std::size_t>(-1)) {
  support.check(base);
  detail::require(p > 0 && p <= 1, "atom exponent p must lie in (0, 1]");
  const std::size_t depth = support.depth;
  const std::size_t fine = depth + std::min(levels, base.resolution() - depth);
  const std::size_t cells = base.power(fine) / base.power(depth);
  std::vector<double> v(cells);
  double mean = 0;
  for (auto& x : v) {
    x = rng.uniform(-1, 1);
    mean += x;
  }
  mean /= static_cast<double>(cells);
  double peak = 0;
  for (auto& x : v) {
    x -= mean;
    peak = std::max(peak, std::abs(x));
  }
  const double bound = std::pow(support.measure(base), -1.0 / p);
  const double scale = (cells > 1 && peak > 0) ? bound / peak : 0.0;
  const std::size_t offset = support.offset(base);
  const std::size_t stride = base.power(depth);
  auto a = FiniteFunction::from_ranks(base, [&](std::size_t r) {
    if (r % stride != offset) return Complex(0.0);
    return Complex(v[(r / stride) % cells] * scale);
  });
  return AtomSpec{support, p, std::move(a)};
}

struct Assembly {
  MartingaleApprox martingale;
  double sum_mu_p = 0;
  double hardy_p = 0;
  /// ||f||_{H_p}^p / sum |mu_k|^p (0 for the empty family).
  double empirical_constant = 0;
  bool bound_holds = true;
};

/// terminal = sum_k mu_k a_k, with the check ||f||_{H_p}^p <= sum |mu_k|^p.
inline Assembly atomic_assemble(const BaseSequence& base, double p, const std::vector<double>& mu,
                                const std::vector<AtomSpec>& atoms) {
  detail::require(mu.size() == atoms.size(), "need one coefficient per atom");
  detail::require(p > 0 && p <= 1, "assembly exponent p must lie in (0, 1]");
  std::vector<Complex> sum(base.size());
  Assembly out;
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    detail::require(atoms[k].a.base() == base, "atom " + std::to_string(k) + " uses another base");
    detail::require(atoms[k].p == p, "atom " + std::to_string(k) + " has a different exponent");
    const AtomCheck check = validate_atom(atoms[k]);
    detail::require(check.ok(), "atom " + std::to_string(k) + " is invalid: " + check.diagnostics);
    for (std::size_t r = 0; r < sum.size(); ++r) sum[r] += mu[k] * atoms[k].a[r];
    out.sum_mu_p += std::pow(std::abs(mu[k]), p);
  }
  out.martingale = MartingaleApprox(FiniteFunction(base, std::move(sum)));
  out.hardy_p = std::pow(hardy_norm(out.martingale, p), p);
  out.empirical_constant = out.sum_mu_p > 0 ? out.hardy_p / out.sum_mu_p : 0.0;
  out.bound_holds = out.hardy_p <= out.sum_mu_p * (1 + 1e-9) + 1e-300;
  return out;
}

enum class SpaceKind { Hp, L1, C };

struct ModulusSpace {
  SpaceKind kind = SpaceKind::L1;
  double p = 1;

  static ModulusSpace hardy(double p) { return {SpaceKind::Hp, p}; }
  static ModulusSpace l1() { return {SpaceKind::L1, 1}; }
  static ModulusSpace continuous() { return {SpaceKind::C, 1}; }
};

/// omega(1/M_n, f): ||f - S_{M_n} f||_{H_p}, or sup_{h in I_n} ||f(.+h) - f||_X.
inline double modulus(const FiniteFunction& f, std::size_t n, ModulusSpace space) {
  const BaseSequence& base = f.base();
  detail::require(n <= base.resolution(), "modulus level exceeds resolution");
  if (space.kind == SpaceKind::Hp) return hardy_norm(f - conditional_expectation(f, n), space.p);
  double best = 0;
  for (auto h : IntervalSpec::at_zero(n, base).ranks(base)) {
    double acc = 0;
    for (std::size_t x = 0; x < f.size(); ++x) {
      const double d = std::abs(f[rank_add(x, h, base)] - f[x]);
      acc = space.kind == SpaceKind::C ? std::max(acc, d) : acc + d;
    }
    if (space.kind == SpaceKind::L1) acc /= static_cast<double>(f.size());
    best = std::max(best, acc);
  }
  return best;
}

/// int over the complement of the atom's support of |S~_p* a|^p.
inline double atom_probe(const AtomSpec& atom) {
  const BaseSequence& base = atom.a.base();
  const FiniteFunction sup = weighted_maximal(atom.a, WeightSpec(atom.p));
  double sum = 0;
  for (std::size_t r = 0; r < sup.size(); ++r)
    if (!atom.support.contains_rank(r, base)) sum += std::pow(sup[r].real(), atom.p);
  return sum / static_cast<double>(sup.size());
}

struct ApproximationRow {
  std::size_t n = 0;
  std::size_t level = 0;  // k with M_k < n <= M_{k+1}
  double residual = 0;    // ||S_n f - f||_p
  double modulus = 0;     // omega(1/M_k, f)_{H_p}
  double ratio = 0;       // residual / (n^{1/p-1} log^{[p]} n modulus)
};

/// ||S_n f - f||_p against n^{1/p-1} log^{[p]}(n) omega(1/M_k, f)_{H_p} for every n <= M_N.
/// Rows with a vanishing modulus (f already F_k-measurable) report ratio 0.
inline std::vector<ApproximationRow> approximation_sweep(const FiniteFunction& f, double p) {
  const BaseSequence& base = f.base();
  const WeightSpec weight(p);
  const Characters chars(base);
  const Spectrum spectrum = analyze_fast(f, chars);
  std::vector<double> moduli(base.resolution() + 1);
  for (std::size_t k = 0; k <= base.resolution(); ++k) moduli[k] = modulus(f, k, ModulusSpace::hardy(p));
  std::vector<ApproximationRow> rows;
  for (std::size_t k = 0; k < base.resolution(); ++k) {
    for (std::size_t n = base.power(k) + 1; n <= base.power(k + 1); ++n) {
      ApproximationRow row{n, k, lp_norm(tail(spectrum, n, chars), p), moduli[k], 0};
      const double nd = static_cast<double>(n);
      const double scale = std::pow(nd, 1.0 / p - 1.0) * (weight.bracket() ? std::log(nd) : 1.0);
      if (row.modulus > 0) row.ratio = row.residual / (scale * row.modulus);
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace vlab
