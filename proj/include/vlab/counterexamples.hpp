#pragma once

// Divergence constructions built from the blocks D_{M_{j+1}} - D_{M_j}, their
// quantitative signatures, and the phi-weights that drive them.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "vlab/core.hpp"
#include "vlab/hardy.hpp"
#include "vlab/kernels.hpp"
#include "vlab/sums.hpp"

namespace vlab {

/// Nondecreasing weight phi: N+ -> [1, inf).
struct PhiWeight {
  std::string name;
  std::function<double(double)> eval;

  double operator()(double n) const { return eval(n); }
};

/// The preset weights for exponent p. Every preset is clamped to at least 1.
///   const1   phi = 1
///   log      phi = log(n+1)
///   loglog   phi = (n+1)^{1/p-1} log^{[p]}(n+1) / loglog(n+16)   (divergent, slowest)
///   critical phi = (n+1)^{1/p-1} log^{[p]}(n+1)                   (negative control)
inline std::vector<PhiWeight> phi_presets(double p) {
  detail::require(p > 0 && p <= 1, "phi presets need p in (0, 1]");
  const WeightSpec w(p);
  auto at_least_one = [](double v) { return std::max(1.0, v); };
  return {
      {"const1", [](double) { return 1.0; }},
      {"log", [=](double n) { return at_least_one(std::log(n + 1)); }},
      {"loglog",
       [=](double n) {
         const double weight = std::pow(n + 1, 1.0 / p - 1.0) * (w.bracket() ? std::log(n + 1) : 1.0);
         return at_least_one(weight / std::log(std::log(n + 16)));
       }},
      {"critical",
       [=](double n) {
         return at_least_one(std::pow(n + 1, 1.0 / p - 1.0) * (w.bracket() ? std::log(n + 1) : 1.0));
       }},
  };
}

inline PhiWeight phi_preset(const std::string& name, double p) {
  for (auto& phi : phi_presets(p))
    if (phi.name == name) return phi;
  throw DomainError("unknown phi preset '" + name + "' (expected const1, log, loglog, critical)");
}

/// D_{M_{j+1}} - D_{M_j}: spectrum is the indicator of [M_j, M_{j+1}).
inline FiniteFunction level_block(const BaseSequence& base, std::size_t j) {
  detail::require(j + 1 <= base.resolution(), "block level exceeds resolution");
  return dirichlet_paley(base, j + 1) - dirichlet_paley(base, j);
}

/// ||D_{M_{j+1}} - D_{M_j}||_{H_p} in closed form. The block's maximal
/// function is its modulus: (m_j - 1) M_j on I_{j+1}, M_j on I_j \ I_{j+1}.
inline double block_hardy_norm(const BaseSequence& base, std::size_t j, double p) {
  detail::require(j + 1 <= base.resolution(), "block level exceeds resolution");
  const double m = base.base(j);
  const double Mj = static_cast<double>(base.power(j));
  const double Mj1 = static_cast<double>(base.power(j + 1));
  const double integral = std::pow((m - 1) * Mj, p) / Mj1 + std::pow(Mj, p) * (m - 1) / Mj1;
  return std::pow(integral, 1.0 / p);
}

/// f_k = D_{M_{2k+1}} - D_{M_{2k}}.
inline MartingaleApprox kernel_block(const BaseSequence& base, std::size_t k) {
  detail::require(2 * k + 1 <= base.resolution(), "kernel block needs 2k+1 <= N");
  return MartingaleApprox(level_block(base, 2 * k));
}

struct Theorem1bRow {
  std::size_t k = 0;
  std::size_t M2k = 0;
  double phi = 0;
  double ratio = 0;
  double paper_lower_bound = 0;
};

/// ||S_{M_{2k}+1} f_k / phi(M_{2k}+2)||_{L_{p,inf}} / ||f_k||_{H_p}, 0 < p < 1.
inline Theorem1bRow theorem1b_ratio(const BaseSequence& base, std::size_t k, double p, const PhiWeight& phi) {
  detail::require(p > 0 && p < 1, "weak-type ratio needs 0 < p < 1; use theorem1b_ratio_L1 for p = 1");
  const MartingaleApprox f = kernel_block(base, k);
  Theorem1bRow row;
  row.k = k;
  row.M2k = base.power(2 * k);
  const double at = static_cast<double>(row.M2k) + 2.0;
  row.phi = phi(at);
  const FiniteFunction partial = partial_sum(f.terminal(), row.M2k + 1);
  row.ratio = weak_lp_norm(partial / row.phi, p) / hardy_norm(f, p);
  row.paper_lower_bound = std::pow(at, 1.0 / p - 1.0) / row.phi;
  return row;
}

/// (1/||f_k||_{H_1}) int |S_{q_k} f_k| / phi(q_k), q_k the even-sum index.
/// paper_lower_bound is (log q_k - 1) / phi(q_k), without the constant.
inline Theorem1bRow theorem1b_ratio_L1(const BaseSequence& base, std::size_t k, const PhiWeight& phi) {
  const MartingaleApprox f = kernel_block(base, k);
  const std::size_t q = q_index(base, k, QVariant::even_sum);
  Theorem1bRow row;
  row.k = k;
  row.M2k = base.power(2 * k);
  row.phi = phi(static_cast<double>(q));
  const FiniteFunction partial = partial_sum(f.terminal(), q);
  row.ratio = lp_norm(partial, 1.0) / row.phi / hardy_norm(f, 1.0);
  row.paper_lower_bound = (std::log(static_cast<double>(q)) - 1.0) / row.phi;
  return row;
}

struct Theorem3bConstruction {
  MartingaleApprox martingale;
  std::size_t blocks = 0;  // A + 1 blocks, i = 0..A
  double p = 0;
  bool spectrum_ok = false;
  double hardy_p = 0;
  double sum_mu_p = 0;
  /// Bound on the H_p mass of the blocks i > A that resolution N cannot hold.
  double truncation_tail = 0;
};

/// f_A = sum_{i<=A} (lambda / M_{2i}^{1/p-1}) a_i with the atoms
/// a_i = (M_{2i}^{1/p-1} / lambda)(D_{M_{2i+1}} - D_{M_{2i}}), lambda = sup m_n.
inline Theorem3bConstruction theorem3b_martingale(const BaseSequence& base, std::size_t A, double p) {
  detail::require(p > 0 && p < 1, "the H_p construction needs 0 < p < 1");
  detail::require(2 * A + 1 <= base.resolution(), "construction needs 2A+1 <= N");
  const double lambda = base.max_base();
  std::vector<AtomSpec> atoms;
  std::vector<double> mu;
  for (std::size_t i = 0; i <= A; ++i) {
    const double scale = std::pow(static_cast<double>(base.power(2 * i)), 1.0 / p - 1.0);
    atoms.push_back(AtomSpec{IntervalSpec::at_zero(2 * i, base), p, (scale / lambda) * level_block(base, 2 * i)});
    mu.push_back(lambda / scale);
  }
  const Assembly assembly = atomic_assemble(base, p, mu, atoms);

  Theorem3bConstruction out;
  out.martingale = assembly.martingale;
  out.blocks = A + 1;
  out.p = p;
  out.hardy_p = assembly.hardy_p;
  out.sum_mu_p = assembly.sum_mu_p;

  const Spectrum s = analyze_fast(out.martingale.terminal());
  out.spectrum_ok = true;
  for (std::size_t j = 0; j < s.size(); ++j) {
    bool in_block = false;
    for (std::size_t i = 0; i <= A; ++i)
      in_block |= j >= base.power(2 * i) && j < base.power(2 * i + 1);
    out.spectrum_ok &= std::abs(s[j] - Complex(in_block ? 1.0 : 0.0)) <= 1e-12;
  }
  // M_{2i} >= M_{2A+2} 4^{i-A-1} for i > A.
  const double first = std::pow(static_cast<double>(base.power(2 * A)) * 4.0, 1.0 - 1.0 / p);
  out.truncation_tail = first / (1.0 - std::pow(4.0, 1.0 - 1.0 / p));
  return out;
}

struct Theorem3bRow {
  std::size_t k = 0;
  double residual_weak_norm = 0;  // ||f - S_{M_{2k+1}-1} f||_{L_{p,inf}}
  double modulus = 0;             // omega(1/M_{2k}, f)_{H_p}
  double modulus_bound = 0;       // sum_{i=k}^{A} M_{2i}^{1-1/p}
};

inline std::vector<Theorem3bRow> theorem3b_diagnostics(const Theorem3bConstruction& c) {
  const FiniteFunction& f = c.martingale.terminal();
  const BaseSequence& base = f.base();
  const Characters chars(base);
  const Spectrum spectrum = analyze_fast(f, chars);
  std::vector<Theorem3bRow> rows;
  for (std::size_t k = 0; k < c.blocks; ++k) {
    Theorem3bRow row;
    row.k = k;
    row.residual_weak_norm = weak_lp_norm(tail(spectrum, base.power(2 * k + 1) - 1, chars), c.p);
    row.modulus = modulus(f, 2 * k, ModulusSpace::hardy(c.p));
    for (std::size_t i = k; i < c.blocks; ++i)
      row.modulus_bound += std::pow(static_cast<double>(base.power(2 * i)), 1.0 - 1.0 / c.p);
    rows.push_back(row);
  }
  return rows;
}

enum class CoeffVariant { inv_Mi, inv_M2i };

struct Theorem4bConstruction {
  MartingaleApprox martingale;
  std::size_t A = 0;  // blocks i = 1..A
  CoeffVariant variant = CoeffVariant::inv_Mi;
  std::vector<double> coefficients;  // coefficients[i-1] multiplies a_i
  bool spectrum_ok = false;
};

inline double theorem4b_coefficient(const BaseSequence& base, std::size_t i, CoeffVariant v) {
  return 1.0 / static_cast<double>(base.power(v == CoeffVariant::inv_Mi ? i : 2 * i));
}

/// f_A = sum_{i=1}^{A} c_i a_i, a_i = D_{M_{2M_i+1}} - D_{M_{2M_i}}, c_i = 1/M_i or 1/M_{2i}.
inline Theorem4bConstruction theorem4b_martingale(const BaseSequence& base, std::size_t A,
                                                  CoeffVariant variant = CoeffVariant::inv_Mi) {
  detail::require(A >= 1, "construction needs at least one block");
  detail::require(A <= base.resolution() && 2 * base.power(A) + 1 <= base.resolution(),
                  "construction needs 2 M_A + 1 <= N");
  Theorem4bConstruction out;
  out.A = A;
  out.variant = variant;
  FiniteFunction sum = FiniteFunction::zeros(base);
  for (std::size_t i = 1; i <= A; ++i) {
    const double c = theorem4b_coefficient(base, i, variant);
    out.coefficients.push_back(c);
    sum = sum + c * level_block(base, 2 * base.power(i));
  }
  out.martingale = MartingaleApprox(std::move(sum));

  const Spectrum s = analyze_fast(out.martingale.terminal());
  out.spectrum_ok = true;
  for (std::size_t j = 0; j < s.size(); ++j) {
    double expected = 0;
    for (std::size_t i = 1; i <= A; ++i) {
      const std::size_t lo = base.power(2 * base.power(i));
      if (j >= lo && j < base.power(2 * base.power(i) + 1)) expected = out.coefficients[i - 1];
    }
    out.spectrum_ok &= std::abs(s[j] - Complex(expected)) <= 1e-12;
  }
  return out;
}

struct Theorem4bRow {
  std::size_t k = 0;
  double residual_l1 = 0;    // ||f - S_{q_{M_k}} f||_1
  double modulus = 0;        // omega(1/M_{2M_k}, f)_{H_1}
  double modulus_bound = 0;  // sum_{i>=k} c_i ||a_i||_{H_1}
};

inline std::vector<Theorem4bRow> theorem4b_diagnostics(const Theorem4bConstruction& c) {
  const FiniteFunction& f = c.martingale.terminal();
  const BaseSequence& base = f.base();
  const Characters chars(base);
  const Spectrum spectrum = analyze_fast(f, chars);
  std::vector<Theorem4bRow> rows;
  for (std::size_t k = 1; k <= c.A; ++k) {
    Theorem4bRow row;
    row.k = k;
    const std::size_t q = q_index(base, base.power(k), QVariant::even_sum);
    row.residual_l1 = lp_norm(tail(spectrum, q, chars), 1.0);
    const std::size_t level = 2 * base.power(k);
    row.modulus = modulus(f, level, ModulusSpace::hardy(1.0));
    for (std::size_t i = k; i <= c.A; ++i)
      row.modulus_bound += c.coefficients[i - 1] * block_hardy_norm(base, 2 * base.power(i), 1.0);
    rows.push_back(row);
  }
  return rows;
}

/// Test function with fhat(j) = rho^j: every tail is dominated by its first
/// term, so residuals decay monotonically for rho < 1/3.
inline FiniteFunction geometric_spectrum_function(const BaseSequence& base, double rho) {
  detail::require(rho > 0 && rho < 1, "spectral decay ratio must lie in (0, 1)");
  std::vector<Complex> c(base.size());
  double v = 1.0;
  for (auto& x : c) {
    x = v;
    v *= rho;
  }
  return synthesize(Spectrum(base, std::move(c)));
}

struct ConvergenceRow {
  std::size_t k = 0;
  double weak_residual = 0;  // ||S_k f - f||_{L_{p,inf}}
  double l1_residual = 0;    // ||S_k f - f||_1
};

/// Residuals of S_k f for k = 1..M_N.
inline std::vector<ConvergenceRow> convergence_profile(const FiniteFunction& f, double p) {
  detail::require(p > 0 && p <= 1, "convergence profile needs p in (0, 1]");
  const Characters chars(f.base());
  const Spectrum spectrum = analyze_fast(f, chars);
  std::vector<ConvergenceRow> rows;
  for (std::size_t k = 1; k <= f.size(); ++k) {
    const FiniteFunction r = tail(spectrum, k, chars);
    rows.push_back({k, weak_lp_norm(r, p), lp_norm(r, 1.0)});
  }
  return rows;
}

}  // namespace vlab
