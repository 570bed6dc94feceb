#pragma once

// The release gate: one check per acceptance criterion, each writing its
// numbers to <out>/criterion-<id>.csv. Timings are reported but never written
// to CSV so reruns stay byte-identical.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "vlab/core.hpp"
#include "vlab/counterexamples.hpp"
#include "vlab/csv.hpp"
#include "vlab/experiments.hpp"
#include "vlab/hardy.hpp"
#include "vlab/kernels.hpp"
#include "vlab/random.hpp"
#include "vlab/sums.hpp"
#include "vlab/transform.hpp"

namespace vlab {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0;
  double limit_seconds = 0;  // 0: no time limit
};

struct VerifyOptions {
  std::filesystem::path out = "verify-out";
  /// Perturbs the factored kernel route; criterion 2 must then fail.
  bool tamper_kernel = false;
  bool parallel = false;
  /// Rerun criteria 1-9 into <out>/rerun and compare the CSV bytes.
  bool determinism = true;
  std::uint64_t seed = 20240601;
};

namespace acceptance {

inline BaseSequence walsh8() { return BaseSequence::walsh(8); }
inline BaseSequence mixed6() { return BaseSequence({2, 3, 2, 3, 2, 3}); }

inline std::string fmt(double v) { return format_double(v); }

struct Check {
  bool passed = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) passed = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
  void note(const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += "info: " + what;
  }
};

// 1. Fast transform against the naive oracle.
inline Check transforms(const VerifyOptions& o) {
  Check c;
  CsvTable t({"bases", "sample", "fast_vs_naive", "roundtrip"});
  for (const auto& [name, base] : {std::pair{std::string("walsh:12"), BaseSequence::walsh(12)},
                                   std::pair{std::string("2,3,2,3,2,3"), mixed6()}}) {
    Rng rng(o.seed);
    std::vector<FiniteFunction> fs;
    for (int i = 0; i < 100; ++i) fs.push_back(random_function(base, rng));
    const auto oracle = analyze_naive(fs);
    const Characters chars(base);
    double worst_fast = 0, worst_rt = 0;
    for (std::size_t i = 0; i < fs.size(); ++i) {
      const Spectrum s = analyze_fast(fs[i], chars);
      const double a = relative_distance(s, oracle[i]);
      const double b = relative_distance(synthesize(s, chars), fs[i]);
      worst_fast = std::max(worst_fast, a);
      worst_rt = std::max(worst_rt, b);
      t.add({name, i, a, b});
    }
    c.require(worst_fast <= 1e-9 && worst_rt <= 1e-9,
              name + " fast/naive " + fmt(worst_fast) + ", roundtrip " + fmt(worst_rt));
  }
  t.save((o.out / "criterion-1.csv").string());
  return c;
}

// 2. Kernel routes, exhaustively on both default bases.
inline Check kernel_identities(const VerifyOptions& o) {
  Check c;
  CsvTable t({"bases", "n", "l1_norm", "route_agreement"});
  for (const auto& [name, base] : {std::pair{std::string("walsh:8"), walsh8()},
                                   std::pair{std::string("2,3,2,3,2,3"), mixed6()}}) {
    DirichletSweep sweep(base);
    double worst = 0, paley_l1 = 0;
    while (sweep.n() < base.size()) {
      const std::size_t n = sweep.advance();
      FiniteFunction factored = dirichlet_factored(base, n);
      if (o.tamper_kernel) {
        std::vector<Complex> v(factored.values().begin(), factored.values().end());
        v[v.size() / 2] += 1e-6 * static_cast<double>(n);
        factored = FiniteFunction(base, std::move(v));
      }
      const KernelReport r = kernel_report(sweep.current(), n, factored);
      worst = std::max(worst, r.route_agreement);
      t.add({name, n, r.l1_norm, r.route_agreement});
    }
    for (std::size_t j = 0; j <= base.resolution(); ++j)
      paley_l1 = std::max(paley_l1, std::abs(lebesgue_constant(dirichlet_paley(base, j)) - 1.0));
    c.require(worst <= 1e-9, name + " route agreement " + fmt(worst));
    c.require(paley_l1 <= 1e-12, name + " max | ||D_Mj||_1 - 1 | = " + fmt(paley_l1));
  }
  t.save((o.out / "criterion-2.csv").string());
  return c;
}

// 3. Exact anchors.
inline Check anchors(const VerifyOptions& o) {
  Check c;
  const BaseSequence base = walsh8();
  const double d3 = lebesgue_constant(base, 3);
  const double d5 = lebesgue_constant(base, 5);
  const double block = hardy_norm(level_block(base, 2), 0.5);
  CsvTable t({"quantity", "value", "expected"});
  t.add({std::string("||D_3||_1"), d3, 1.5});
  t.add({std::string("||D_5||_1"), d5, 1.75});
  t.add({std::string("||D_8 - D_4||_H1/2"), block, 0.25});
  t.save((o.out / "criterion-3.csv").string());
  c.require(std::abs(d3 - 1.5) <= 1e-12, "||D_3||_1 = " + fmt(d3));
  c.require(std::abs(d5 - 1.75) <= 1e-12, "||D_5||_1 = " + fmt(d5));
  c.require(std::abs(block - 0.25) <= 1e-12, "block H_1/2 norm = " + fmt(block));
  return c;
}

inline double lemma2_max(const BaseSequence& base, std::uint64_t seed, CsvTable& t, const std::string& name) {
  Rng rng(seed);
  DirichletSweep sweep(base);
  double worst = 0;
  while (sweep.n() < base.size()) {
    const std::size_t n = sweep.advance();
    double row_max = 0;
    for (const auto& row : lemma2_profile(sweep.current(), base.resolution(), rng))
      row_max = std::max(row_max, row.max_ratio);
    worst = std::max(worst, row_max);
    t.add({name, n, row_max});
  }
  return worst;
}

// 4. Lemma 2 constant does not grow from N = 6 to N = 8.
inline Check lemma2(const VerifyOptions& o) {
  Check c;
  CsvTable t({"bases", "n", "max_ratio"});
  const double m6 = lemma2_max(BaseSequence::walsh(6), o.seed, t, "walsh:6");
  const double m8 = lemma2_max(walsh8(), o.seed, t, "walsh:8");
  t.save((o.out / "criterion-4.csv").string());
  c.require(m8 <= 1.1 * m6, "max ratio " + fmt(m6) + " (N=6) -> " + fmt(m8) + " (N=8), growth " + fmt(m8 / m6) +
                                " (limit 1.1)");
  return c;
}

// 5. Weighted maximal operator on random atoms: no growth with the support level.
inline Check maximal_atoms(const VerifyOptions& o) {
  Check c;
  const BaseSequence base = walsh8();
  const std::vector<std::size_t> levels = {2, 4, 6};
  CsvTable t({"p", "level", "atom", "probe"});
  for (double p : {0.5, 0.75, 1.0}) {
    const auto maxima = map_indexed(levels.size(), o.parallel, [&](std::size_t i) {
      Rng rng(o.seed + 101 * i + static_cast<std::uint64_t>(p * 1000));
      std::vector<double> probes;
      for (int a = 0; a < 100; ++a) {
        const IntervalSpec I = detail::random_interval(base, levels[i], rng);
        probes.push_back(atom_probe(random_atom(base, I, p, rng)));
      }
      return probes;
    });
    double top = 0;
    std::vector<double> per_level;
    for (std::size_t i = 0; i < levels.size(); ++i) {
      double m = 0;
      for (std::size_t a = 0; a < maxima[i].size(); ++a) {
        t.add({p, levels[i], a, maxima[i][a]});
        m = std::max(m, maxima[i][a]);
      }
      per_level.push_back(m);
      top = std::max(top, m);
    }
    const double growth = top / per_level.front();
    c.require(growth <= 2.0, "p=" + fmt(p) + " level maxima " + fmt(per_level[0]) + ", " + fmt(per_level[1]) + ", " +
                                 fmt(per_level[2]) + ", growth " + fmt(growth) + " (limit 2)");
  }
  t.save((o.out / "criterion-5.csv").string());
  return c;
}

// 6. Divergence signatures for p = 1/2.
inline Check divergence(const VerifyOptions& o) {
  Check c;
  const BaseSequence base = walsh8();
  const double p = 0.5;
  CsvTable t({"phi", "k", "M_2k", "ratio", "paper_lower_bound"});
  std::vector<double> r1, rl, rc;
  for (const std::string name : {"const1", "loglog", "critical"}) {
    const PhiWeight phi = phi_preset(name, p);
    for (std::size_t k = 1; k <= 3; ++k) {
      const Theorem1bRow row = theorem1b_ratio(base, k, p, phi);
      t.add({name, k, row.M2k, row.ratio, row.paper_lower_bound});
      (name == "const1" ? r1 : name == "loglog" ? rl : rc).push_back(row.ratio);
    }
  }
  t.save((o.out / "criterion-6.csv").string());

  const double stated[3] = {4, 64, 1024};
  bool stated_ok = true, closed_ok = true;
  for (std::size_t k = 1; k <= 3; ++k) {
    stated_ok &= std::abs(r1[k - 1] - stated[k - 1]) <= 1e-9 * stated[k - 1];
    const double closed = std::pow(static_cast<double>(base.power(2 * k)), 1.0 / p - 1.0);
    closed_ok &= std::abs(r1[k - 1] - closed) <= 1e-9 * closed;
  }
  c.require(stated_ok, "const1 ratios " + fmt(r1[0]) + ", " + fmt(r1[1]) + ", " + fmt(r1[2]) +
                           " vs stated 4, 64, 1024");
  c.require(closed_ok, "const1 ratios equal M_2k^(1/p-1)");
  c.require(rl[0] < rl[1] && rl[1] < rl[2],
            "loglog ratios " + fmt(rl[0]) + ", " + fmt(rl[1]) + ", " + fmt(rl[2]) + " strictly increase");
  const double hi = std::max({rc[0], rc[1], rc[2]}), lo = std::min({rc[0], rc[1], rc[2]});
  c.require(hi <= 2 * lo, "critical max/min " + fmt(hi / lo) + " (limit 2)");
  return c;
}

// 7. p = 1: Lebesgue constants at q_k grow linearly; the L1 ratio increases.
inline Check divergence_L1(const VerifyOptions& o) {
  Check c;
  const BaseSequence base = BaseSequence::walsh(12);
  const PhiWeight one = phi_preset("const1", 1.0);
  CsvTable t({"k", "q", "lebesgue", "lebesgue_over_k", "ratio_L1"});
  double min_over_k = 1e300;
  bool increasing = true;
  double prev = -1;
  for (std::size_t k = 1; k <= 5; ++k) {
    const std::size_t q = q_index(base, k, QVariant::even_sum);
    const double L = lebesgue_constant(base, q);
    const double ratio = theorem1b_ratio_L1(base, k, one).ratio;
    min_over_k = std::min(min_over_k, L / static_cast<double>(k));
    increasing &= ratio > prev;
    prev = ratio;
    t.add({k, q, L, L / static_cast<double>(k), ratio});
  }
  t.save((o.out / "criterion-7.csv").string());
  c.require(min_over_k >= 0.25, "min ||D_q||_1 / k = " + fmt(min_over_k) + " (limit 0.25)");
  c.require(increasing, "L1 ratio strictly increases for k = 1..5");
  return c;
}

// 8. Strong summability on random atoms, K = M_N = 65536.
inline Check strong_sums(const VerifyOptions& o) {
  Check c;
  const BaseSequence base = BaseSequence::walsh(16);
  const double p = 0.5;
  constexpr std::size_t kDetail = 2;
  const std::vector<std::size_t> levels = {0, 1, 2, 3};
  const auto rows = map_indexed(levels.size(), o.parallel, [&](std::size_t i) {
    Rng rng(o.seed + 31 * (i + 1));
    std::vector<detail::StrongSumRow> out;
    for (int a = 0; a < 10; ++a) {
      const IntervalSpec I = detail::random_interval(base, levels[i], rng);
      out.push_back(detail::strong_sum_row(random_atom(base, I, p, rng, kDetail), kDetail));
    }
    return out;
  });
  CsvTable t({"level", "atom", "total", "hardy_p", "ratio", "tail_fraction", "monotone"});
  double lo = 1e300, hi = 0, tail = 0;
  bool monotone = true;
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t a = 0; a < rows[i].size(); ++a) {
      const auto& r = rows[i][a];
      const double ratio = r.total / r.hardy_p;
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
      tail = std::max(tail, r.tail_fraction);
      monotone &= r.monotone;
      t.add({r.level, a, r.total, r.hardy_p, ratio, r.tail_fraction, std::size_t{r.monotone}});
    }
  t.save((o.out / "criterion-8.csv").string());
  c.require(monotone, "partial totals monotone");
  c.require(tail < 1e-2, "max last-half increment " + fmt(tail) + " of the total (limit 1e-2)");
  c.require(hi <= 10 * lo, "ratio range [" + fmt(lo) + ", " + fmt(hi) + "] (limit 10x)");
  return c;
}

// 9. Counterexample residuals stay up; positive-direction residuals decay.
inline Check counterexamples(const VerifyOptions& o) {
  Check c;
  CsvTable t({"construction", "k", "residual", "modulus", "bound"});

  const BaseSequence b12 = BaseSequence::walsh(12);
  for (double p : {0.5, 0.75}) {
    const auto con = theorem3b_martingale(b12, 5, p);
    double floor = 1e300;
    for (const auto& r : theorem3b_diagnostics(con)) {
      floor = std::min(floor, r.residual_weak_norm);
      t.add({"3b p=" + fmt(p), r.k, r.residual_weak_norm, r.modulus, r.modulus_bound});
    }
    c.require(con.spectrum_ok, "3b p=" + fmt(p) + " spectrum is the block indicator");
    c.require(floor >= detail::kResidualFloor3b,
              "3b p=" + fmt(p) + " min residual " + fmt(floor) + " (floor " + fmt(detail::kResidualFloor3b) + ")");
  }

  const BaseSequence b9 = BaseSequence::walsh(9);
  for (auto v : {CoeffVariant::inv_Mi, CoeffVariant::inv_M2i}) {
    const std::string name = v == CoeffVariant::inv_Mi ? "4b inv_Mi" : "4b inv_M2i";
    const auto con = theorem4b_martingale(b9, 2, v);
    double floor = 1e300;
    for (const auto& r : theorem4b_diagnostics(con)) {
      floor = std::min(floor, r.residual_l1);
      t.add({name, r.k, r.residual_l1, r.modulus, r.modulus_bound});
    }
    c.require(con.spectrum_ok, name + " spectrum matches the coefficients");
    // The 1/M_{2i} coefficients shrink faster than ||D_q||_1 grows, so that
    // variant's residual decays; it is reported, the default is asserted.
    if (v == CoeffVariant::inv_Mi)
      c.require(floor >= detail::kResidualFloor4b,
                name + " min residual " + fmt(floor) + " (floor " + fmt(detail::kResidualFloor4b) + ")");
    else
      c.note(name + " min residual " + fmt(floor));
  }

  const FiniteFunction g = geometric_spectrum_function(walsh8(), 0.25);
  const auto rows = convergence_profile(g, 0.5);
  bool weak_mono = true, l1_mono = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    t.add({std::string("geometric rho=0.25"), rows[i].k, rows[i].weak_residual, rows[i].l1_residual, 0.0});
    if (i == 0) continue;
    weak_mono &= rows[i].weak_residual <= rows[i - 1].weak_residual;
    l1_mono &= rows[i].l1_residual <= rows[i - 1].l1_residual;
  }
  // Decay is judged well before the trivial endpoint S_{M_N} f = f.
  const std::size_t probe = 16;
  c.require(weak_mono && l1_mono, "positive-direction residuals nonincreasing");
  c.require(rows[probe - 1].weak_residual < 1e-3 && rows[probe - 1].l1_residual < 1e-3,
            "positive-direction residuals at k=" + std::to_string(probe) + ": weak " +
                fmt(rows[probe - 1].weak_residual) + ", L1 " + fmt(rows[probe - 1].l1_residual));
  t.save((o.out / "criterion-9.csv").string());
  return c;
}

struct Entry {
  int id;
  const char* name;
  double limit;
  Check (*fn)(const VerifyOptions&);
};

inline const std::vector<Entry>& entries() {
  static const std::vector<Entry> list = {
      {1, "transform correctness", 10, transforms},
      {2, "kernel identities", 0, kernel_identities},
      {3, "exact anchors", 0, anchors},
      {4, "Lemma 2 constant", 0, lemma2},
      {5, "weighted maximal operator on atoms", 60, maximal_atoms},
      {6, "divergence for p < 1", 0, divergence},
      {7, "divergence for p = 1", 0, divergence_L1},
      {8, "strong summability", 0, strong_sums},
      {9, "counterexample residuals", 0, counterexamples},
  };
  return list;
}

inline std::vector<CriterionResult> run_once(const VerifyOptions& o, const std::function<void(const CriterionResult&)>& report) {
  std::filesystem::create_directories(o.out);
  std::vector<CriterionResult> results;
  CsvTable summary({"criterion", "name", "status"});
  for (const auto& e : entries()) {
    const auto start = std::chrono::steady_clock::now();
    CriterionResult r{e.id, e.name, false, "", 0, e.limit};
    try {
      const Check c = e.fn(o);
      r.passed = c.passed;
      r.detail = c.detail;
    } catch (const std::exception& ex) {
      r.detail = std::string("exception: ") + ex.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (r.limit_seconds > 0 && r.seconds > r.limit_seconds) {
      r.passed = false;
      r.detail += "; FAILED runtime " + fmt(r.seconds) + " s (limit " + fmt(r.limit_seconds) + " s)";
    }
    summary.add({static_cast<long long>(r.id), r.name, std::string(r.passed ? "PASS" : "FAIL")});
    if (report) report(r);
    results.push_back(std::move(r));
  }
  summary.save((o.out / "verify.csv").string());
  return results;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace acceptance

/// Runs criteria 1-9, then 10 (rerun into <out>/rerun, compare CSV bytes,
/// total time of the first pass under five minutes).
inline std::vector<CriterionResult> verify_all(const VerifyOptions& options,
                                               const std::function<void(const CriterionResult&)>& report = {}) {
  const auto start = std::chrono::steady_clock::now();
  auto results = acceptance::run_once(options, report);
  const double first_pass = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!options.determinism) return results;

  CriterionResult r{10, "determinism and total runtime", true, "", 0, 300};
  const auto rerun_start = std::chrono::steady_clock::now();
  VerifyOptions again = options;
  again.out = options.out / "rerun";
  acceptance::run_once(again, {});
  std::size_t compared = 0;
  std::vector<std::string> differing;
  for (const auto& entry : std::filesystem::directory_iterator(options.out)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".csv") continue;
    ++compared;
    if (acceptance::slurp(entry.path()) != acceptance::slurp(again.out / entry.path().filename()))
      differing.push_back(entry.path().filename().string());
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - rerun_start).count();
  r.passed = differing.empty() && compared > 0 && first_pass <= 300;
  r.detail = std::to_string(compared) + " CSV files compared, " + std::to_string(differing.size()) +
             " differ; first pass " + acceptance::fmt(first_pass) + " s (limit 300 s)";
  for (const auto& d : differing) r.detail += "; FAILED " + d + " differs";
  if (report) report(r);
  results.push_back(std::move(r));
  return results;
}

}  // namespace vlab
