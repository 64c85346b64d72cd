#pragma once

// Both sides of every eigenvalue inequality, with verdicts.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "jlt/constants.hpp"
#include "jlt/core.hpp"
#include "jlt/eigensolve.hpp"
#include "jlt/operator_model.hpp"

namespace jlt {

enum class Theorem {
  T1,
  T2,
  T4_printed,
  T4_proof_form,
  E16a,
  T2_8,
  T2_9,
  T2_10,
  Bargmann,
  L5_1,
  T5_2,
  T5_3,
  E5_11,
  Remark5_a,
  Remark5_b,
  AxisSplit,  // operator ordering of the split positive parts (lhs 0, rhs = min eigenvalue)
};

inline constexpr std::array<std::pair<Theorem, const char*>, 16> kTheoremNames{{
    {Theorem::T1, "T1"},
    {Theorem::T2, "T2"},
    {Theorem::T4_printed, "T4_printed"},
    {Theorem::T4_proof_form, "T4_proof_form"},
    {Theorem::E16a, "E16a"},
    {Theorem::T2_8, "T2_8"},
    {Theorem::T2_9, "T2_9"},
    {Theorem::T2_10, "T2_10"},
    {Theorem::Bargmann, "Bargmann"},
    {Theorem::L5_1, "L5_1"},
    {Theorem::T5_2, "T5_2"},
    {Theorem::T5_3, "T5_3"},
    {Theorem::E5_11, "E5_11"},
    {Theorem::Remark5_a, "Remark5_a"},
    {Theorem::Remark5_b, "Remark5_b"},
    {Theorem::AxisSplit, "AxisSplit"},
}};

inline const char* theorem_name(Theorem t) {
  for (const auto& [id, name] : kTheoremNames)
    if (id == t) return name;
  return "?";
}

inline std::optional<Theorem> parse_theorem(const std::string& s) {
  for (const auto& [id, name] : kTheoremNames)
    if (s == name) return id;
  return std::nullopt;
}

inline bool takes_p(Theorem t) {
  switch (t) {
    case Theorem::T2:
    case Theorem::T4_printed:
    case Theorem::T4_proof_form:
    case Theorem::T2_9:
    case Theorem::T2_10:
    case Theorem::T5_2:
    case Theorem::T5_3:
      return true;
    default:
      return false;
  }
}

inline bool is_lattice_theorem(Theorem t) {
  return t == Theorem::T5_2 || t == Theorem::T5_3 || t == Theorem::E5_11 || t == Theorem::Remark5_a ||
         t == Theorem::Remark5_b || t == Theorem::L5_1 || t == Theorem::AxisSplit;
}

// Smallest admissible p per theorem.
inline double min_p(Theorem t) {
  switch (t) {
    case Theorem::T2:
    case Theorem::T2_9:
      return 0.5;
    case Theorem::T4_printed:
    case Theorem::T4_proof_form:
    case Theorem::T2_10:
    case Theorem::T5_2:
    case Theorem::T5_3:
      return 1.0;
    default:
      return 0.0;
  }
}

struct TheoremId {
  Theorem theorem = Theorem::T1;
  double p = std::numeric_limits<double>::quiet_NaN();

  std::string label() const {
    std::string s = theorem_name(theorem);
    if (takes_p(theorem)) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "(p=%.17g)", p);
      s += buf;
    }
    return s;
  }

  void validate() const {
    if (!takes_p(theorem)) return;
    if (!std::isfinite(p)) throw InvalidParameters(std::string(theorem_name(theorem)) + " needs a value of p");
    if (p < min_p(theorem))
      throw InvalidParameters(std::string(theorem_name(theorem)) + " is stated for p >= " +
                              std::to_string(min_p(theorem)));
  }
};

enum class Verdict { holds, violated, inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::holds:
      return "holds";
    case Verdict::violated:
      return "violated";
    default:
      return "inconclusive";
  }
}

struct BoundReport {
  TheoremId id;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  double ratio = std::numeric_limits<double>::quiet_NaN();
  double tolerance = 0.0;
  Verdict verdict = Verdict::inconclusive;
};

// verdict = holds iff slack >= -tolerance; inconclusive when the eigenvalue
// input did not converge.
inline BoundReport make_report(TheoremId id, double lhs, double rhs, double propagated_error, bool converged) {
  BoundReport r;
  r.id = id;
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = rhs - lhs;
  r.ratio = rhs > 0.0 ? lhs / rhs : std::numeric_limits<double>::quiet_NaN();
  r.tolerance = 1e-9 * std::max(1.0, std::abs(rhs)) + propagated_error;
  if (!converged)
    r.verdict = Verdict::inconclusive;
  else
    r.verdict = r.slack >= -r.tolerance ? Verdict::holds : Verdict::violated;
  return r;
}

// sqrt(E^2 - 4), evaluated as sqrt((|E|-2)(|E|+2)).
inline double band_functional(double e) {
  const double x = std::abs(e);
  if (x < 2.0) throw DomainError("band functional needs |E| >= 2");
  return std::sqrt((x - 2.0) * (x + 2.0));
}

// |E - nearest edge|^p for E outside [-edge, edge].
inline double moment_functional(double e, double p, double edge = 2.0) {
  if (!(p >= 0.0)) throw InvalidParameters("moment functional needs p >= 0");
  const double x = std::abs(e);
  if (x < edge) throw DomainError("moment functional needs E outside the band");
  return std::pow(x - edge, p);
}

namespace detail {

// Sum of f over both eigenvalue lists plus a propagated error bound:
// f(|E| + err) - f(max(edge, |E| - err)) per eigenvalue, plus f(edge + margin)
// per eigenvalue flagged within the edge margin.
struct FunctionalSum {
  double value = 0.0;
  double error = 0.0;
};

template <class F>
FunctionalSum sum_functional(const EigenvalueReport& rep, F f, bool plus_only = false) {
  FunctionalSum out;
  const double edge = rep.band_half_width;
  auto add = [&](double e, double err) {
    const double x = std::abs(e);
    out.value += f(x);
    out.error += f(x + err) - f(std::max(edge, x - err));
  };
  for (std::size_t j = 0; j < rep.plus.size(); ++j)
    add(rep.plus[j], j < rep.plus_error.size() ? rep.plus_error[j] : 0.0);
  if (!plus_only)
    for (std::size_t j = 0; j < rep.minus.size(); ++j)
      add(rep.minus[j], j < rep.minus_error.size() ? rep.minus_error[j] : 0.0);
  out.error += static_cast<double>(rep.flagged_near_edge) * f(edge + rep.edge_margin);
  return out;
}

template <class F>
double sum_over_sites(const Perturbation& spec, F f) {
  double s = 0.0;
  for (const auto& [n, v] : spec.b_entries()) s += f(v);
  return s;
}

inline double sum_a_defect(const Perturbation& spec, double q) {
  double s = 0.0;
  for (const auto& [n, v] : spec.a_entries()) s += std::pow(std::abs(v - 1.0), q);
  return s;
}

// All sites where b or an adjacent bond is nontrivial.
inline std::vector<long> touched_sites(const Perturbation& spec) {
  std::vector<long> sites;
  for (const auto& [n, v] : spec.b_entries()) sites.push_back(n);
  for (const auto& [n, v] : spec.a_entries()) {
    sites.push_back(n);
    sites.push_back(n + 1);
  }
  std::sort(sites.begin(), sites.end());
  sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
  return sites;
}

inline void require_diagonal(const Perturbation& spec, Theorem t) {
  if (!spec.diagonal_only())
    throw InvalidParameters(std::string(theorem_name(t)) + " is stated for a_n = 1 (diagonal perturbations)");
}

}  // namespace detail

// Evaluates one inequality on a chain (half- or whole-line) perturbation,
// using the supplied eigenvalue report for the left-hand side.
inline BoundReport evaluate_bound(TheoremId id, const Perturbation& spec, const EigenvalueReport& report) {
  id.validate();
  if (is_lattice_theorem(id.theorem))
    throw InvalidParameters(std::string(theorem_name(id.theorem)) + " applies to lattice/block specs");
  const double p = id.p;
  auto sqrt_fn = [](double x) { return std::sqrt((x - 2.0) * (x + 2.0)); };
  auto moment_fn = [p](double x) { return std::pow(x - 2.0, p); };
  auto linear_fn = [](double x) { return x - 2.0; };
  const bool ok = report.converged;

  switch (id.theorem) {
    case Theorem::T1: {
      auto l = detail::sum_functional(report, sqrt_fn);
      const double rhs = detail::sum_over_sites(spec, [](double b) { return std::abs(b); }) +
                         4.0 * detail::sum_a_defect(spec, 1.0);
      return make_report(id, l.value, rhs, l.error, ok);
    }
    case Theorem::T2: {
      auto l = detail::sum_functional(report, moment_fn);
      const double q = p + 0.5;
      const double rhs = lt_constant_c(p) * (detail::sum_over_sites(spec, [q](double b) {
                                               return std::pow(std::abs(b), q);
                                             }) +
                                             4.0 * detail::sum_a_defect(spec, q));
      return make_report(id, l.value, rhs, l.error, ok);
    }
    case Theorem::E16a: {
      auto l = detail::sum_functional(report, linear_fn);
      const double rhs = detail::sum_over_sites(spec, [](double b) { return std::abs(b); }) +
                         4.0 * detail::sum_a_defect(spec, 1.0);
      return make_report(id, l.value, rhs, l.error, ok);
    }
    case Theorem::T4_printed: {
      // b_n^{+-} read as the positive/negative parts of b_n.
      auto l = detail::sum_functional(report, moment_fn);
      double rhs = 0.0;
      for (long n : detail::touched_sites(spec)) {
        const double defect = 2.0 * std::abs(spec.a(n) - 1.0);
        const double bp = positive_part(spec.b(n)) + defect;
        const double bm = negative_part(spec.b(n)) + defect;
        rhs += std::pow(bp, p) + std::pow(bm, p);
      }
      return make_report(id, l.value, rhs, l.error, ok);
    }
    case Theorem::T4_proof_form: {
      // Moment bound for a = 1 applied to the bracketing diagonal operators.
      auto l = detail::sum_functional(report, moment_fn);
      const Perturbation up = sandwich_transform(spec, Sign::plus);
      const Perturbation down = sandwich_transform(spec, Sign::minus);
      const double rhs = detail::sum_over_sites(up, [p](double b) { return std::pow(positive_part(b), p); }) +
                         detail::sum_over_sites(down, [p](double b) { return std::pow(negative_part(b), p); });
      return make_report(id, l.value, rhs, l.error, ok);
    }
    case Theorem::T2_8: {
      detail::require_diagonal(spec, id.theorem);
      auto l = detail::sum_functional(report, sqrt_fn, true);
      const double rhs = detail::sum_over_sites(spec, [](double b) { return positive_part(b); });
      return make_report(id, l.value, rhs, l.error, ok);
    }
    case Theorem::T2_9: {
      detail::require_diagonal(spec, id.theorem);
      auto l = detail::sum_functional(report, moment_fn, true);
      const double q = p + 0.5;
      const double rhs =
          lt_constant_d(p) * detail::sum_over_sites(spec, [q](double b) { return std::pow(positive_part(b), q); });
      return make_report(id, l.value, rhs, l.error, ok);
    }
    case Theorem::T2_10: {
      detail::require_diagonal(spec, id.theorem);
      auto l = detail::sum_functional(report, moment_fn, true);
      const double rhs = detail::sum_over_sites(spec, [p](double b) { return std::pow(positive_part(b), p); });
      return make_report(id, l.value, rhs, l.error, ok);
    }
    case Theorem::Bargmann: {
      if (spec.kind() != LineKind::half_line)
        throw InvalidParameters("the Bargmann bound is stated for half-line Jacobi matrices");
      const double lhs = static_cast<double>(report.count());
      double rhs = 0.0;
      for (const auto& [n, b] : spec.b_entries()) rhs += static_cast<double>(n) * std::abs(b);
      for (const auto& [n, a] : spec.a_entries()) rhs += (4.0 * static_cast<double>(n) + 2.0) * positive_part(a - 1.0);
      return make_report(id, lhs, rhs, static_cast<double>(report.flagged_near_edge), ok);
    }
    default:
      break;
  }
  throw InvalidParameters("unsupported theorem id");
}

// Computes the spectrum with `plan` and evaluates `id`. A NoConvergence is
// turned into an inconclusive verdict.
inline BoundReport verify_bound(TheoremId id, const Perturbation& spec, const TruncationPlan& plan = {}) {
  try {
    return evaluate_bound(id, spec, discrete_spectrum(spec, plan));
  } catch (const NoConvergence& e) {
    return evaluate_bound(id, spec, e.partial());
  }
}

// Relative deviation |E_n^{+-}(J_lambda)/lambda - btilde_n^{+-}| / |btilde_n^{+-}|
// for b = lambda * b0 (a unchanged), where btilde^{+-} is the signed,
// magnitude-sorted list of b0 values.
inline double large_coupling_check(const Perturbation& b0, double lambda, std::size_t n, Sign sign,
                                   const TruncationPlan& plan = {}) {
  if (!(lambda > 0.0)) throw InvalidParameters("coupling lambda must be positive");
  if (n < 1) throw InvalidParameters("eigenvalue index is 1-based");
  std::vector<double> tilde;
  for (const auto& [site, v] : b0.b_entries())
    if ((sign == Sign::plus && v > 0) || (sign == Sign::minus && v < 0)) tilde.push_back(v);
  if (sign == Sign::plus)
    std::sort(tilde.begin(), tilde.end(), std::greater<>());
  else
    std::sort(tilde.begin(), tilde.end());
  if (n > tilde.size())
    throw InvalidParameters("index beyond the available reordered b entries");
  std::map<long, double> scaled;
  for (const auto& [site, v] : b0.b_entries()) scaled[site] = lambda * v;
  const Perturbation spec(b0.kind(), b0.a_entries(), scaled);
  const EigenvalueReport rep = discrete_spectrum(spec, plan);
  const auto& list = sign == Sign::plus ? rep.plus : rep.minus;
  if (n > list.size()) throw NoEigenvalues("fewer eigenvalues than requested at this coupling");
  const double target = tilde[n - 1];
  return std::abs(list[n - 1] / lambda - target) / std::abs(target);
}

}  // namespace jlt
