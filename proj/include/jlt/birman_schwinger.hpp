#pragma once

// Free resolvents, Birman-Schwinger kernels, and the structural checks built
// on them: the fixed-point identity, monotonicity of partial sums S_n^+(L_mu),
// resolvent domination for a_n <= 1, and the Bargmann counting chain.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "jlt/core.hpp"
#include "jlt/eigensolve.hpp"
#include "jlt/operator_model.hpp"

namespace jlt {

// beta = mu + 1/mu with mu in (0,1); w = 1/mu - mu = sqrt(beta^2 - 4).
// theta = -log(mu) = acosh(beta/2) is kept for stable powers of mu.
struct BandParameter {
  double beta;
  double mu;
  double w;
  double theta;

  static BandParameter from_beta(double beta) {
    if (!(beta > 2.0) || !std::isfinite(beta)) throw DomainError("band parameter needs beta > 2");
    const double t = 0.5 * (beta - 2.0);
    const double theta = std::log1p(t + std::sqrt(t * (t + 2.0)));
    const double w = std::sqrt((beta - 2.0) * (beta + 2.0));
    return {beta, std::exp(-theta), w, theta};
  }

  static BandParameter from_mu(double mu) {
    if (!(mu > 0.0) || !(mu < 1.0)) throw DomainError("band parameter needs mu in (0,1)");
    return {mu + 1.0 / mu, mu, 1.0 / mu - mu, -std::log(mu)};
  }
};

enum class Line { whole, half };

// Matrix element of (beta - J_0)^{-1}.
// whole line: mu^{|n-m|} / w; half line: (mu^{-min} - mu^{min}) mu^{max} / w,
// evaluated as mu^{max-min+1} (1 - mu^{2 min}) / (1 - mu^2).
inline double free_resolvent_entry(Line line, double beta, long n, long m) {
  const BandParameter bp = BandParameter::from_beta(beta);
  if (line == Line::whole) {
    const double dist = static_cast<double>(std::abs(n - m));
    return std::exp(-bp.theta * dist) / (2.0 * std::sinh(bp.theta));
  }
  if (n < 1 || m < 1) throw DomainError("half-line resolvent needs sites >= 1");
  const long lo = std::min(n, m), hi = std::max(n, m);
  const double num = -std::expm1(-2.0 * bp.theta * static_cast<double>(lo));
  const double den = -std::expm1(-2.0 * bp.theta);
  return std::exp(-bp.theta * static_cast<double>(hi - lo + 1)) * num / den;
}

// beta -> 2 limit of the half-line resolvent: min(n, m).
inline double half_line_resolvent_at_edge(long n, long m) {
  if (n < 1 || m < 1) throw DomainError("half-line resolvent needs sites >= 1");
  return static_cast<double>(std::min(n, m));
}

enum class KernelKind { L_mu, L_general, K_beta, K2_bargmann };

struct BSKernel {
  KernelKind kind;
  std::vector<long> sites;  // support of b, ascending
  Eigen::MatrixXd matrix;
  double parameter = 0.0;  // mu for L_mu, beta for K_beta
};

namespace detail {

inline void check_nonnegative(const std::map<long, double>& b) {
  for (const auto& [n, v] : b)
    if (v < 0.0 || !std::isfinite(v))
      throw InvalidParameters("Birman-Schwinger kernels need b >= 0 (site " + std::to_string(n) + ")");
}

inline std::vector<long> kernel_sites(const std::map<long, double>& b) {
  std::vector<long> s;
  for (const auto& [n, v] : b)
    if (v > 0.0) s.push_back(n);
  return s;
}

template <class Entry>
BSKernel assemble(KernelKind kind, const std::map<long, double>& b, double parameter, Entry entry) {
  check_nonnegative(b);
  BSKernel k{kind, kernel_sites(b), {}, parameter};
  const auto n = static_cast<Eigen::Index>(k.sites.size());
  k.matrix.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) {
      const long si = k.sites[i], sj = k.sites[j];
      // diagonal without the square roots, so Tr K2 = sum n b_n is exact
      const double v = i == j ? b.at(si) * entry(si, si) : std::sqrt(b.at(si)) * entry(si, sj) * std::sqrt(b.at(sj));
      k.matrix(i, j) = k.matrix(j, i) = v;
    }
  return k;
}

}  // namespace detail

// (L_mu)_{nm} = b_n^{1/2} mu^{|n-m|} b_m^{1/2}, mu in (0, 1].
inline BSKernel build_L_mu(const std::map<long, double>& b, double mu) {
  if (!(mu > 0.0) || !(mu <= 1.0)) throw InvalidParameters("L_mu needs mu in (0,1]");
  return detail::assemble(KernelKind::L_mu, b, mu, [mu](long n, long m) {
    return std::pow(mu, static_cast<double>(std::abs(n - m)));
  });
}

// (L_{mu_n})_{kl} = b_k^{1/2} b_l^{1/2} prod_{j=k}^{l-1} mu_j for k <= l;
// bonds absent from `mus` use `default_mu`.
inline BSKernel build_L_general(const std::map<long, double>& b, const std::map<long, double>& mus,
                                double default_mu) {
  for (const auto& [j, m] : mus)
    if (!(m >= 0.0)) throw InvalidParameters("L_general needs mu_j >= 0");
  if (!(default_mu >= 0.0)) throw InvalidParameters("L_general needs mu >= 0");
  auto mu_at = [&](long j) {
    auto it = mus.find(j);
    return it == mus.end() ? default_mu : it->second;
  };
  return detail::assemble(KernelKind::L_general, b, default_mu, [&](long n, long m) {
    double prod = 1.0;
    for (long j = std::min(n, m); j < std::max(n, m); ++j) prod *= mu_at(j);
    return prod;
  });
}

// K_beta = B^{1/2} (beta - W_0)^{-1} B^{1/2} = (beta^2 - 4)^{-1/2} L_mu(beta).
inline BSKernel build_K_beta(const std::map<long, double>& b, double beta, Line line = Line::whole) {
  BandParameter::from_beta(beta);
  return detail::assemble(KernelKind::K_beta, b, beta,
                          [&](long n, long m) { return free_resolvent_entry(line, beta, n, m); });
}

// Half-line kernel at beta = 2: min(n,m) b_n^{1/2} b_m^{1/2}; trace = sum n b_n.
inline BSKernel build_K2_bargmann(const std::map<long, double>& b) {
  for (const auto& [n, v] : b)
    if (n < 1) throw InvalidParameters("K2 kernel is defined on the half-line (sites >= 1)");
  return detail::assemble(KernelKind::K2_bargmann, b, 2.0, half_line_resolvent_at_edge);
}

// Dispatch over the single-parameter kernels (L_general takes a sequence and
// has its own builder).
inline BSKernel build_bs_kernel(KernelKind kind, const std::map<long, double>& b, double parameter) {
  switch (kind) {
    case KernelKind::L_mu:
      return build_L_mu(b, parameter);
    case KernelKind::K_beta:
      return build_K_beta(b, parameter);
    case KernelKind::K2_bargmann:
      return build_K2_bargmann(b);
    case KernelKind::L_general:
      return build_L_general(b, {}, parameter);
  }
  throw InvalidParameters("unknown kernel kind");
}

// S_n^{+-}(M): sum of the n largest (+) or smallest (-) eigenvalues.
inline double partial_sums_S(const Eigen::MatrixXd& m, long n, Sign sign) {
  if (n < 1 || n > m.rows()) throw InvalidParameters("partial sum index out of range");
  const Eigen::VectorXd ev = symmetric_eigenvalues(m);
  double s = 0.0;
  if (sign == Sign::plus)
    for (long j = 0; j < n; ++j) s += ev(ev.size() - 1 - j);
  else
    for (long j = 0; j < n; ++j) s += ev(j);
  return s;
}

// min over n and adjacent grid pairs mu < eta of S_n^+(L_eta) - S_n^+(L_mu).
inline double check_monotone_S(const std::map<long, double>& b, const std::vector<double>& mu_grid,
                               const std::vector<long>& n_values) {
  if (!std::is_sorted(mu_grid.begin(), mu_grid.end())) throw InvalidParameters("mu grid must be ascending");
  double worst = std::numeric_limits<double>::infinity();
  std::vector<Eigen::VectorXd> spectra;
  for (double mu : mu_grid) spectra.push_back(symmetric_eigenvalues(build_L_mu(b, mu).matrix));
  for (long n : n_values) {
    for (std::size_t g = 0; g + 1 < mu_grid.size(); ++g) {
      const auto& lo = spectra[g];
      const auto& hi = spectra[g + 1];
      if (n < 1 || n > lo.size()) continue;
      double s_lo = 0.0, s_hi = 0.0;
      for (long j = 0; j < n; ++j) {
        s_lo += lo(lo.size() - 1 - j);
        s_hi += hi(hi.size() - 1 - j);
      }
      worst = std::min(worst, s_hi - s_lo);
    }
  }
  return worst;
}

// For W = W_0 + lambda B with B = diag(b) >= 0: max_j |lambda E_j^+(K_{E_j}) - 1|,
// where E_j = E_j^+(W) and the j-th eigenvalue of the kernel is used.
inline double check_fixed_point(const Perturbation& spec, double lambda) {
  if (spec.kind() != LineKind::whole_line || !spec.diagonal_only())
    throw InvalidParameters("fixed-point check needs a whole-line diagonal perturbation");
  if (!(lambda > 0.0)) throw InvalidParameters("lambda must be positive");
  detail::check_nonnegative(spec.b_entries());
  std::map<long, double> scaled;
  for (const auto& [n, v] : spec.b_entries()) scaled[n] = lambda * v;
  TruncationPlan plan;
  plan.tolerance = 1e-11;
  const EigenvalueReport rep = discrete_spectrum(Perturbation(LineKind::whole_line, {}, scaled), plan);
  if (rep.plus.empty()) throw NoEigenvalues("no eigenvalue above the band");
  double worst = 0.0;
  for (std::size_t j = 0; j < rep.plus.size(); ++j) {
    const BSKernel k = build_K_beta(spec.b_entries(), rep.plus[j]);
    const Eigen::VectorXd ev = symmetric_eigenvalues(k.matrix);
    if (j >= static_cast<std::size_t>(ev.size())) throw NoEigenvalues("kernel has fewer eigenvalues than W");
    const double e_j = ev(ev.size() - 1 - static_cast<Eigen::Index>(j));
    worst = std::max(worst, std::abs(lambda * e_j - 1.0));
  }
  return worst;
}

// min over (n, m) in [1, observe] of (beta - J_0)^{-1}_{nm} - (beta - J_0({a}))^{-1}_{nm}
// on the half-line. The inverses are columns of a direct tridiagonal solve on
// a window long enough that the mu^dist tail is below 1e-12.
inline double resolvent_domination_check(const std::map<long, double>& a, double beta, long observe) {
  const BandParameter bp = BandParameter::from_beta(beta);
  for (const auto& [n, v] : a) {
    if (n < 1) throw InvalidParameters("half-line bonds start at 1");
    if (!(v > 0.0)) throw InvalidParameters("a_n must be positive");
    if (v > 1.0) throw InvalidParameters("resolvent domination is only claimed for a_n <= 1");
  }
  if (observe < 1) throw InvalidParameters("observation window must contain site 1");
  long last = observe;
  if (!a.empty()) last = std::max(last, a.rbegin()->first + 1);
  const long tail = static_cast<long>(std::ceil(std::log(1e14) / bp.theta)) + 8;
  const long size = last + tail;

  auto shifted = [&](const std::map<long, double>& bonds) {
    SymTridiag t;
    t.diag.assign(static_cast<std::size_t>(size), beta);
    t.off.assign(static_cast<std::size_t>(size - 1), -1.0);
    for (const auto& [n, v] : bonds)
      if (n < size) t.off[static_cast<std::size_t>(n - 1)] = -v;
    return t;
  };
  const SymTridiag free_op = shifted({});
  const SymTridiag pert_op = shifted(a);
  double worst = std::numeric_limits<double>::infinity();
  for (long n = 1; n <= observe; ++n) {
    std::vector<double> e(static_cast<std::size_t>(size), 0.0);
    e[static_cast<std::size_t>(n - 1)] = 1.0;
    const auto g0 = tridiagonal_solve(free_op, e);
    const auto ga = tridiagonal_solve(pert_op, e);
    for (long m = 1; m <= observe; ++m) {
      const auto idx = static_cast<std::size_t>(m - 1);
      worst = std::min(worst, g0[idx] - ga[idx]);
    }
  }
  return worst;
}

// Links of the counting chain for a half-line diagonal b >= 0 at beta > 2:
// #{E >= beta} = #{eig(K_beta) >= 1} <= Tr K_beta <= Tr K_2 = sum n b_n.
struct BargmannChain {
  long eigenvalues_above = 0;
  long kernel_eigenvalues_ge_one = 0;
  double trace_k_beta = 0.0;
  double trace_k2 = 0.0;
  double sum_n_b = 0.0;
};

inline BargmannChain bargmann_chain(const Perturbation& spec, double beta) {
  if (spec.kind() != LineKind::half_line || !spec.diagonal_only())
    throw InvalidParameters("the Bargmann chain needs a half-line diagonal perturbation");
  detail::check_nonnegative(spec.b_entries());
  BargmannChain c;
  const EigenvalueReport rep = discrete_spectrum(spec);
  for (double e : rep.plus)
    if (e >= beta) ++c.eigenvalues_above;
  const BSKernel kb = build_K_beta(spec.b_entries(), beta, Line::half);
  const Eigen::VectorXd ev = symmetric_eigenvalues(kb.matrix);
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) >= 1.0) ++c.kernel_eigenvalues_ge_one;
  c.trace_k_beta = kb.matrix.trace();
  c.trace_k2 = build_K2_bargmann(spec.b_entries()).matrix.trace();
  for (const auto& [n, v] : spec.b_entries()) c.sum_n_b += static_cast<double>(n) * v;
  return c;
}

}  // namespace jlt
