#pragma once

// Eigenvalues of symmetric tridiagonal truncations by Sturm-sequence
// bisection, the discrete-spectrum convergence loop, and an independent
// cyclic-Jacobi dense oracle.

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "jlt/core.hpp"
#include "jlt/operator_model.hpp"

namespace jlt {

// Number of eigenvalues of T strictly below x. The LDL^T pivots are clamped
// away from zero (LAPACK dstebz style) so the recurrence cannot overflow.
class SturmCounter {
 public:
  explicit SturmCounter(const SymTridiag& t) : diag_(t.diag), off2_(t.off.size()) {
    double max_off2 = 1.0;
    for (std::size_t i = 0; i < t.off.size(); ++i) {
      off2_[i] = t.off[i] * t.off[i];
      max_off2 = std::max(max_off2, off2_[i]);
    }
    pivmin_ = DBL_MIN * max_off2;
  }

  long count_below(double x) const {
    long count = 0;
    double q = 1.0;
    for (std::size_t i = 0; i < diag_.size(); ++i) {
      q = (diag_[i] - x) - (i == 0 ? 0.0 : off2_[i - 1] / q);
      if (std::abs(q) < pivmin_) q = pivmin_;
      if (q < 0.0) ++count;
    }
    return count;
  }

  long size() const { return static_cast<long>(diag_.size()); }

 private:
  std::span<const double> diag_;
  std::vector<double> off2_;
  double pivmin_;
};

inline long count_below(const SymTridiag& t, double x) { return SturmCounter(t).count_below(x); }

// Gershgorin enclosure of the spectrum.
inline std::pair<double, double> gershgorin(const SymTridiag& t) {
  double lo = 0.0, hi = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(t.off[i - 1]);
    if (i + 1 < t.size()) r += std::abs(t.off[i]);
    if (i == 0) {
      lo = t.diag[i] - r;
      hi = t.diag[i] + r;
    } else {
      lo = std::min(lo, t.diag[i] - r);
      hi = std::max(hi, t.diag[i] + r);
    }
  }
  return {lo, hi};
}

inline double norm_bound(const SymTridiag& t) {
  auto [lo, hi] = gershgorin(t);
  return std::max(std::abs(lo), std::abs(hi));
}

// All eigenvalues in [lo, hi), ascending, refined by multisection until each
// bracket is narrower than tol. Multiplicities come from inertia differences.
inline std::vector<double> eigenvalues_in(const SturmCounter& sturm, double lo, double hi, double tol) {
  std::vector<double> out;
  if (!(hi > lo)) return out;
  struct Bracket {
    double lo, hi;
    long n_lo, n_hi;
  };
  std::vector<Bracket> stack;
  stack.push_back({lo, hi, sturm.count_below(lo), sturm.count_below(hi)});
  // Depth-first, upper half pushed first so the lower half is emitted first.
  while (!stack.empty()) {
    Bracket b = stack.back();
    stack.pop_back();
    const long k = b.n_hi - b.n_lo;
    if (k <= 0) continue;
    if (b.hi - b.lo <= tol) {
      out.insert(out.end(), static_cast<std::size_t>(k), 0.5 * (b.lo + b.hi));
      continue;
    }
    const double mid = 0.5 * (b.lo + b.hi);
    if (mid <= b.lo || mid >= b.hi) {
      out.insert(out.end(), static_cast<std::size_t>(k), mid);
      continue;
    }
    const long n_mid = sturm.count_below(mid);
    stack.push_back({mid, b.hi, n_mid, b.n_hi});
    stack.push_back({b.lo, mid, b.n_lo, n_mid});
  }
  return out;
}

inline double bisection_tolerance(const SymTridiag& t) { return 1e-12 * std::max(1.0, norm_bound(t)); }

// Eigenvalues outside the band by more than the edge margin. `plus` is
// descending, `minus` ascending; `flagged` counts eigenvalues within the
// margin outside the band edge.
struct BandSplit {
  std::vector<double> plus;
  std::vector<double> minus;
  long flagged = 0;
};

inline BandSplit eigs_outside_band(const SturmCounter& sturm, std::pair<double, double> enclosure, double tol,
                                   const Band& band) {
  band.validate();
  const double c = band.half_width;
  const double inner = c + band.edge_margin;
  BandSplit out;
  // Widen the enclosure by tol so the extreme eigenvalues are strictly inside.
  const double top = enclosure.second + 2.0 * tol + DBL_EPSILON * std::abs(enclosure.second);
  const double bottom = enclosure.first - 2.0 * tol - DBL_EPSILON * std::abs(enclosure.first);
  if (top > inner) {
    out.plus = eigenvalues_in(sturm, inner, top, tol);
    std::reverse(out.plus.begin(), out.plus.end());
  }
  if (bottom < -inner) out.minus = eigenvalues_in(sturm, bottom, -inner, tol);
  // Eigenvalues in (c, c + margin] and [-c - margin, -c).
  const long n = sturm.size();
  const long above_c = n - sturm.count_below(std::nextafter(c, DBL_MAX));
  const long above_inner = n - sturm.count_below(std::nextafter(inner, DBL_MAX));
  const long below_c = sturm.count_below(-c);
  const long below_inner = sturm.count_below(-inner);
  out.flagged = (above_c - above_inner) + (below_c - below_inner);
  return out;
}

inline BandSplit eigs_outside_band(const SymTridiag& t, const Band& band) {
  return eigs_outside_band(SturmCounter(t), gershgorin(t), bisection_tolerance(t), band);
}

// ---------------------------------------------------------------------------
// Discrete spectrum of a perturbation with window growth
// ---------------------------------------------------------------------------

struct EigenvalueReport {
  std::vector<double> plus;   // E_1^+ > E_2^+ > ... > edge
  std::vector<double> minus;  // E_1^- < E_2^- < ... < -edge
  std::vector<double> plus_error;
  std::vector<double> minus_error;
  SiteRange window;
  bool converged = false;
  bool monotone = true;  // truncated E^+ nondecreasing, E^- nonincreasing across rounds
  long flagged_near_edge = 0;
  double edge_margin = 1e-8;
  double band_half_width = 2.0;
  int rounds = 0;

  std::size_t count() const { return plus.size() + minus.size(); }
};

class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, EigenvalueReport partial)
      : Error(what), partial_(std::move(partial)) {}
  const EigenvalueReport& partial() const { return partial_; }

 private:
  EigenvalueReport partial_;
};

namespace detail {

inline SiteRange padded_window(const Perturbation& spec, const SiteRange& support, long pad) {
  if (spec.kind() == LineKind::half_line) return {1, support.hi + pad};
  return {support.lo - pad, support.hi + pad};
}

inline double max_increment(const std::vector<double>& prev, const std::vector<double>& cur) {
  double m = 0.0;
  for (std::size_t j = 0; j < cur.size(); ++j) m = std::max(m, std::abs(cur[j] - prev[j]));
  return m;
}

}  // namespace detail

// Padding beyond which an eigenvalue lying edge_margin outside the band is
// resolved by the hard-cutoff truncation (decay rate ~ sqrt(edge_margin)).
inline long guard_padding(const Band& band) {
  return static_cast<long>(std::ceil(4.0 / std::sqrt(band.edge_margin)));
}

// Grows the truncation window until the eigenvalue list is stable: two
// consecutive rounds with the same counts (matching the count on a guard
// window) and increments below plan.tolerance. Throws NoConvergence when the
// window exceeds plan.max_window first.
inline EigenvalueReport discrete_spectrum(const Perturbation& spec, const TruncationPlan& plan = {},
                                          const Band& band = Band::chain()) {
  plan.validate();
  band.validate();
  EigenvalueReport report;
  report.edge_margin = band.edge_margin;
  report.band_half_width = band.half_width;

  const auto support = spec.support();
  if (!support) {
    report.window = detail::padded_window(spec, SiteRange{1, 1}, plan.initial_padding);
    report.converged = true;
    return report;
  }

  // Target counts from a large guard window (counts are monotone in the window).
  const long guard = std::min(guard_padding(band), (plan.max_window - support->size()) / 2);
  std::size_t target_plus = 0, target_minus = 0;
  if (guard > plan.initial_padding) {
    const auto t = build_truncated_matrix(spec, detail::padded_window(spec, *support, guard));
    SturmCounter sturm(t.matrix);
    const long n = sturm.size();
    const double inner = band.half_width + band.edge_margin;
    target_plus = static_cast<std::size_t>(n - sturm.count_below(std::nextafter(inner, DBL_MAX)));
    target_minus = static_cast<std::size_t>(sturm.count_below(-inner));
  }

  std::vector<double> prev_plus, prev_minus;
  bool have_prev = false;
  double pad_real = static_cast<double>(plan.initial_padding);
  for (;;) {
    const long pad = static_cast<long>(std::llround(pad_real));
    const SiteRange window = detail::padded_window(spec, *support, pad);
    if (window.size() > plan.max_window) {
      throw NoConvergence("eigenvalues did not converge within the maximal window (eigenvalue too close to "
                          "the band edge?)",
                          report);
    }
    const auto t = build_truncated_matrix(spec, window);
    SturmCounter sturm(t.matrix);
    const double inner = band.half_width + band.edge_margin;
    const long n = sturm.size();
    const auto n_plus = static_cast<std::size_t>(n - sturm.count_below(std::nextafter(inner, DBL_MAX)));
    const auto n_minus = static_cast<std::size_t>(sturm.count_below(-inner));
    target_plus = std::max(target_plus, n_plus);
    target_minus = std::max(target_minus, n_minus);
    ++report.rounds;
    report.window = window;

    if (n_plus == target_plus && n_minus == target_minus) {
      const double tol = bisection_tolerance(t.matrix);
      BandSplit split = eigs_outside_band(sturm, gershgorin(t.matrix), tol, band);
      report.flagged_near_edge = split.flagged;
      if (have_prev && prev_plus.size() == split.plus.size() && prev_minus.size() == split.minus.size()) {
        for (std::size_t j = 0; j < split.plus.size(); ++j)
          if (split.plus[j] < prev_plus[j] - 2.0 * tol) report.monotone = false;
        for (std::size_t j = 0; j < split.minus.size(); ++j)
          if (split.minus[j] > prev_minus[j] + 2.0 * tol) report.monotone = false;
        const double inc = std::max(detail::max_increment(prev_plus, split.plus),
                                    detail::max_increment(prev_minus, split.minus));
        if (inc < plan.tolerance) {
          report.plus = std::move(split.plus);
          report.minus = std::move(split.minus);
          report.plus_error.resize(report.plus.size());
          report.minus_error.resize(report.minus.size());
          for (std::size_t j = 0; j < report.plus.size(); ++j)
            report.plus_error[j] = std::abs(report.plus[j] - prev_plus[j]) + tol;
          for (std::size_t j = 0; j < report.minus.size(); ++j)
            report.minus_error[j] = std::abs(report.minus[j] - prev_minus[j]) + tol;
          report.converged = true;
          return report;
        }
      }
      prev_plus = std::move(split.plus);
      prev_minus = std::move(split.minus);
      have_prev = true;
      report.plus = prev_plus;
      report.minus = prev_minus;
    } else {
      have_prev = false;
    }
    pad_real *= plan.growth;
  }
}

// ---------------------------------------------------------------------------
// Dense symmetric eigenvalues
// ---------------------------------------------------------------------------

inline constexpr long kDenseDimensionCap = 4000;

// Cyclic Jacobi rotations. Independent of the bisection path; used as the
// verification oracle. Returns the full spectrum ascending.
inline std::vector<double> dense_eigs_oracle(const Eigen::MatrixXd& m, long cap = kDenseDimensionCap) {
  if (m.rows() != m.cols()) throw InvalidParameters("oracle needs a square matrix");
  if (m.rows() > cap) throw DimensionCapExceeded("matrix dimension exceeds the dense oracle cap");
  const Eigen::Index n = m.rows();
  Eigen::MatrixXd a = 0.5 * (m + m.transpose());
  const double scale = std::max(a.cwiseAbs().maxCoeff(), DBL_MIN);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(off) <= 1e-15 * scale) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= DBL_MIN) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
      }
    }
  }
  std::vector<double> eig(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) eig[i] = a(i, i);
  std::sort(eig.begin(), eig.end());
  return eig;
}

// Production dense path (Householder + QR via Eigen), ascending.
inline Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& m, long cap = kDenseDimensionCap) {
  if (m.rows() > cap) throw DimensionCapExceeded("matrix dimension exceeds the dense cap");
  if (m.rows() == 0) return {};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

// Bisection eigenvalues of the whole tridiagonal matrix, ascending.
inline std::vector<double> tridiagonal_eigenvalues(const SymTridiag& t) {
  auto [lo, hi] = gershgorin(t);
  const double tol = bisection_tolerance(t);
  return eigenvalues_in(SturmCounter(t), lo - 2.0 * tol, hi + 2.0 * tol, tol);
}

// Solves T x = rhs for symmetric tridiagonal T (Thomas algorithm, no pivoting;
// intended for diagonally dominant systems such as beta - J with beta > ||J||).
inline std::vector<double> tridiagonal_solve(const SymTridiag& t, std::vector<double> rhs) {
  const std::size_t n = t.size();
  std::vector<double> c(n, 0.0);
  double denom = t.diag[0];
  if (denom == 0.0) throw DomainError("singular tridiagonal system");
  c[0] = n > 1 ? t.off[0] / denom : 0.0;
  rhs[0] /= denom;
  for (std::size_t i = 1; i < n; ++i) {
    denom = t.diag[i] - t.off[i - 1] * c[i - 1];
    if (denom == 0.0) throw DomainError("singular tridiagonal system");
    c[i] = i + 1 < n ? t.off[i] / denom : 0.0;
    rhs[i] = (rhs[i] - t.off[i - 1] * rhs[i - 1]) / denom;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
  return rhs;
}

}  // namespace jlt
