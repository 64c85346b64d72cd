#pragma once

// Bounds on Z^nu boxes (dense solves), the block chain check with a
// finite-dimensional fiber, and the dimensional-splitting inequality.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "jlt/bounds.hpp"
#include "jlt/constants.hpp"
#include "jlt/core.hpp"
#include "jlt/eigensolve.hpp"
#include "jlt/ensembles.hpp"
#include "jlt/operator_model.hpp"

namespace jlt {

inline constexpr long kStripSiteCap = 1500;

// (X)_+ and (X)_- by full diagonalization.
inline Eigen::MatrixXd matrix_positive_part(const Eigen::MatrixXd& x) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x);
  const Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

inline Eigen::MatrixXd matrix_negative_part(const Eigen::MatrixXd& x) { return matrix_positive_part(-x); }

// Tr (X_+)^q for a symmetric block.
inline double trace_positive_power(const Eigen::MatrixXd& x, double q) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) s += std::pow(positive_part(es.eigenvalues()[i]), q);
  return s;
}

inline double trace_abs_power(const Eigen::MatrixXd& x, double q) {
  return trace_positive_power(x, q) + trace_positive_power(-x, q);
}

// ---------------------------------------------------------------------------
// Spectrum of H_0(a_b) + V on the box
// ---------------------------------------------------------------------------

struct LatticeSpectrum {
  std::vector<double> plus;   // descending, above 2 nu
  std::vector<double> minus;  // ascending, below -2 nu
  double error = 0.0;         // per-eigenvalue bound from the dense solve
  double edge = 0.0;
  double margin = 0.0;
  long flagged = 0;           // within margin of +-edge
};

inline LatticeSpectrum split_outside(const Eigen::VectorXd& eig, double edge, double margin, double err) {
  LatticeSpectrum out;
  out.edge = edge;
  out.margin = margin;
  out.error = err;
  for (Eigen::Index i = 0; i < eig.size(); ++i) {
    const double e = eig[i];
    if (e > edge + margin)
      out.plus.push_back(e);
    else if (e < -edge - margin)
      out.minus.push_back(e);
    else if (std::abs(e) > edge - margin)
      ++out.flagged;
  }
  std::sort(out.plus.begin(), out.plus.end(), std::greater<>());
  return out;
}

inline double dense_error_estimate(const Eigen::MatrixXd& m) {
  const double norm = m.cwiseAbs().rowwise().sum().maxCoeff();
  return 1e-12 * std::max(1.0, norm);
}

inline LatticeSpectrum lattice_spectrum(const LatticeSpec& spec) {
  const Eigen::MatrixXd h = Eigen::MatrixXd(build_lattice_matrix(spec));
  const Band band = Band::lattice(spec.nu());
  return split_outside(symmetric_eigenvalues(h), band.half_width, band.edge_margin, dense_error_estimate(h));
}

namespace detail {

// Sum f(|E| - edge) over both lists with error f(x+err) - f(max(0, x-err)),
// plus f(margin + err) per flagged eigenvalue.
template <class F>
FunctionalSum sum_lattice(const LatticeSpectrum& s, F f, Sign sign) {
  FunctionalSum out;
  const auto& list = sign == Sign::plus ? s.plus : s.minus;
  for (double e : list) {
    const double x = std::abs(e) - s.edge;
    out.value += f(x);
    out.error += f(x + s.error) - f(std::max(0.0, x - s.error));
  }
  return out;
}

template <class F>
FunctionalSum sum_lattice(const LatticeSpectrum& s, F f) {
  FunctionalSum a = sum_lattice(s, f, Sign::plus);
  const FunctionalSum b = sum_lattice(s, f, Sign::minus);
  a.value += b.value;
  a.error += b.error + static_cast<double>(s.flagged) * f(s.margin + s.error);
  return a;
}

// Sites carrying potential or touching a modified bond.
inline std::vector<Site> lattice_touched_sites(const LatticeSpec& spec) {
  std::vector<Site> sites;
  for (const auto& [x, _] : spec.potential()) sites.push_back(x);
  for (const auto& [b, _] : spec.bonds()) {
    sites.push_back(b.first);
    sites.push_back(b.second);
  }
  std::sort(sites.begin(), sites.end());
  sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
  return sites;
}

inline Eigen::MatrixXd potential_block(const LatticeSpec& spec, const Site& x) {
  auto it = spec.potential().find(x);
  if (it != spec.potential().end()) return it->second;
  return Eigen::MatrixXd::Zero(spec.fiber_dim(), spec.fiber_dim());
}

// Sum_x Tr (V^+(x))_+^q + Tr (V^-(x))_-^q with V^+- = V +- (bond defect) I.
// Without modified bonds this is Sum_x Tr |V(x)|^q.
inline double sandwich_potential_sum(const LatticeSpec& spec, double q) {
  double s = 0.0;
  const auto id = Eigen::MatrixXd::Identity(spec.fiber_dim(), spec.fiber_dim());
  for (const Site& x : lattice_touched_sites(spec)) {
    const Eigen::MatrixXd v = potential_block(spec, x);
    const double defect = spec.bond_defect_at(x);
    s += trace_positive_power(v + defect * id, q);
    s += trace_positive_power(-(v - defect * id), q);
  }
  return s;
}

}  // namespace detail

inline double strip_inequality_check(const LatticeSpec& spec, int axis = 1);

// Reports for the requested lattice ids; one dense solve shared by all of them.
inline std::vector<BoundReport> lattice_bounds_check(const LatticeSpec& spec, const std::vector<TheoremId>& ids) {
  for (const auto& id : ids) {
    if (!is_lattice_theorem(id.theorem) || id.theorem == Theorem::L5_1)
      throw InvalidParameters(std::string(theorem_name(id.theorem)) + " is not a lattice bound");
    id.validate();
  }
  const LatticeSpectrum s = lattice_spectrum(spec);
  const bool buffered = spec.support_buffer() >= spec.required_buffer();
  const int nu = spec.nu();
  const double d = static_cast<double>(spec.fiber_dim());
  std::vector<BoundReport> out;
  for (const auto& id : ids) {
    double rhs = 0.0;
    detail::FunctionalSum lhs;
    switch (id.theorem) {
      case Theorem::T5_2: {
        const double p = id.p;
        lhs = detail::sum_lattice(s, [p](double x) { return std::pow(x, p); });
        rhs = detail::sandwich_potential_sum(spec, p);
        break;
      }
      case Theorem::T5_3: {
        const double p = id.p;
        lhs = detail::sum_lattice(s, [p](double x) { return std::pow(x, p); });
        rhs = std::pow(2.0, nu) * classical_constant(p, nu) * detail::sandwich_potential_sum(spec, p + 0.5 * nu);
        break;
      }
      case Theorem::E5_11: {
        lhs = detail::sum_lattice(s, [](double x) { return x; });
        for (const auto& [x, v] : spec.potential()) rhs += trace_abs_power(v, 1.0);
        for (const auto& [b, w] : spec.bonds()) rhs += 4.0 * d * std::abs(w - 1.0);
        break;
      }
      case Theorem::Remark5_a:
      case Theorem::Remark5_b: {
        // sqrt((|E| - 2(nu-1))^2 - 4) with x = |E| - 2 nu.
        lhs = detail::sum_lattice(s, [](double x) { return std::sqrt(x * (x + 4.0)); });
        if (id.theorem == Theorem::Remark5_a)
          rhs = detail::sandwich_potential_sum(spec, 1.0);
        else
          rhs = std::pow(2.0, nu - 1) * classical_constant(1.0, nu - 1) *
                detail::sandwich_potential_sum(spec, 1.0 + 0.5 * (nu - 1));
        break;
      }
      case Theorem::AxisSplit:
        // slack = smallest eigenvalue of RHS - LHS; no truncation error enters
        out.push_back(make_report(id, 0.0, strip_inequality_check(spec, 1), 0.0, true));
        continue;
      default:
        break;
    }
    out.push_back(make_report(id, lhs.value, rhs, lhs.error, buffered));
  }
  return out;
}

// Seeded nu-dimensional sample: random V on a support cube and random weights
// on bonds inside it, on a box of `box_size` sites per axis centred at 0.
struct LatticeEnsembleConfig {
  std::uint64_t seed = 5;
  int nu = 2;
  long box_size = 30;
  long support_size = 6;
  double v_max = 3.0;  // V uniform in [-v_max, v_max]
  double a_min = 0.2;
  double a_max = 3.0;
  double bond_fraction = 0.3;  // chance that a bond inside the support is modified
};

inline LatticeSpec random_lattice_sample(const LatticeEnsembleConfig& cfg, std::uint64_t k) {
  if (cfg.box_size < 1 || cfg.support_size < 1 || cfg.support_size > cfg.box_size)
    throw InvalidParameters("lattice sample needs 1 <= support size <= box size");
  const long lo = -cfg.box_size / 2;
  std::vector<SiteRange> box(static_cast<std::size_t>(cfg.nu), SiteRange{lo, lo + cfg.box_size - 1});
  LatticeSpec spec(cfg.nu, box);
  SampleRng rng(cfg.seed, k);
  const long s_lo = -cfg.support_size / 2;
  const std::vector<SiteRange> supp(static_cast<std::size_t>(cfg.nu), SiteRange{s_lo, s_lo + cfg.support_size - 1});
  LatticeSpec cube(cfg.nu, supp);
  for (long i = 0; i < cube.num_sites(); ++i) {
    const Site x = cube.site_at(i);
    spec.set_potential(x, rng.uniform(-cfg.v_max, cfg.v_max));
    for (int axis = 0; axis < cfg.nu; ++axis) {
      Site y = x;
      ++y[axis];
      if (!cube.contains(y)) continue;
      if (rng.uniform() < cfg.bond_fraction) spec.set_bond(x, y, rng.uniform(cfg.a_min, cfg.a_max));
    }
  }
  return spec;
}

// min over both sides of the bracketing H_0 + V^- <= H_0(a_b) + V <= H_0 + V^+:
// smallest eigenvalue of the two differences.
inline double lattice_sandwich_gap(const LatticeSpec& spec) {
  if (spec.dimension() > kDenseDimensionCap) throw DimensionCapExceeded("lattice box exceeds the dense cap");
  const Eigen::MatrixXd h = Eigen::MatrixXd(build_lattice_matrix(spec));
  const Eigen::MatrixXd free_hop = Eigen::MatrixXd(lattice_hopping(spec, all_axes(spec.nu()), true));
  auto defect = [&](const Site& x) { return spec.bond_defect_at(x); };
  const Eigen::MatrixXd vplus = Eigen::MatrixXd(lattice_potential(spec, defect));
  const Eigen::MatrixXd vminus =
      Eigen::MatrixXd(lattice_potential(spec, [&](const Site& x) { return -spec.bond_defect_at(x); }));
  const double lower = symmetric_eigenvalues(h - (free_hop + vminus))[0];
  const double upper = symmetric_eigenvalues((free_hop + vplus) - h)[0];
  return std::min(lower, upper);
}

// ---------------------------------------------------------------------------
// Dimensional splitting along one axis
// ---------------------------------------------------------------------------

struct StripMatrices {
  Eigen::MatrixXd lhs;  // (H_0 + V - 2 nu)_+
  Eigen::MatrixXd rhs;  // (H_axis + (H_rest + V - 2(nu-1))_+ - 2)_+
};

inline StripMatrices strip_matrices(const LatticeSpec& spec, int axis) {
  if (spec.nu() < 2) throw InvalidParameters("axis split needs nu >= 2");
  if (axis < 1 || axis > spec.nu()) throw InvalidParameters("split axis must be in 1..nu");
  if (spec.num_sites() > kStripSiteCap) throw DimensionCapExceeded("strip check is capped at 1500 sites");
  std::vector<int> rest;
  for (int k = 0; k < spec.nu(); ++k)
    if (k != axis - 1) rest.push_back(k);
  const Eigen::MatrixXd h_axis = Eigen::MatrixXd(lattice_hopping(spec, {axis - 1}));
  const Eigen::MatrixXd h_rest = Eigen::MatrixXd(lattice_hopping(spec, rest));
  const Eigen::MatrixXd v = Eigen::MatrixXd(lattice_potential(spec));
  const auto n = spec.dimension();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  const double nu = spec.nu();
  StripMatrices m;
  m.lhs = matrix_positive_part(h_axis + h_rest + v - 2.0 * nu * id);
  m.rhs = matrix_positive_part(h_axis + matrix_positive_part(h_rest + v - 2.0 * (nu - 1.0) * id) - 2.0 * id);
  return m;
}

// Smallest eigenvalue of RHS - LHS (operator ordering of the positive parts).
inline double strip_inequality_check(const LatticeSpec& spec, int axis) {
  const StripMatrices m = strip_matrices(spec, axis);
  return symmetric_eigenvalues(m.rhs - m.lhs)[0];
}

// min_k lambda_k(RHS) - lambda_k(LHS) over sorted eigenvalues; this ordering
// follows from H - 2 nu <= H_axis + (H_rest + V - 2(nu-1))_+ - 2 and gives the
// trace inequality used in the induction.
inline double strip_inequality_eigenwise(const LatticeSpec& spec, int axis = 1) {
  const StripMatrices m = strip_matrices(spec, axis);
  const Eigen::VectorXd l = symmetric_eigenvalues(m.lhs);
  const Eigen::VectorXd r = symmetric_eigenvalues(m.rhs);
  return (r - l).minCoeff();
}

// ---------------------------------------------------------------------------
// Chain with a d-dimensional fiber
// ---------------------------------------------------------------------------

class BlockJacobiSpec {
 public:
  explicit BlockJacobiSpec(int fiber_dim, long pad = 200) : d_(fiber_dim), pad_(pad) {
    if (d_ < 1) throw InvalidParameters("fiber dimension must be >= 1");
    if (pad_ < 5) throw InvalidParameters("block chain window needs a buffer of >= 5 sites");
  }

  void set_block(long n, const Eigen::MatrixXd& b) {
    if (b.rows() != d_ || b.cols() != d_) throw InvalidParameters("block has the wrong fiber dimension");
    if (!b.allFinite()) throw InvalidParameters("block entries must be finite");
    if ((b - b.transpose()).cwiseAbs().maxCoeff() > 1e-14 * (1.0 + b.cwiseAbs().maxCoeff()))
      throw InvalidParameters("blocks must be symmetric");
    if (b.isZero(0.0))
      blocks_.erase(n);
    else
      blocks_[n] = 0.5 * (b + b.transpose());
  }

  int fiber_dim() const { return d_; }
  long pad() const { return pad_; }
  const std::map<long, Eigen::MatrixXd>& blocks() const { return blocks_; }

  SiteRange window() const {
    if (blocks_.empty()) return {-pad_, pad_};
    return {blocks_.begin()->first - pad_, blocks_.rbegin()->first + pad_};
  }

  // Free chain tensor identity plus block diagonal, on the window.
  Eigen::MatrixXd dense() const {
    const SiteRange w = window();
    const long n = w.size() * d_;
    if (n > kDenseDimensionCap) throw DimensionCapExceeded("block chain exceeds the dense cap");
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (long i = 0; i + 1 < w.size(); ++i)
      for (int f = 0; f < d_; ++f) m(i * d_ + f, (i + 1) * d_ + f) = m((i + 1) * d_ + f, i * d_ + f) = 1.0;
    for (const auto& [site, b] : blocks_) {
      const long i = site - w.lo;
      m.block(i * d_, i * d_, d_, d_) += b;
    }
    return m;
  }

 private:
  int d_;
  long pad_;
  std::map<long, Eigen::MatrixXd> blocks_;
};

// Per-sign reports: sum sqrt(E^2-4) over E^+- vs Sum_n Tr B^+-(n).
inline std::pair<BoundReport, BoundReport> block_lemma51_by_sign(const BlockJacobiSpec& spec) {
  const Eigen::MatrixXd m = spec.dense();
  const Band band = Band::chain();
  const LatticeSpectrum s = split_outside(symmetric_eigenvalues(m), band.half_width, band.edge_margin,
                                          dense_error_estimate(m));
  auto f = [](double x) { return std::sqrt(x * (x + 4.0)); };
  double rhs_plus = 0.0, rhs_minus = 0.0;
  for (const auto& [n, b] : spec.blocks()) {
    rhs_plus += trace_positive_power(b, 1.0);
    rhs_minus += trace_positive_power(-b, 1.0);
  }
  const double flag_err = static_cast<double>(s.flagged) * f(s.margin + s.error);
  const auto lp = detail::sum_lattice(s, f, Sign::plus);
  const auto lm = detail::sum_lattice(s, f, Sign::minus);
  const TheoremId id{Theorem::L5_1};
  return {make_report(id, lp.value, rhs_plus, lp.error + flag_err, true),
          make_report(id, lm.value, rhs_minus, lm.error + flag_err, true)};
}

inline BoundReport block_lemma51_check(const BlockJacobiSpec& spec) {
  const auto [plus, minus] = block_lemma51_by_sign(spec);
  BoundReport r = make_report(plus.id, plus.lhs + minus.lhs, plus.rhs + minus.rhs,
                              plus.tolerance + minus.tolerance - 1e-9 * std::max(1.0, plus.rhs) -
                                  1e-9 * std::max(1.0, minus.rhs),
                              true);
  // The summed report holds only if both signs do.
  if (plus.verdict == Verdict::violated || minus.verdict == Verdict::violated) r.verdict = Verdict::violated;
  return r;
}

// Random symmetric blocks with entries in [-scale, scale] at `sites`.
inline BlockJacobiSpec random_block_sample(std::uint64_t seed, std::uint64_t k, int d, long sites, double scale,
                                           long pad = 200) {
  BlockJacobiSpec spec(d, pad);
  SampleRng rng(seed, k);
  for (long n = 0; n < sites; ++n) {
    Eigen::MatrixXd b(d, d);
    for (int r = 0; r < d; ++r)
      for (int c = r; c < d; ++c) b(r, c) = b(c, r) = rng.uniform(-scale, scale);
    spec.set_block(n, b);
  }
  return spec;
}

}  // namespace jlt
