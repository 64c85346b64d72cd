#pragma once

// Jacobi operators as finitely supported perturbations of the free operator,
// their hard-cutoff truncations, and lattice (Z^nu) Hamiltonians on a box.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "jlt/core.hpp"

namespace jlt {

enum class LineKind { half_line, whole_line };

inline std::string to_string(LineKind k) {
  return k == LineKind::half_line ? "half_line" : "whole_line";
}

// Off-diagonal sequence a_n (bond n joins sites n and n+1) and diagonal b_n.
// Only entries that differ from the free values a = 1, b = 0 are stored.
class Perturbation {
 public:
  using Sequence = std::map<long, double>;

  explicit Perturbation(LineKind kind = LineKind::whole_line) : kind_(kind) {}

  Perturbation(LineKind kind, const Sequence& a, const Sequence& b) : kind_(kind) {
    for (const auto& [n, v] : a) set_a(n, v);
    for (const auto& [n, v] : b) set_b(n, v);
  }

  LineKind kind() const { return kind_; }

  double a(long n) const {
    auto it = a_.find(n);
    return it == a_.end() ? 1.0 : it->second;
  }
  double b(long n) const {
    auto it = b_.find(n);
    return it == b_.end() ? 0.0 : it->second;
  }

  const Sequence& a_entries() const { return a_; }
  const Sequence& b_entries() const { return b_; }

  bool is_free() const { return a_.empty() && b_.empty(); }
  bool diagonal_only() const { return a_.empty(); }

  // Smallest window of sites touched by the perturbation: b sites plus both
  // endpoints of every modified bond.
  std::optional<SiteRange> support() const {
    if (is_free()) return std::nullopt;
    long lo = std::numeric_limits<long>::max();
    long hi = std::numeric_limits<long>::min();
    if (!b_.empty()) {
      lo = std::min(lo, b_.begin()->first);
      hi = std::max(hi, b_.rbegin()->first);
    }
    if (!a_.empty()) {
      lo = std::min(lo, a_.begin()->first);
      hi = std::max(hi, a_.rbegin()->first + 1);
    }
    return SiteRange{lo, hi};
  }

  Perturbation with_a(long n, double v) const {
    Perturbation p = *this;
    p.set_a(n, v);
    return p;
  }
  Perturbation with_b(long n, double v) const {
    Perturbation p = *this;
    p.set_b(n, v);
    return p;
  }

  friend bool operator==(const Perturbation&, const Perturbation&) = default;

 private:
  void check_index(long n, const char* what) const {
    if (kind_ == LineKind::half_line && n < 1)
      throw InvalidParameters(std::string("half-line ") + what + " index must be >= 1, got " +
                              std::to_string(n));
  }
  void set_a(long n, double v) {
    check_index(n, "bond");
    if (!(v > 0.0) || !std::isfinite(v))
      throw InvalidParameters("a_" + std::to_string(n) + " must be positive and finite");
    if (v == 1.0)
      a_.erase(n);
    else
      a_[n] = v;
  }
  void set_b(long n, double v) {
    check_index(n, "site");
    if (!std::isfinite(v)) throw InvalidParameters("b_" + std::to_string(n) + " must be finite");
    if (v == 0.0)
      b_.erase(n);
    else
      b_[n] = v;
  }

  LineKind kind_;
  Sequence a_;
  Sequence b_;
};

// Essential spectrum [-half_width, half_width] plus the margin inside which
// eigenvalues are treated as indistinguishable from the band edge.
struct Band {
  double half_width = 2.0;
  double edge_margin = 1e-8;

  static Band chain(double margin = 1e-8) { return {2.0, margin}; }
  static Band lattice(int nu, double margin = 1e-8) { return {2.0 * nu, margin * nu}; }

  void validate() const {
    if (!(half_width > 0.0)) throw InvalidParameters("band half-width must be positive");
    if (!(edge_margin > 0.0)) throw InvalidParameters("band edge margin must be positive");
  }
};

// Window growth schedule for discrete_spectrum. Windows are the support padded
// by `initial_padding` sites per side, multiplied by `growth` each round.
struct TruncationPlan {
  long initial_padding = 64;
  double growth = 2.0;
  double tolerance = 1e-10;
  long max_window = 4'000'000;

  void validate() const {
    if (initial_padding < 1) throw InvalidParameters("initial padding must be >= 1");
    if (!(growth > 1.0)) throw InvalidParameters("growth factor must exceed 1");
    if (!(tolerance > 0.0)) throw InvalidParameters("tolerance must be positive");
    if (max_window < 2 * initial_padding)
      throw InvalidParameters("max window smaller than the initial window");
  }
};

// Symmetric tridiagonal matrix: diag has n entries, off has n-1.
struct SymTridiag {
  std::vector<double> diag;
  std::vector<double> off;

  std::size_t size() const { return diag.size(); }

  Eigen::MatrixXd dense() const {
    const auto n = static_cast<Eigen::Index>(diag.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) m(i, i) = diag[i];
    for (Eigen::Index i = 0; i + 1 < n; ++i) m(i, i + 1) = m(i + 1, i) = off[i];
    return m;
  }
};

struct Truncation {
  SymTridiag matrix;
  SiteRange window;
  bool extended = false;  // the requested window did not cover the support
};

struct TruncationOptions {
  bool strict = false;
};

// Hard-cutoff compression of the operator onto `window`:
// M[i][i] = b(site i), M[i][i+1] = a(bond i).
inline Truncation build_truncated_matrix(const Perturbation& spec, SiteRange window,
                                         TruncationOptions opts = {}) {
  if (window.empty()) throw InvalidParameters("empty truncation window");
  Truncation out;
  if (spec.kind() == LineKind::half_line && window.lo < 1) {
    if (opts.strict) throw InvalidParameters("half-line window must start at site >= 1");
    window.lo = 1;
    if (window.hi < 1) window.hi = 1;
    out.extended = true;
  }
  if (auto supp = spec.support(); supp && !window.contains(*supp)) {
    if (opts.strict) throw InvalidParameters("truncation window does not cover the support");
    window.lo = std::min(window.lo, supp->lo);
    window.hi = std::max(window.hi, supp->hi);
    out.extended = true;
  }
  if (window.size() < 2) throw InvalidParameters("truncation window needs at least 2 sites");

  const auto n = static_cast<std::size_t>(window.size());
  out.window = window;
  out.matrix.diag.assign(n, 0.0);
  out.matrix.off.assign(n - 1, 1.0);
  for (const auto& [site, v] : spec.b_entries())
    if (window.contains(site)) out.matrix.diag[site - window.lo] = v;
  for (const auto& [bond, v] : spec.a_entries())
    if (window.contains(bond) && window.contains(bond + 1)) out.matrix.off[bond - window.lo] = v;
  return out;
}

// Diagonal operator bracketing the input in operator order:
// b_n^{+-} = b_n +- (|a_{n-1} - 1| + |a_n - 1|), a = 1.
inline Perturbation sandwich_transform(const Perturbation& spec, Sign sign) {
  std::map<long, double> shift;
  for (const auto& [n, v] : spec.b_entries()) shift[n] += v;
  const double s = sign_factor(sign);
  for (const auto& [bond, v] : spec.a_entries()) {
    const double d = std::abs(v - 1.0);
    shift[bond] += s * d;
    shift[bond + 1] += s * d;
  }
  return Perturbation(spec.kind(), {}, shift);
}

// b -> -b. Eigenvalue lists of the result are the negated, reversed lists of
// the input (the staggering unitary (-1)^n maps a -> -a).
inline Perturbation spectral_flip(const Perturbation& spec) {
  std::map<long, double> b;
  for (const auto& [n, v] : spec.b_entries()) b[n] = -v;
  return Perturbation(spec.kind(), spec.a_entries(), b);
}

// ---------------------------------------------------------------------------
// Lattice Z^nu
// ---------------------------------------------------------------------------

using Site = std::vector<long>;

// Unordered nearest-neighbour pair, stored with first < second.
using BondKey = std::pair<Site, Site>;

inline BondKey make_bond(Site x, Site y) {
  if (y < x) std::swap(x, y);
  return {std::move(x), std::move(y)};
}

class LatticeSpec {
 public:
  LatticeSpec(int nu, std::vector<SiteRange> box, int fiber_dim = 1)
      : nu_(nu), box_(std::move(box)), fiber_(fiber_dim) {
    if (nu_ < 1) throw InvalidParameters("lattice dimension must be >= 1");
    if (static_cast<int>(box_.size()) != nu_)
      throw InvalidParameters("box must have one index range per axis");
    for (const auto& r : box_)
      if (r.empty()) throw InvalidParameters("lattice box has an empty axis");
    if (fiber_ < 1) throw InvalidParameters("fiber dimension must be >= 1");
    strides_.assign(nu_, 1);
    for (int k = nu_ - 2; k >= 0; --k) strides_[k] = strides_[k + 1] * box_[k + 1].size();
  }

  int nu() const { return nu_; }
  int fiber_dim() const { return fiber_; }
  const std::vector<SiteRange>& box() const { return box_; }
  long required_buffer() const { return required_buffer_; }
  void set_required_buffer(long b) { required_buffer_ = b; }

  long num_sites() const { return strides_[0] * box_[0].size(); }
  long dimension() const { return num_sites() * fiber_; }

  bool contains(const Site& x) const {
    if (static_cast<int>(x.size()) != nu_) return false;
    for (int k = 0; k < nu_; ++k)
      if (!box_[k].contains(x[k])) return false;
    return true;
  }

  // Lexicographic enumeration, last axis fastest.
  long index_of(const Site& x) const {
    long idx = 0;
    for (int k = 0; k < nu_; ++k) idx += (x[k] - box_[k].lo) * strides_[k];
    return idx;
  }
  Site site_at(long idx) const {
    Site x(nu_);
    for (int k = 0; k < nu_; ++k) {
      x[k] = box_[k].lo + idx / strides_[k];
      idx %= strides_[k];
    }
    return x;
  }

  void set_potential(const Site& x, double v) {
    set_potential_block(x, Eigen::MatrixXd::Constant(1, 1, v));
  }
  void set_potential_block(const Site& x, const Eigen::MatrixXd& block) {
    if (!contains(x)) throw InvalidParameters("potential site outside the lattice box");
    if (block.rows() != fiber_ || block.cols() != fiber_)
      throw InvalidParameters("potential block has the wrong fiber dimension");
    if (!block.allFinite()) throw InvalidParameters("potential must be finite");
    if ((block - block.transpose()).cwiseAbs().maxCoeff() > 1e-14 * (1.0 + block.cwiseAbs().maxCoeff()))
      throw InvalidParameters("potential block must be symmetric");
    if (block.isZero(0.0))
      potential_.erase(x);
    else
      potential_[x] = 0.5 * (block + block.transpose());
  }

  void set_bond(const Site& x, const Site& y, double weight) {
    if (!contains(x) || !contains(y)) throw InvalidParameters("bond references a site outside the box");
    long dist = 0;
    for (int k = 0; k < nu_; ++k) dist += std::abs(x[k] - y[k]);
    if (dist != 1) throw InvalidParameters("bond endpoints must be nearest neighbours");
    if (!(weight >= 0.0) || !std::isfinite(weight))
      throw InvalidParameters("bond weights must be nonnegative and finite");
    auto key = make_bond(x, y);
    if (weight == 1.0)
      bonds_.erase(key);
    else
      bonds_[key] = weight;
  }

  const std::map<Site, Eigen::MatrixXd>& potential() const { return potential_; }
  const std::map<BondKey, double>& bonds() const { return bonds_; }

  double bond_weight(const Site& x, const Site& y) const {
    auto it = bonds_.find(make_bond(x, y));
    return it == bonds_.end() ? 1.0 : it->second;
  }

  // Minimum distance from any supported site (potential or modified bond
  // endpoint) to the box boundary; the box size if nothing is supported.
  long support_buffer() const {
    long best = std::numeric_limits<long>::max();
    auto visit = [&](const Site& x) {
      for (int k = 0; k < nu_; ++k)
        best = std::min({best, x[k] - box_[k].lo, box_[k].hi - x[k]});
    };
    for (const auto& [x, _] : potential_) visit(x);
    for (const auto& [b, _] : bonds_) {
      visit(b.first);
      visit(b.second);
    }
    if (best == std::numeric_limits<long>::max()) {
      best = 0;
      for (const auto& r : box_) best = std::max(best, r.size());
    }
    return best;
  }

  // Sum over incident bonds of |a_b - 1| at site x, the shift that bounds the off-diagonal part.
  double bond_defect_at(const Site& x) const {
    double s = 0.0;
    for (const auto& [b, w] : bonds_)
      if (b.first == x || b.second == x) s += std::abs(w - 1.0);
    return s;
  }

 private:
  int nu_;
  std::vector<SiteRange> box_;
  int fiber_;
  long required_buffer_ = 5;
  std::vector<long> strides_;
  std::map<Site, Eigen::MatrixXd> potential_;
  std::map<BondKey, double> bonds_;
};

// Hopping part sum_{|m-n|=1} a_(nm) u(m) restricted to the listed axes,
// tensored with the identity on the fiber.
inline Eigen::SparseMatrix<double> lattice_hopping(const LatticeSpec& spec, const std::vector<int>& axes,
                                                   bool unit_bonds = false) {
  const long n_sites = spec.num_sites();
  const int d = spec.fiber_dim();
  std::vector<Eigen::Triplet<double>> entries;
  for (long i = 0; i < n_sites; ++i) {
    Site x = spec.site_at(i);
    for (int axis : axes) {
      Site y = x;
      ++y[axis];
      if (!spec.contains(y)) continue;
      const long j = spec.index_of(y);
      const double w = unit_bonds ? 1.0 : spec.bond_weight(x, y);
      if (w == 0.0) continue;
      for (int f = 0; f < d; ++f) {
        entries.emplace_back(i * d + f, j * d + f, w);
        entries.emplace_back(j * d + f, i * d + f, w);
      }
    }
  }
  Eigen::SparseMatrix<double> h(spec.dimension(), spec.dimension());
  h.setFromTriplets(entries.begin(), entries.end());
  return h;
}

// Block-diagonal potential; `shift` adds shift(x) * identity at each site.
template <class ShiftFn>
Eigen::SparseMatrix<double> lattice_potential(const LatticeSpec& spec, ShiftFn shift) {
  const int d = spec.fiber_dim();
  std::vector<Eigen::Triplet<double>> entries;
  for (long i = 0; i < spec.num_sites(); ++i) {
    const Site x = spec.site_at(i);
    const double s = shift(x);
    auto it = spec.potential().find(x);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) {
        double v = (it != spec.potential().end()) ? it->second(r, c) : 0.0;
        if (r == c) v += s;
        if (v != 0.0) entries.emplace_back(i * d + r, i * d + c, v);
      }
  }
  Eigen::SparseMatrix<double> v(spec.dimension(), spec.dimension());
  v.setFromTriplets(entries.begin(), entries.end());
  return v;
}

inline Eigen::SparseMatrix<double> lattice_potential(const LatticeSpec& spec) {
  return lattice_potential(spec, [](const Site&) { return 0.0; });
}

inline std::vector<int> all_axes(int nu) {
  std::vector<int> axes(nu);
  for (int k = 0; k < nu; ++k) axes[k] = k;
  return axes;
}

// H_0(a_b) + V on the box with hard cutoff.
inline Eigen::SparseMatrix<double> build_lattice_matrix(const LatticeSpec& spec) {
  Eigen::SparseMatrix<double> h = lattice_hopping(spec, all_axes(spec.nu()));
  h += lattice_potential(spec);
  return h;
}

}  // namespace jlt
