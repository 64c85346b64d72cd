#pragma once

// Exactly solvable examples, the small-p counterexample family, seeded random
// ensembles and the (a_n - 1)_+ conjecture probe.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "jlt/bounds.hpp"
#include "jlt/core.hpp"
#include "jlt/eigensolve.hpp"
#include "jlt/operator_model.hpp"

namespace jlt {

// ---------------------------------------------------------------------------
// Analytic examples
// ---------------------------------------------------------------------------

enum class ExampleId { Ex4_1, Ex4_2, HalfLineSite1, HalfLineBond1 };

inline const char* to_string(ExampleId id) {
  switch (id) {
    case ExampleId::Ex4_1:
      return "Ex4_1";
    case ExampleId::Ex4_2:
      return "Ex4_2";
    case ExampleId::HalfLineSite1:
      return "HalfLineSite1";
    default:
      return "HalfLineBond1";
  }
}

inline std::optional<ExampleId> parse_example(const std::string& s) {
  for (ExampleId id : {ExampleId::Ex4_1, ExampleId::Ex4_2, ExampleId::HalfLineSite1, ExampleId::HalfLineBond1})
    if (s == to_string(id)) return id;
  return std::nullopt;
}

struct AnalyticExample {
  ExampleId id;
  double parameter;
  Perturbation spec;
  std::vector<double> predicted_plus;   // descending
  std::vector<double> predicted_minus;  // ascending
  double t1_lhs = 0.0;                  // predicted sum of sqrt(E^2 - 4)
  double t1_rhs = 0.0;
  // |defining equation residual| for each predicted eigenvalue
  double equation_residual = 0.0;
};

inline AnalyticExample analytic_example(ExampleId id, double param) {
  if (!std::isfinite(param)) throw InvalidParameters("example parameter must be finite");
  AnalyticExample ex{id, param, Perturbation(), {}, {}, 0.0, 0.0, 0.0};
  switch (id) {
    case ExampleId::Ex4_1: {
      // b_0 = b; eigenfunction mu^{|n|}, b = 1/mu - mu = sqrt(E^2 - 4).
      if (param == 0.0) throw InvalidParameters("Ex4_1 needs b != 0");
      ex.spec = Perturbation(LineKind::whole_line, {}, {{0, param}});
      const double e = std::copysign(std::sqrt(param * param + 4.0), param);
      (param > 0 ? ex.predicted_plus : ex.predicted_minus).push_back(e);
      ex.equation_residual = std::abs(std::sqrt(e * e - 4.0) - std::abs(param));
      ex.t1_rhs = std::abs(param);
      break;
    }
    case ExampleId::Ex4_2: {
      // a_0 = a > 1; a = 1/mu, a - 1/a = sqrt(E^2 - 4), eigenvalues +-E.
      if (!(param > 1.0)) throw InvalidParameters("Ex4_2 needs a > 1");
      ex.spec = Perturbation(LineKind::whole_line, {{0, param}}, {});
      const double e = param + 1.0 / param;
      ex.predicted_plus.push_back(e);
      ex.predicted_minus.push_back(-e);
      ex.equation_residual = std::abs(std::sqrt(e * e - 4.0) - (param - 1.0 / param));
      ex.t1_rhs = 4.0 * (param - 1.0);
      break;
    }
    case ExampleId::HalfLineSite1: {
      // b_1 = b > 0; mu = 1/b, eigenvalue b + 1/b iff b > 1.
      if (!(param > 0.0)) throw InvalidParameters("HalfLineSite1 needs b > 0");
      ex.spec = Perturbation(LineKind::half_line, {}, {{1, param}});
      if (param > 1.0) {
        const double e = param + 1.0 / param;
        ex.predicted_plus.push_back(e);
        const double mu = 1.0 / param;
        ex.equation_residual = std::abs(param + mu - e);
      }
      ex.t1_rhs = param;
      break;
    }
    case ExampleId::HalfLineBond1: {
      // a_1 = a > 1; mu = (a^2 - 1)^{-1/2}, eigenvalues +-(mu + 1/mu) iff a > sqrt 2.
      if (!(param > 1.0)) throw InvalidParameters("HalfLineBond1 needs a > 1");
      ex.spec = Perturbation(LineKind::half_line, {{1, param}}, {});
      if (param * param > 2.0) {
        const double mu = 1.0 / std::sqrt(param * param - 1.0);
        const double e = mu + 1.0 / mu;
        ex.predicted_plus.push_back(e);
        ex.predicted_minus.push_back(-e);
        ex.equation_residual = std::abs(param * param * mu - e);
      }
      ex.t1_rhs = 4.0 * (param - 1.0);
      break;
    }
  }
  for (double e : ex.predicted_plus) ex.t1_lhs += std::sqrt(e * e - 4.0);
  for (double e : ex.predicted_minus) ex.t1_lhs += std::sqrt(e * e - 4.0);
  return ex;
}

// ---------------------------------------------------------------------------
// Small-p counterexample: N equal spikes b = beta at m, 2m, ..., Nm
// ---------------------------------------------------------------------------

using NormFunctional = std::function<double(const Perturbation&)>;

// l^1 norm of (b, a - 1).
inline double l1_norm(const Perturbation& spec) {
  double s = 0.0;
  for (const auto& [n, v] : spec.b_entries()) s += std::abs(v);
  for (const auto& [n, v] : spec.a_entries()) s += std::abs(v - 1.0);
  return s;
}

struct SpikeTrain {
  double p, beta;
  long count, spacing;
  Perturbation spec;
  double norm;                // value of the norm functional
  double moment_lower_bound;  // N (beta^2/6)^p, valid for large spacing
  bool spacing_warning;       // spacing < 10/beta: spikes interact
};

inline SpikeTrain counterexample_theorem3(double p, double beta, long count, long spacing,
                                          const NormFunctional& norm = l1_norm) {
  if (!(p >= 0.0) || !(p < 0.5)) throw InvalidParameters("the construction needs 0 <= p < 1/2");
  if (!(beta > 0.0) || !(beta < 1.0)) throw InvalidParameters("the construction needs 0 < beta < 1");
  if (count < 1 || spacing < 1) throw InvalidParameters("spike count and spacing must be >= 1");
  std::map<long, double> b;
  for (long k = 1; k <= count; ++k) b[k * spacing] = beta;
  SpikeTrain s{p, beta, count, spacing, Perturbation(LineKind::half_line, {}, b), 0.0, 0.0, false};
  s.norm = norm(s.spec);
  s.moment_lower_bound = static_cast<double>(count) * std::pow(beta * beta / 6.0, p);
  s.spacing_warning = static_cast<double>(spacing) < 10.0 / beta;
  return s;
}

// Scaling family beta = beta1 eps^{2/(1-2p)}, N = ceil(n1 eps^{-(1+2p)/(1-2p)}),
// spacing ceil(10/beta).
struct EpsilonScaling {
  double beta1 = 0.5;
  double n1 = 1.0;
};

inline SpikeTrain counterexample_for_epsilon(double p, double eps, EpsilonScaling scaling = {}) {
  if (!(eps > 0.0)) throw InvalidParameters("epsilon must be positive");
  if (!(p >= 0.0) || !(p < 0.5)) throw InvalidParameters("the construction needs 0 <= p < 1/2");
  const double beta = scaling.beta1 * std::pow(eps, 2.0 / (1.0 - 2.0 * p));
  const auto count = static_cast<long>(std::ceil(scaling.n1 * std::pow(eps, -(1.0 + 2.0 * p) / (1.0 - 2.0 * p)) - 1e-9));
  const auto spacing = static_cast<long>(std::ceil(10.0 / beta));
  return counterexample_theorem3(p, beta, std::max(1L, count), spacing);
}

// sum |E^+ - 2|^p + |E^- + 2|^p of the spike train.
inline double spike_moment_sum(const SpikeTrain& s, const TruncationPlan& plan = {}) {
  const EigenvalueReport rep = discrete_spectrum(s.spec, plan);
  double m = 0.0;
  for (double e : rep.plus) m += std::pow(e - 2.0, s.p);
  for (double e : rep.minus) m += std::pow(-2.0 - e, s.p);
  return m;
}

// ---------------------------------------------------------------------------
// Random ensembles
// ---------------------------------------------------------------------------

// splitmix64 step; the generator for sample k is keyed by (seed, k) alone.
class SampleRng {
 public:
  SampleRng(std::uint64_t seed, std::uint64_t index) : state_(mix(seed ^ mix(index + 0x632BE59BD9B4E019ULL))) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }
  // Uniform in [0, 1) from the top 53 bits; bit-exact across platforms.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  long integer(long lo, long hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<long>(next() % span);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  std::uint64_t state_;
};

enum class SignPolicy { mixed, positive, negative };

struct EnsembleConfig {
  std::uint64_t seed = 42;
  long samples = 100;
  LineKind kind = LineKind::whole_line;
  long support_min = 1;
  long support_max = 8;
  double b_min = 0.0;  // magnitude range of b
  double b_max = 3.0;
  double a_min = 0.2;  // a range; [1, 1] keeps a = 1
  double a_max = 3.0;
  SignPolicy sign = SignPolicy::mixed;

  void validate() const {
    if (samples < 0) throw InvalidParameters("sample count must be >= 0");
    if (support_min < 1 || support_max < support_min) throw InvalidParameters("empty support size range");
    if (!(b_min >= 0.0) || b_max < b_min) throw InvalidParameters("empty b magnitude range");
    if (!(a_min > 0.0) || a_max < a_min) throw InvalidParameters("a range must be a nonempty subset of (0, inf)");
  }
};

// Sample k: a support of s sites starting at 0 (whole line) or 1 (half line),
// random b on each site and random a on the s - 1 interior bonds.
inline Perturbation random_sample(const EnsembleConfig& cfg, std::uint64_t k) {
  cfg.validate();
  SampleRng rng(cfg.seed, k);
  const long s = rng.integer(cfg.support_min, cfg.support_max);
  const long start = cfg.kind == LineKind::half_line ? 1 : 0;
  std::map<long, double> a, b;
  for (long i = 0; i < s; ++i) {
    double v = rng.uniform(cfg.b_min, cfg.b_max);
    switch (cfg.sign) {
      case SignPolicy::mixed:
        if (rng.uniform() < 0.5) v = -v;
        break;
      case SignPolicy::negative:
        v = -v;
        break;
      case SignPolicy::positive:
        break;
    }
    b[start + i] = v;
  }
  for (long i = 0; i + 1 < s; ++i) a[start + i] = rng.uniform(cfg.a_min, cfg.a_max);
  return Perturbation(cfg.kind, a, b);
}

inline std::vector<Perturbation> random_ensemble(const EnsembleConfig& cfg) {
  cfg.validate();
  std::vector<Perturbation> out;
  out.reserve(static_cast<std::size_t>(cfg.samples));
  for (long k = 0; k < cfg.samples; ++k) out.push_back(random_sample(cfg, static_cast<std::uint64_t>(k)));
  return out;
}

// Evaluates f(k) for k in [0, n) on `threads` workers; results indexed by k so
// the output does not depend on scheduling.
template <class F>
auto parallel_map(long n, unsigned threads, F f) -> std::vector<decltype(f(0L))> {
  std::vector<decltype(f(0L))> out(static_cast<std::size_t>(n));
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max(1L, n))));
  if (threads == 1) {
    for (long k = 0; k < n; ++k) out[static_cast<std::size_t>(k)] = f(k);
    return out;
  }
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (long k = t; k < n; k += threads) out[static_cast<std::size_t>(k)] = f(k);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

// ---------------------------------------------------------------------------
// Conjecture probe: sum sqrt(E^2-4) vs sum |b_n| + 4 sum (a_n - 1)_+
// ---------------------------------------------------------------------------

struct ProbeResult {
  double min_slack = std::numeric_limits<double>::infinity();
  long argmin = -1;
  Perturbation witness;
  double lhs = 0.0, rhs = 0.0, tolerance = 0.0;
  long samples = 0;
  long inconclusive = 0;
  bool finding = false;  // min slack below -tolerance
};

inline ProbeResult conjecture_probe(const EnsembleConfig& cfg, const TruncationPlan& plan = {}, unsigned threads = 1) {
  cfg.validate();
  struct One {
    double slack = 0.0, lhs = 0.0, rhs = 0.0, tol = 0.0;
    bool converged = false;
  };
  auto eval = [&](long k) {
    const Perturbation spec = random_sample(cfg, static_cast<std::uint64_t>(k));
    One r;
    EigenvalueReport rep;
    try {
      rep = discrete_spectrum(spec, plan);
    } catch (const NoConvergence& e) {
      rep = e.partial();
    }
    // Reuse T1's LHS and tolerance; swap in the conjectured right side.
    const BoundReport t1 = evaluate_bound({Theorem::T1}, spec, rep);
    double rhs = 0.0;
    for (const auto& [n, v] : spec.b_entries()) rhs += std::abs(v);
    for (const auto& [n, v] : spec.a_entries()) rhs += 4.0 * positive_part(v - 1.0);
    r.lhs = t1.lhs;
    r.rhs = rhs;
    r.slack = rhs - t1.lhs;
    r.tol = 1e-9 * std::max(1.0, rhs) + (t1.tolerance - 1e-9 * std::max(1.0, t1.rhs));
    r.converged = rep.converged;
    return r;
  };
  const auto results = parallel_map(cfg.samples, threads, eval);
  ProbeResult out;
  out.samples = cfg.samples;
  for (long k = 0; k < cfg.samples; ++k) {
    const One& r = results[static_cast<std::size_t>(k)];
    if (!r.converged) {
      ++out.inconclusive;
      continue;
    }
    if (r.slack < out.min_slack) {  // strict: lowest index wins ties
      out.min_slack = r.slack;
      out.argmin = k;
      out.lhs = r.lhs;
      out.rhs = r.rhs;
      out.tolerance = r.tol;
    }
  }
  if (out.argmin >= 0) {
    out.witness = random_sample(cfg, static_cast<std::uint64_t>(out.argmin));
    out.finding = out.min_slack < -out.tolerance;
  }
  return out;
}

// Half-line b_n = n^{-alpha} for n <= cutoff.
inline Perturbation decay_profile(double alpha, long cutoff) {
  if (!(alpha > 1.0)) throw InvalidParameters("decay profile needs alpha > 1");
  if (cutoff < 1) throw InvalidParameters("decay profile needs cutoff >= 1");
  std::map<long, double> b;
  for (long n = 1; n <= cutoff; ++n) b[n] = std::pow(static_cast<double>(n), -alpha);
  return Perturbation(LineKind::half_line, {}, b);
}

}  // namespace jlt
