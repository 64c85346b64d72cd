#pragma once

// Batch driver behind tools/jlt. run() returns the process exit code:
// 0 all verdicts hold, 1 a violation, 2 bad input, 3 inconclusive present.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "jlt/bounds.hpp"
#include "jlt/ensembles.hpp"
#include "jlt/eigensolve.hpp"
#include "jlt/io.hpp"
#include "jlt/lattice.hpp"

namespace jlt {

enum class Command { spectrum, verify, example, probe, counterexample, lattice, sweep };

inline std::optional<Command> parse_command(const std::string& s) {
  if (s == "spectrum") return Command::spectrum;
  if (s == "verify") return Command::verify;
  if (s == "example") return Command::example;
  if (s == "probe") return Command::probe;
  if (s == "counterexample") return Command::counterexample;
  if (s == "lattice") return Command::lattice;
  if (s == "sweep") return Command::sweep;
  return std::nullopt;
}

enum ExitCode : int { kExitOk = 0, kExitViolation = 1, kExitInput = 2, kExitInconclusive = 3 };

struct RunConfig {
  Command command = Command::spectrum;
  std::string spec_path;
  std::vector<std::string> theorems;
  std::optional<double> p;
  std::uint64_t seed = 42;
  long samples = 100;
  std::string out_path;  // empty: stdout
  Format format = Format::json;
  TruncationPlan plan;
  unsigned threads = 1;
  // example
  std::string example_id;
  std::optional<double> param;
  // counterexample
  std::optional<double> eps;
  double beta1 = 0.5;
  double n1 = 1.0;
  std::optional<double> beta;
  std::optional<long> count;
  std::optional<long> spacing;
  // sweep / lattice ensembles
  std::optional<long> dump_index;
  LineKind kind = LineKind::whole_line;
};

inline Verdict worst_verdict(const std::vector<BoundReport>& reports) {
  bool inconclusive = false;
  for (const auto& r : reports) {
    if (r.verdict == Verdict::violated) return Verdict::violated;
    if (r.verdict == Verdict::inconclusive) inconclusive = true;
  }
  return inconclusive ? Verdict::inconclusive : Verdict::holds;
}

inline int exit_code_for(const std::vector<BoundReport>& reports) {
  switch (worst_verdict(reports)) {
    case Verdict::violated:
      return kExitViolation;
    case Verdict::inconclusive:
      return kExitInconclusive;
    default:
      return kExitOk;
  }
}

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open spec file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Theorem list with --p attached to the ids that take one.
inline std::vector<TheoremId> theorem_ids(const RunConfig& cfg, bool lattice) {
  if (cfg.theorems.empty()) throw InputError("--theorem is required");
  std::vector<TheoremId> ids;
  for (const auto& name : cfg.theorems) {
    auto t = parse_theorem(name);
    if (!t) throw InputError("unknown theorem id " + name);
    if (is_lattice_theorem(*t) != lattice || *t == Theorem::L5_1)
      throw InputError(name + (lattice ? " does not apply to lattice specs" : " needs a lattice spec"));
    TheoremId id{*t};
    if (takes_p(*t)) {
      if (!cfg.p) throw InputError(name + " needs --p");
      id.p = *cfg.p;
    }
    id.validate();
    ids.push_back(id);
  }
  return ids;
}

inline EigenvalueReport spectrum_or_partial(const Perturbation& spec, const TruncationPlan& plan) {
  try {
    return discrete_spectrum(spec, plan);
  } catch (const NoConvergence& e) {
    return e.partial();
  }
}

inline std::vector<BoundReport> chain_reports(const Perturbation& spec, const std::vector<TheoremId>& ids,
                                              const TruncationPlan& plan) {
  for (const auto& id : ids) {
    if (id.theorem == Theorem::Bargmann && spec.kind() != LineKind::half_line)
      throw InputError("Bargmann applies to half-line specs only");
    if ((id.theorem == Theorem::T2_8 || id.theorem == Theorem::T2_9 || id.theorem == Theorem::T2_10) &&
        !spec.diagonal_only())
      throw InputError(std::string(theorem_name(id.theorem)) + " needs a spec with a = 1");
  }
  const EigenvalueReport rep = spectrum_or_partial(spec, plan);
  std::vector<BoundReport> out;
  for (const auto& id : ids) out.push_back(evaluate_bound(id, spec, rep));
  return out;
}

inline std::string csv_spectrum(const EigenvalueReport& r) {
  std::string out = "side,eigenvalue,error\n";
  for (std::size_t i = 0; i < r.plus.size(); ++i)
    out += "plus," + format_number(r.plus[i]) + ',' + format_number(r.plus_error[i]) + '\n';
  for (std::size_t i = 0; i < r.minus.size(); ++i)
    out += "minus," + format_number(r.minus[i]) + ',' + format_number(r.minus_error[i]) + '\n';
  return out;
}

inline void require_json(const RunConfig& cfg, const char* what) {
  if (cfg.format != Format::json) throw InputError(std::string(what) + " output is JSON only");
}

inline EnsembleConfig ensemble_config(const RunConfig& cfg) {
  EnsembleConfig e;
  e.seed = cfg.seed;
  e.samples = cfg.samples;
  e.kind = cfg.kind;
  return e;
}

struct Output {
  std::string text;
  int code = kExitOk;
};

inline Output run_spectrum(const RunConfig& cfg) {
  const AnySpec spec = parse_spec(read_file(cfg.spec_path));
  if (const auto* lat = std::get_if<LatticeSpec>(&spec)) {
    require_json(cfg, "lattice spectrum");
    const LatticeSpectrum s = lattice_spectrum(*lat);
    Json j;
    j["plus"] = s.plus;
    j["minus"] = s.minus;
    j["error"] = s.error;
    j["band_half_width"] = s.edge;
    j["edge_margin"] = s.margin;
    j["flagged_near_edge"] = s.flagged;
    return {dump_json(j), kExitOk};
  }
  const auto& chain = std::get<Perturbation>(spec);
  try {
    const EigenvalueReport r = discrete_spectrum(chain, cfg.plan);
    return {cfg.format == Format::csv ? csv_spectrum(r) : dump_json(to_json(r)), kExitOk};
  } catch (const NoConvergence& e) {
    const EigenvalueReport& r = e.partial();
    return {cfg.format == Format::csv ? csv_spectrum(r) : dump_json(to_json(r)), kExitInconclusive};
  }
}

inline Output run_verify(const RunConfig& cfg) {
  const AnySpec spec = parse_spec(read_file(cfg.spec_path));
  std::vector<BoundReport> reports;
  if (const auto* lat = std::get_if<LatticeSpec>(&spec))
    reports = lattice_bounds_check(*lat, theorem_ids(cfg, true));
  else
    reports = chain_reports(std::get<Perturbation>(spec), theorem_ids(cfg, false), cfg.plan);
  return {emit_report(reports, cfg.format), exit_code_for(reports)};
}

inline Output run_example(const RunConfig& cfg) {
  auto id = parse_example(cfg.example_id);
  if (!id) throw InputError("unknown example id " + cfg.example_id);
  if (!cfg.param) throw InputError("example needs --param");
  const AnalyticExample ex = analytic_example(*id, *cfg.param);
  const EigenvalueReport rep = spectrum_or_partial(ex.spec, cfg.plan);
  const BoundReport t1 = evaluate_bound({Theorem::T1}, ex.spec, rep);
  if (cfg.format == Format::csv) return {emit_report({t1}, cfg.format), exit_code_for({t1})};
  Json j;
  j["example"] = to_string(*id);
  j["parameter"] = ex.parameter;
  j["spec"] = to_json(ex.spec);
  j["predicted_plus"] = ex.predicted_plus;
  j["predicted_minus"] = ex.predicted_minus;
  j["computed"] = to_json(rep);
  j["report"] = to_json(t1);
  return {dump_json(j), exit_code_for({t1})};
}

inline Output run_probe(const RunConfig& cfg) {
  require_json(cfg, "probe");
  const ProbeResult r = conjecture_probe(ensemble_config(cfg), cfg.plan, cfg.threads);
  Json j;
  j["seed"] = cfg.seed;
  j["samples"] = r.samples;
  j["min_slack"] = r.min_slack;
  j["argmin"] = r.argmin;
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["tolerance"] = r.tolerance;
  j["finding"] = r.finding;
  j["inconclusive_samples"] = r.inconclusive;
  j["witness"] = to_json(r.witness);
  // Findings are informational; they never change the exit code.
  return {dump_json(j), kExitOk};
}

inline Output run_counterexample(const RunConfig& cfg) {
  require_json(cfg, "counterexample");
  if (!cfg.p) throw InputError("counterexample needs --p");
  SpikeTrain s = [&] {
    if (cfg.eps) return counterexample_for_epsilon(*cfg.p, *cfg.eps, {cfg.beta1, cfg.n1});
    if (!cfg.beta || !cfg.count || !cfg.spacing) throw InputError("counterexample needs --eps or all of --beta, --N, --m");
    return counterexample_theorem3(*cfg.p, *cfg.beta, *cfg.count, *cfg.spacing);
  }();
  const double moment = spike_moment_sum(s, cfg.plan);
  Json j;
  j["p"] = s.p;
  j["beta"] = s.beta;
  j["N"] = s.count;
  j["m"] = s.spacing;
  j["norm"] = s.norm;
  j["moment_sum"] = moment;
  j["moment_lower_bound"] = s.moment_lower_bound;
  j["ratio"] = moment / s.norm;
  j["spacing_warning"] = s.spacing_warning;
  j["spec"] = to_json(s.spec);
  return {dump_json(j), kExitOk};
}

inline Output run_lattice(const RunConfig& cfg) {
  const auto ids = theorem_ids(cfg, true);
  if (!cfg.spec_path.empty()) {
    const AnySpec spec = parse_spec(read_file(cfg.spec_path));
    const auto* lat = std::get_if<LatticeSpec>(&spec);
    if (!lat) throw InputError("lattice command needs a lattice spec");
    const auto reports = lattice_bounds_check(*lat, ids);
    return {emit_report(reports, cfg.format), exit_code_for(reports)};
  }
  LatticeEnsembleConfig lc;
  lc.seed = cfg.seed;
  if (cfg.dump_index) {
    require_json(cfg, "sample dump");
    return {dump_json(to_json(random_lattice_sample(lc, static_cast<std::uint64_t>(*cfg.dump_index)))), kExitOk};
  }
  const auto per_sample = parallel_map(cfg.samples, cfg.threads, [&](long k) {
    return lattice_bounds_check(random_lattice_sample(lc, static_cast<std::uint64_t>(k)), ids);
  });
  std::vector<BoundReport> reports;
  for (const auto& v : per_sample) reports.insert(reports.end(), v.begin(), v.end());
  return {emit_report(reports, cfg.format), exit_code_for(reports)};
}

inline Output run_sweep(const RunConfig& cfg) {
  const EnsembleConfig ec = ensemble_config(cfg);
  ec.validate();
  if (cfg.dump_index) {
    require_json(cfg, "sample dump");
    if (*cfg.dump_index < 0) throw InputError("--dump-index must be >= 0");
    return {dump_json(to_json(random_sample(ec, static_cast<std::uint64_t>(*cfg.dump_index)))), kExitOk};
  }
  const auto ids = theorem_ids(cfg, false);
  const auto per_sample = parallel_map(cfg.samples, cfg.threads, [&](long k) {
    return chain_reports(random_sample(ec, static_cast<std::uint64_t>(k)), ids, cfg.plan);
  });
  std::vector<BoundReport> reports;
  for (const auto& v : per_sample) reports.insert(reports.end(), v.begin(), v.end());
  return {emit_report(reports, cfg.format), exit_code_for(reports)};
}

}  // namespace detail

// Runs one command, writing the output to cfg.out_path (or `out`) and
// diagnostics to `err`.
inline int run(const RunConfig& cfg, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  detail::Output result;
  try {
    cfg.plan.validate();
    if ((cfg.command == Command::spectrum || cfg.command == Command::verify) && cfg.spec_path.empty())
      throw InputError("--spec is required");
    switch (cfg.command) {
      case Command::spectrum:
        result = detail::run_spectrum(cfg);
        break;
      case Command::verify:
        result = detail::run_verify(cfg);
        break;
      case Command::example:
        result = detail::run_example(cfg);
        break;
      case Command::probe:
        result = detail::run_probe(cfg);
        break;
      case Command::counterexample:
        result = detail::run_counterexample(cfg);
        break;
      case Command::lattice:
        result = detail::run_lattice(cfg);
        break;
      case Command::sweep:
        result = detail::run_sweep(cfg);
        break;
    }
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const InvalidParameters& e) {
    err << "invalid parameters: " << e.what() << '\n';
    return kExitInput;
  } catch (const DimensionCapExceeded& e) {
    err << "size cap: " << e.what() << '\n';
    return kExitInput;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return kExitInput;
  }
  if (cfg.out_path.empty()) {
    out << result.text;
  } else {
    std::ofstream f(cfg.out_path, std::ios::binary);
    if (!f) {
      err << "cannot write " << cfg.out_path << '\n';
      return kExitInput;
    }
    f << result.text;
  }
  return result.code;
}

}  // namespace jlt
