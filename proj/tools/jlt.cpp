// Command-line front end; see `jlt --help`.

#include <CLI11.hpp>

#include "jlt/jlt.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Eigenvalue moment bounds for Jacobi matrices and lattice operators"};
  app.require_subcommand(1);

  jlt::RunConfig cfg;
  std::string theorems, format = "json", kind = "whole_line";
  double p = 0.0, eps = 0.0, beta = 0.0, param = 0.0;
  long count = 0, spacing = 0, dump = 0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--spec", cfg.spec_path, "spec JSON file");
    sub->add_option("--theorem", theorems, "comma separated theorem ids");
    sub->add_option("--p", p, "moment power");
    sub->add_option("--seed", cfg.seed, "ensemble seed");
    sub->add_option("--samples", cfg.samples, "ensemble size");
    sub->add_option("--out", cfg.out_path, "output file (default stdout)");
    sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--tol", cfg.plan.tolerance, "truncation convergence tolerance");
    sub->add_option("--max-window", cfg.plan.max_window, "largest truncation window");
    sub->add_option("--threads", cfg.threads, "worker threads for ensembles");
  };

  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues outside the band");
  auto* verify = app.add_subcommand("verify", "check bounds on one spec");
  auto* example = app.add_subcommand("example", "exactly solvable example vs computation");
  auto* probe = app.add_subcommand("probe", "(a_n - 1)_+ conjecture probe");
  auto* counter = app.add_subcommand("counterexample", "small-p spike train");
  auto* lattice = app.add_subcommand("lattice", "lattice bounds on a spec or a seeded ensemble");
  auto* sweep = app.add_subcommand("sweep", "bounds over a seeded chain ensemble");
  for (auto* sub : {spectrum, verify, example, probe, counter, lattice, sweep}) common(sub);

  example->add_option("--id", cfg.example_id, "Ex4_1, Ex4_2, HalfLineSite1 or HalfLineBond1")->required();
  example->add_option("--param", param, "example parameter")->required();
  counter->add_option("--eps", eps, "scaling parameter");
  counter->add_option("--beta1", cfg.beta1, "beta at eps = 1");
  counter->add_option("--n1", cfg.n1, "spike count at eps = 1");
  counter->add_option("--beta", beta, "spike height");
  counter->add_option("--N", count, "number of spikes");
  counter->add_option("--m", spacing, "spike spacing");
  for (auto* sub : {sweep, lattice}) sub->add_option("--dump-index", dump, "print sample k and exit");
  for (auto* sub : {sweep, probe})
    sub->add_option("--kind", kind, "half_line or whole_line")->check(CLI::IsMember({"half_line", "whole_line"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : jlt::kExitInput;
  }

  CLI::App* sub = app.get_subcommands().front();
  cfg.command = *jlt::parse_command(sub->get_name());
  cfg.format = format == "csv" ? jlt::Format::csv : jlt::Format::json;
  cfg.kind = kind == "half_line" ? jlt::LineKind::half_line : jlt::LineKind::whole_line;
  if (!theorems.empty()) {
    std::stringstream ss(theorems);
    for (std::string t; std::getline(ss, t, ',');)
      if (!t.empty()) cfg.theorems.push_back(t);
  }
  auto given = [sub](const char* name) {
    const CLI::Option* opt = sub->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  if (given("--p")) cfg.p = p;
  if (given("--eps")) cfg.eps = eps;
  if (given("--beta")) cfg.beta = beta;
  if (given("--N")) cfg.count = count;
  if (given("--m")) cfg.spacing = spacing;
  if (given("--param")) cfg.param = param;
  if (given("--dump-index")) cfg.dump_index = dump;
  return jlt::run(cfg);
}
