#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "jlt/cli.hpp"

using namespace jlt;

namespace {

std::string fixture(const std::string& name) { return std::string(JLT_FIXTURES) + "/" + name; }

struct Result {
  int code;
  std::string out, err;
};

Result run_cfg(const RunConfig& cfg) {
  std::ostringstream out, err;
  const int code = run(cfg, out, err);
  return {code, out.str(), err.str()};
}

RunConfig make(Command c, const std::string& spec = {}) {
  RunConfig cfg;
  cfg.command = c;
  cfg.spec_path = spec.empty() ? spec : fixture(spec);
  return cfg;
}

}  // namespace

TEST_CASE("verify on a single-site spec exits 0") {
  auto cfg = make(Command::verify, "ex41.json");
  cfg.theorems = {"T1"};
  const auto r = run_cfg(cfg);
  CHECK(r.code == kExitOk);
  const auto j = Json::parse(r.out);
  CHECK(j[0]["verdict"] == "holds");
  CHECK(std::abs(j[0]["slack"].get<double>()) < 1e-9);
}

TEST_CASE("spectrum of the free operator is empty") {
  const auto r = run_cfg(make(Command::spectrum, "free.json"));
  CHECK(r.code == kExitOk);
  const auto j = Json::parse(r.out);
  CHECK(j["plus"].empty());
  CHECK(j["minus"].empty());
  CHECK(j["converged"] == true);
}

TEST_CASE("violation exits 1") {
  auto cfg = make(Command::verify, "lattice_split.json");
  cfg.theorems = {"AxisSplit"};
  const auto r = run_cfg(cfg);
  CHECK(r.code == kExitViolation);
  CHECK(Json::parse(r.out)[0]["verdict"] == "violated");
}

TEST_CASE("input errors exit 2") {
  CHECK(run_cfg(make(Command::spectrum, "malformed.json")).code == kExitInput);
  const auto r = run_cfg(make(Command::spectrum, "malformed.json"));
  CHECK(r.err.find("line 3") != std::string::npos);
  CHECK(run_cfg(make(Command::spectrum, "does_not_exist.json")).code == kExitInput);
  CHECK(run_cfg(make(Command::verify, "ex41.json")).code == kExitInput);  // no theorem
  auto cfg = make(Command::verify, "ex41.json");
  cfg.theorems = {"T2"};
  CHECK(run_cfg(cfg).code == kExitInput);  // missing --p
  cfg.p = 0.25;
  CHECK(run_cfg(cfg).code == kExitInput);  // p below range
  cfg.theorems = {"T5_2"};
  cfg.p = 1.0;
  CHECK(run_cfg(cfg).code == kExitInput);  // lattice id on a chain
  cfg.theorems = {"Bargmann"};
  CHECK(run_cfg(cfg).code == kExitInput);  // whole-line
  auto probe = make(Command::probe);
  probe.format = Format::csv;
  CHECK(run_cfg(probe).code == kExitInput);
}

TEST_CASE("convergence failure exits 3") {
  auto cfg = make(Command::verify, "edge_state.json");
  cfg.theorems = {"T1"};
  cfg.plan.max_window = 300;
  cfg.plan.tolerance = 1e-14;
  const auto r = run_cfg(cfg);
  CHECK(r.code == kExitInconclusive);
  CHECK(Json::parse(r.out)[0]["verdict"] == "inconclusive");
  auto s = make(Command::spectrum, "edge_state.json");
  s.plan = cfg.plan;
  CHECK(run_cfg(s).code == kExitInconclusive);
}

TEST_CASE("example and counterexample commands") {
  auto ex = make(Command::example);
  ex.example_id = "Ex4_2";
  ex.param = 2.0;
  const auto r = run_cfg(ex);
  CHECK(r.code == kExitOk);
  CHECK(Json::parse(r.out)["computed"]["plus"].size() == 1);

  auto c = make(Command::counterexample);
  c.p = 0.25;
  c.eps = 0.5;
  const auto rc = run_cfg(c);
  CHECK(rc.code == kExitOk);
  const auto j = Json::parse(rc.out);
  CHECK(j["N"] == 8);
  CHECK(j["moment_sum"].get<double>() > 0.0);
  c.eps.reset();
  CHECK(run_cfg(c).code == kExitInput);
}

TEST_CASE("lattice command") {
  auto cfg = make(Command::lattice, "lattice_site8.json");
  cfg.theorems = {"T5_2", "T5_3", "E5_11", "Remark5_a", "Remark5_b"};
  cfg.p = 1.0;
  cfg.format = Format::csv;
  const auto r = run_cfg(cfg);
  CHECK(r.code == kExitOk);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 6);
}

TEST_CASE("sweep output does not depend on thread count") {
  auto cfg = make(Command::sweep);
  cfg.theorems = {"T1", "T2"};
  cfg.p = 1.0;
  cfg.samples = 12;
  cfg.seed = 5;
  cfg.threads = 1;
  const auto a = run_cfg(cfg);
  cfg.threads = 4;
  const auto b = run_cfg(cfg);
  CHECK(a.code == kExitOk);
  CHECK(a.out == b.out);
  CHECK(Json::parse(a.out).size() == 24);

  cfg.dump_index = 3;
  const auto d = run_cfg(cfg);
  CHECK(d.code == kExitOk);
  EnsembleConfig ec;
  ec.seed = 5;
  CHECK(std::get<Perturbation>(parse_spec(d.out)) == random_sample(ec, 3));
}

TEST_CASE("probe output is byte-identical across runs") {
  auto cfg = make(Command::probe);
  cfg.seed = 7;
  cfg.samples = 30;
  const auto a = run_cfg(cfg);
  cfg.threads = 2;
  const auto b = run_cfg(cfg);
  CHECK(a.code == kExitOk);
  CHECK(a.out == b.out);
}
