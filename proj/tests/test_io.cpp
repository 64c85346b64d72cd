#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "jlt/io.hpp"

using namespace jlt;

namespace {

std::string fixture(const std::string& name) {
  std::ifstream in(std::string(JLT_FIXTURES) + "/" + name, std::ios::binary);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("parse chain specs") {
  const auto s = std::get<Perturbation>(parse_spec(fixture("ex41.json")));
  CHECK(s.kind() == LineKind::whole_line);
  CHECK(s.b(0) == 1.5);
  CHECK(std::get<Perturbation>(parse_spec(fixture("free.json"))).is_free());
  const auto h = std::get<Perturbation>(parse_spec(R"({"kind":"half_line","a":{"2":0.5},"b":{"1":-1}})"));
  CHECK(h.a(2) == 0.5);
  CHECK(h.b(1) == -1.0);
}

TEST_CASE("parse lattice specs") {
  const auto l = std::get<LatticeSpec>(parse_spec(fixture("lattice_bonds.json")));
  CHECK(l.nu() == 2);
  CHECK(l.num_sites() == 17 * 17);
  CHECK(l.potential().at({0, 0})(0, 0) == 2.5);
  CHECK(l.bond_weight({1, 0}, {0, 0}) == 1.7);
  CHECK(l.bond_weight({0, 1}, {0, 0}) == 0.4);
  CHECK(l.bond_weight({0, -1}, {0, 0}) == 1.0);
  const auto b = std::get<LatticeSpec>(parse_spec(fixture("lattice_block.json")));
  CHECK(b.fiber_dim() == 2);
  CHECK(b.potential().at({0})(0, 1) == 0.5);
  CHECK(std::get<LatticeSpec>(parse_spec(fixture("lattice_split.json"))).required_buffer() == 4);
}

TEST_CASE("round trip through JSON") {
  const auto l = std::get<LatticeSpec>(parse_spec(fixture("lattice_bonds.json")));
  const auto again = std::get<LatticeSpec>(spec_from_json(to_json(l)));
  CHECK(again.bonds() == l.bonds());
  CHECK(again.potential().size() == l.potential().size());
  Perturbation p(LineKind::half_line, {{3, 0.25}}, {{1, 1.0 / 3.0}});
  CHECK(std::get<Perturbation>(parse_spec(dump_json(to_json(p)))) == p);
}

TEST_CASE("input errors carry locations") {
  try {
    parse_spec(fixture("malformed.json"));
    FAIL("expected an input error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  try {
    parse_spec(fixture("bad_key.json"));
    FAIL("expected an input error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("field 'b'") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_spec(R"({"kind":"ring"})"), InputError);
  CHECK_THROWS_AS(parse_spec(R"({"b":{}})"), InputError);
  CHECK_THROWS_AS(parse_spec(R"({"kind":"half_line","b":{"0":1}})"), InputError);
  CHECK_THROWS_AS(parse_spec(R"({"kind":"whole_line","a":{"0":-2}})"), InputError);
  CHECK_THROWS_AS(parse_spec(R"({"kind":"whole_line","b":{"0":"x"}})"), InputError);
  CHECK_THROWS_AS(parse_spec(R"({"kind":"lattice","nu":2,"box":[[0,3]]})"), InputError);
  CHECK_THROWS_AS(parse_spec(R"({"kind":"lattice","nu":1,"box":[[0,3]],"V":{"[9]":1}})"), InputError);
  CHECK_THROWS_AS(parse_spec(R"({"kind":"lattice","nu":1,"box":[[0,3]],"bonds":{"[[0],[2]]":1.5}})"), InputError);
  CHECK_THROWS_AS(parse_spec(R"({"kind":"lattice","nu":1,"box":[[0,3]],"bonds":{"[[0],[1]]":-1}})"), InputError);
}

TEST_CASE("report emission") {
  CHECK(emit_report({}, Format::json) == "[]\n");
  CHECK(emit_report({}, Format::csv) == "theorem,lhs,rhs,slack,ratio,verdict,tolerance\n");

  const auto holds = make_report({Theorem::T1}, 1.5, 1.5, 0.0, true);
  const auto bad = make_report({Theorem::T2, 0.5}, 2.0, 1.0, 0.0, true);
  const auto unk = make_report({Theorem::E16a}, 0.0, 0.0, 0.0, false);
  const std::string csv = emit_report({holds, bad, unk}, Format::csv);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  CHECK(csv.find("T2(p=0.5),2,1,-1,2,violated,") != std::string::npos);
  CHECK(csv.find("E16a,0,0,0,,inconclusive,") != std::string::npos);

  const std::string js = emit_report({unk}, Format::json);
  CHECK(js.find("\"ratio\": null") != std::string::npos);
  const auto parsed = Json::parse(emit_report({holds}, Format::json));
  std::vector<std::string> keys;
  for (const auto& [k, v] : parsed[0].items()) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"theorem", "lhs", "rhs", "slack", "ratio", "verdict", "tolerance"});
}

TEST_CASE("17 significant digits round trip") {
  for (double x : {0.1, 1.0 / 3.0, 2.012461179749811, 1e-300, -7.25e12}) CHECK(std::stod(format_number(x)) == x);
  CHECK(format_number(0.1) == "0.10000000000000001");
}

TEST_CASE("golden T1 report") {
  const auto spec = std::get<Perturbation>(parse_spec(fixture("ex41.json")));
  const auto r = verify_bound({Theorem::T1}, spec);
  CHECK(emit_report({r}, Format::json) == fixture("golden_t1_report.json"));
}
