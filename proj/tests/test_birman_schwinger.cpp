#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "jlt/birman_schwinger.hpp"
#include "jlt/bounds.hpp"
#include "jlt/ensembles.hpp"

using namespace jlt;
using Catch::Matchers::WithinAbs;

TEST_CASE("band parameter") {
  const auto bp = BandParameter::from_beta(2.5);
  CHECK_THAT(bp.mu, WithinAbs(0.5, 1e-15));
  CHECK_THAT(bp.w, WithinAbs(1.5, 1e-15));
  CHECK_THAT(BandParameter::from_beta(13.0 / 6.0).mu, WithinAbs(2.0 / 3.0, 1e-14));
  CHECK_THROWS_AS(BandParameter::from_beta(2.0), DomainError);
  CHECK_THROWS_AS(BandParameter::from_mu(1.0), DomainError);
  for (double beta : {2.0000001, 2.01, 2.5, 3.0, 10.0, 1e6}) {
    const auto p = BandParameter::from_beta(beta);
    CHECK_THAT(p.mu + 1.0 / p.mu, WithinAbs(beta, 1e-14 * beta));
    CHECK_THAT(p.w, WithinAbs(std::sqrt(beta * beta - 4.0), 1e-12 * beta));
    CHECK_THAT(BandParameter::from_mu(p.mu).beta, WithinAbs(beta, 1e-13 * beta));
  }
}

TEST_CASE("free resolvent") {
  CHECK_THAT(free_resolvent_entry(Line::whole, 2.5, 0, 0), WithinAbs(2.0 / 3.0, 1e-15));
  CHECK_THAT(free_resolvent_entry(Line::whole, 2.5, 0, 2), WithinAbs(1.0 / 6.0, 1e-15));
  CHECK(half_line_resolvent_at_edge(3, 7) == 3);
  CHECK(half_line_resolvent_at_edge(5, 2) == 2);
  CHECK_THROWS_AS(free_resolvent_entry(Line::whole, 2.0, 0, 0), DomainError);
  CHECK_THROWS_AS(free_resolvent_entry(Line::half, 2.5, 0, 1), DomainError);

  // half-line closed form vs its definition (mu^{-min} - mu^{min}) mu^{max} / w
  const auto bp = BandParameter::from_beta(2.5);
  for (long n = 1; n <= 5; ++n)
    for (long m = 1; m <= 5; ++m) {
      const double lo = std::min(n, m), hi = std::max(n, m);
      const double direct = (std::pow(bp.mu, -lo) - std::pow(bp.mu, lo)) * std::pow(bp.mu, hi) / bp.w;
      CHECK_THAT(free_resolvent_entry(Line::half, 2.5, n, m), WithinAbs(direct, 1e-14));
    }
  // half-line entries approach min(n, m) as beta -> 2
  CHECK_THAT(free_resolvent_entry(Line::half, 2.0 + 1e-12, 3, 7), WithinAbs(3.0, 1e-4));
}

TEST_CASE("kernels") {
  SECTION("L_mu rank one at mu = 1") {
    const auto k = build_L_mu({{0, 1.0}, {1, 4.0}}, 1.0);
    CHECK_THAT(k.matrix(0, 0), WithinAbs(1.0, 1e-15));
    CHECK_THAT(k.matrix(0, 1), WithinAbs(2.0, 1e-15));
    CHECK_THAT(k.matrix(1, 1), WithinAbs(4.0, 1e-15));
    CHECK_THAT(partial_sums_S(k.matrix, 1, Sign::plus), WithinAbs(5.0, 1e-13));
    CHECK_THAT(partial_sums_S(k.matrix, 1, Sign::minus), WithinAbs(0.0, 1e-13));
  }
  SECTION("K2 and K_beta") {
    const auto k2 = build_K2_bargmann({{1, 2.0}});
    CHECK(k2.matrix(0, 0) == 2.0);
    const auto kb = build_K_beta({{0, 1.0}}, 2.5);
    CHECK_THAT(kb.matrix(0, 0), WithinAbs(1.0 / 1.5, 1e-15));
    // K_beta = L_mu / w
    std::map<long, double> b{{0, 0.3}, {2, 1.1}, {3, 2.0}};
    const auto kk = build_K_beta(b, 2.7);
    const auto bp = BandParameter::from_beta(2.7);
    CHECK((kk.matrix - build_L_mu(b, bp.mu).matrix / bp.w).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(build_bs_kernel(KernelKind::K_beta, b, 2.7).matrix == kk.matrix);
  }
  SECTION("errors") {
    CHECK_THROWS_AS(build_L_mu({{0, -1.0}}, 0.5), InvalidParameters);
    CHECK_THROWS_AS(build_L_mu({{0, 1.0}}, 1.5), InvalidParameters);
    CHECK_THROWS_AS(build_K_beta({{0, 1.0}}, 1.0), DomainError);
  }
  SECTION("PSD and exact trace of K2 on rationals") {
    SampleRng rng(3, 0);
    for (int t = 0; t < 30; ++t) {
      std::map<long, double> b;
      for (long n = 1; n <= 6; ++n) b[n] = static_cast<double>(rng.integer(0, 8)) / 4.0;
      double sum = 0.0;
      for (const auto& [n, v] : b) sum += static_cast<double>(n) * v;
      const auto k2 = build_K2_bargmann(b);
      CHECK(k2.matrix.trace() == sum);
      for (const auto& k : {k2, build_L_mu(b, 0.7), build_K_beta(b, 2.2, Line::half)}) {
        const auto ev = symmetric_eigenvalues(k.matrix);
        CHECK(ev[0] >= -1e-12 * std::max(1.0, k.matrix.trace()));
        CHECK((k.matrix - k.matrix.transpose()).norm() == 0.0);
      }
    }
  }
}

TEST_CASE("partial sums") {
  SampleRng rng(4, 0);
  Eigen::MatrixXd m(8, 8);
  for (int i = 0; i < 8; ++i)
    for (int j = i; j < 8; ++j) m(i, j) = m(j, i) = rng.uniform(-1.0, 1.0);
  const auto eig = dense_eigs_oracle(m);
  CHECK_THAT(partial_sums_S(m, 3, Sign::plus), WithinAbs(eig[7] + eig[6] + eig[5], 1e-12));
  CHECK_THAT(partial_sums_S(m, 3, Sign::minus), WithinAbs(eig[0] + eig[1] + eig[2], 1e-12));
  CHECK_THAT(partial_sums_S(m, 8, Sign::plus), WithinAbs(m.trace(), 1e-12));
  CHECK_THAT(partial_sums_S(m, 8, Sign::minus), WithinAbs(m.trace(), 1e-12));
  CHECK_THROWS_AS(partial_sums_S(m, 0, Sign::plus), InvalidParameters);
  CHECK_THROWS_AS(partial_sums_S(m, 9, Sign::plus), InvalidParameters);
}

TEST_CASE("monotonicity of S_n in mu") {
  std::vector<double> grid;
  for (int i = 1; i <= 5; ++i) grid.push_back(0.2 * i);
  CHECK(check_monotone_S({{0, 1.0}, {1, 1.0}}, grid, {1, 2}) >= -1e-12);
  CHECK_THAT(check_monotone_S({{3, 2.0}}, grid, {1}), WithinAbs(0.0, 1e-15));
  CHECK_THROWS_AS(check_monotone_S({{0, 1.0}}, {0.5, 0.2}, {1}), InvalidParameters);
}

TEST_CASE("fixed point of the Birman-Schwinger kernel") {
  CHECK(check_fixed_point(Perturbation(LineKind::whole_line, {}, {{0, 1.0}}), 1.5) <= 1e-10);
  CHECK(check_fixed_point(Perturbation(LineKind::whole_line, {}, {{0, 1.0}, {1, 1.0}}), 2.0) <= 1e-8);
  CHECK_THROWS_AS(check_fixed_point(Perturbation(), 1.0), NoEigenvalues);
  CHECK_THROWS_AS(check_fixed_point(Perturbation(LineKind::whole_line, {}, {{0, -1.0}}), 1.0), InvalidParameters);
}

TEST_CASE("sqrt(E^2 - 4) equals the top eigenvalues of L_mu") {
  EnsembleConfig cfg;
  cfg.seed = 31;
  cfg.samples = 20;
  cfg.a_min = cfg.a_max = 1.0;
  cfg.sign = SignPolicy::positive;
  for (const auto& spec : random_ensemble(cfg)) {
    const auto rep = discrete_spectrum(spec);
    for (std::size_t j = 0; j < rep.plus.size(); ++j) {
      if (rep.plus[j] < 2.0 + 1e-6) continue;
      const auto bp = BandParameter::from_beta(rep.plus[j]);
      const auto ev = symmetric_eigenvalues(build_L_mu(spec.b_entries(), bp.mu).matrix);
      CHECK_THAT(ev[ev.size() - 1 - static_cast<Eigen::Index>(j)], WithinAbs(band_functional(rep.plus[j]), 1e-8));
    }
  }
}

TEST_CASE("resolvent domination for a_n <= 1") {
  CHECK_THAT(resolvent_domination_check({}, 2.5, 6), WithinAbs(0.0, 1e-15));
  CHECK(resolvent_domination_check({{1, 0.5}}, 2.5, 8) >= 0.0);
  SampleRng rng(12, 0);
  for (int t = 0; t < 20; ++t) {
    std::map<long, double> a;
    const long s = rng.integer(1, 6);
    for (long n = 1; n <= s; ++n) a[n] = rng.uniform(0.05, 1.0);
    for (double beta : {2.1, 2.5, 3.0}) CHECK(resolvent_domination_check(a, beta, 8) >= -1e-10);
  }
  CHECK_THROWS_AS(resolvent_domination_check({{1, 1.5}}, 2.5, 5), InvalidParameters);
  CHECK_THROWS_AS(resolvent_domination_check({{1, 0.5}}, 2.0, 5), DomainError);
}

TEST_CASE("Bargmann counting chain") {
  EnsembleConfig cfg;
  cfg.seed = 55;
  cfg.samples = 25;
  cfg.kind = LineKind::half_line;
  cfg.a_min = cfg.a_max = 1.0;
  cfg.sign = SignPolicy::positive;
  for (const auto& spec : random_ensemble(cfg)) {
    for (double beta : {2.05, 2.5, 4.0}) {
      const auto c = bargmann_chain(spec, beta);
      CHECK(c.eigenvalues_above <= c.kernel_eigenvalues_ge_one);
      CHECK(static_cast<double>(c.kernel_eigenvalues_ge_one) <= c.trace_k_beta + 1e-12);
      CHECK(c.trace_k_beta <= c.trace_k2 + 1e-12);
      CHECK_THAT(c.trace_k2, WithinAbs(c.sum_n_b, 1e-12 * std::max(1.0, c.sum_n_b)));
    }
  }
}
