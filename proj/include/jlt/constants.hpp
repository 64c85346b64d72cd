#pragma once

// Lieb-Thirring type constants and the Aizenman-Lieb lifting identity.

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "jlt/core.hpp"

namespace jlt {

// d_p = (1/2) Gamma(p+1)/Gamma(p+3/2) * Gamma(2)/Gamma(3/2)
inline double lt_constant_d(double p) {
  if (!(p >= 0.0)) throw InvalidParameters("d_p needs p >= 0");
  return 0.5 * std::tgamma(p + 1.0) / std::tgamma(p + 1.5) * std::tgamma(2.0) / std::tgamma(1.5);
}

// c_p = 3^{p-1/2} d_p, the moment constant for p >= 1/2 with general a_n.
inline double lt_constant_c(double p) { return std::pow(3.0, p - 0.5) * lt_constant_d(p); }

// C_{p,alpha} = Gamma(p+1) / (Gamma(p-alpha) Gamma(alpha+1)), 0 <= alpha < p.
inline double aizenman_lieb_constant(double p, double alpha) {
  if (!(alpha >= 0.0) || !(alpha < p)) throw InvalidParameters("C_{p,alpha} needs 0 <= alpha < p");
  return std::tgamma(p + 1.0) / (std::tgamma(p - alpha) * std::tgamma(alpha + 1.0));
}

// Semiclassical constant L^cl_{p,nu} = 2^{-nu} pi^{-nu/2} Gamma(p+1)/Gamma(p+1+nu/2).
// nu = 0 is accepted (value 1) since the stripped-dimension bounds use it.
inline double classical_constant(double p, int nu) {
  if (!(p >= 0.0)) throw InvalidParameters("classical constant needs p >= 0");
  if (nu < 0) throw InvalidParameters("classical constant needs nu >= 0");
  return std::pow(2.0, -nu) * std::pow(std::numbers::pi, -0.5 * nu) * std::tgamma(p + 1.0) /
         std::tgamma(p + 1.0 + 0.5 * nu);
}

// |a_+^p - C_{p,alpha} int_0^inf (a-r)_+^alpha r^{p-alpha-1} dr|, the integral
// taken over [0, a_+] by tanh-sinh quadrature (endpoint singularities allowed).
inline double aizenman_lieb_residual(double p, double alpha, double a) {
  const double c = aizenman_lieb_constant(p, alpha);
  const double ap = positive_part(a);
  if (ap == 0.0) return 0.0;
  boost::math::quadrature::tanh_sinh<double> integrator;
  auto f = [&](double r, double rc) {
    // rc is the distance to the nearer endpoint; use it for (a - r) near a.
    const double dist_to_a = (r > 0.5 * ap) ? rc : ap - r;
    if (dist_to_a <= 0.0 || r <= 0.0) return 0.0;
    return std::pow(dist_to_a, alpha) * std::pow(r, p - alpha - 1.0);
  };
  const double integral = integrator.integrate(f, 0.0, ap);
  return std::abs(std::pow(ap, p) - c * integral);
}

}  // namespace jlt
