#ifndef QEILAB_TESTS_ORACLE_HELPERS_HPP
#define QEILAB_TESTS_ORACLE_HELPERS_HPP

// Reference implementations used as independent oracles.  These deliberately
// avoid the code paths they check: the Bessel evaluation goes through the
// integral representation, the eigenvalue reference through a shooting
// method, and the integrators are plain composite rules written out here.

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace oracle {

// plain composite trapezoid, independent of the library quadrature
template <class F>
double trapezoid(F&& f, double a, double b, std::size_t n) {
  const double h = (b - a) / static_cast<double>(n);
  double acc = 0.5 * (f(a) + f(b));
  for (std::size_t i = 1; i < n; ++i) acc += f(a + h * static_cast<double>(i));
  return acc * h;
}

// Richardson-refined trapezoid (Romberg step) for smooth integrands
template <class F>
double romberg2(F&& f, double a, double b, std::size_t n) {
  const double c = trapezoid(f, a, b, n);
  const double d = trapezoid(f, a, b, 2 * n);
  return d + (d - c) / 3.0;
}

// K_0 via the integral representation K_0(x) = \int_0^inf e^{-x cosh t} dt,
// truncated where the integrand underflows.
inline double k0_reference(double x) {
  if (!(x > 0.0)) return std::numeric_limits<double>::infinity();
  const double tmax = std::acosh(746.0 / x) + 1.0;
  auto f = [x](double t) { return std::exp(-x * std::cosh(t)); };
  return romberg2(f, 0.0, tmax, 4000);
}

// Ground-state eigenvalue by bidirectional shooting with matching at the
// origin: integrates u'' = (V - lambda) u from both walls and bisects on the
// Wronskian mismatch of the lowest even/odd-free candidate.
inline double shooting_ground_state(const std::function<double(double)>& v, double r, double h,
                                    double lo, double hi) {
  auto mismatch = [&](double lambda) {
    // RK4 on (u, u') from -r and +r toward 0
    auto step = [&](double t, double dir, double& u, double& up) {
      auto f = [&](double tt, double uu) { return (v(tt) - lambda) * uu; };
      const double k1u = up, k1p = f(t, u);
      const double k2u = up + 0.5 * dir * h * k1p, k2p = f(t + 0.5 * dir * h, u + 0.5 * dir * h * k1u);
      const double k3u = up + 0.5 * dir * h * k2p, k3p = f(t + 0.5 * dir * h, u + 0.5 * dir * h * k2u);
      const double k4u = up + dir * h * k3p, k4p = f(t + dir * h, u + dir * h * k3u);
      u += dir * h * (k1u + 2 * k2u + 2 * k3u + k4u) / 6.0;
      up += dir * h * (k1p + 2 * k2p + 2 * k3p + k4p) / 6.0;
    };
    double ul = 0.0, upl = 1.0, t = -r;
    const auto nsteps = static_cast<std::size_t>(std::llround(r / h));
    for (std::size_t i = 0; i < nsteps; ++i) {
      step(t, +1.0, ul, upl);
      t += h;
      const double m = std::max(std::abs(ul), std::abs(upl));
      if (m > 1e200) {
        ul /= m;
        upl /= m;
      }
    }
    double ur = 0.0, upr = -1.0;
    t = r;
    for (std::size_t i = 0; i < nsteps; ++i) {
      step(t, -1.0, ur, upr);
      t -= h;
      const double m = std::max(std::abs(ur), std::abs(upr));
      if (m > 1e200) {
        ur /= m;
        upr /= m;
      }
    }
    return upl * ur - upr * ul;  // Wronskian mismatch at 0
  };
  // the mismatch changes sign exactly at eigenvalues; bracket the lowest
  double flo = mismatch(lo);
  double a = lo, b = hi;
  const int scan = 200;
  double prev = flo, pa = lo;
  bool bracketed = false;
  for (int i = 1; i <= scan; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / scan;
    const double fx = mismatch(x);
    if ((prev < 0) != (fx < 0)) {
      a = pa;
      b = x;
      bracketed = true;
      break;
    }
    prev = fx;
    pa = x;
  }
  if (!bracketed) return std::numeric_limits<double>::quiet_NaN();
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (a + b);
    const double fm = mismatch(mid);
    if ((mismatch(a) < 0) != (fm < 0))
      b = mid;
    else
      a = mid;
  }
  return 0.5 * (a + b);
}

}  // namespace oracle

#endif
