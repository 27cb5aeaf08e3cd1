#ifndef QEILAB_QUADRATURE_HPP
#define QEILAB_QUADRATURE_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace qeilab {

// Composite Simpson over a callable; n is rounded up to the next even count.
// Accumulation is sequential so results are bit-reproducible.
template <class F>
double simpson(F&& f, double a, double b, std::size_t n) {
  if (!(b > a)) return 0.0;
  if (n < 2) n = 2;
  if (n % 2 != 0) ++n;
  const double h = (b - a) / static_cast<double>(n);
  double odd = 0.0, even = 0.0;
  for (std::size_t i = 1; i < n; i += 2) odd += f(a + h * static_cast<double>(i));
  for (std::size_t i = 2; i < n; i += 2) even += f(a + h * static_cast<double>(i));
  return (h / 3.0) * (f(a) + f(b) + 4.0 * odd + 2.0 * even);
}

template <class F>
std::complex<double> simpson_complex(F&& f, double a, double b, std::size_t n) {
  if (!(b > a)) return {0.0, 0.0};
  if (n < 2) n = 2;
  if (n % 2 != 0) ++n;
  const double h = (b - a) / static_cast<double>(n);
  std::complex<double> odd{0.0, 0.0}, even{0.0, 0.0};
  for (std::size_t i = 1; i < n; i += 2) odd += f(a + h * static_cast<double>(i));
  for (std::size_t i = 2; i < n; i += 2) even += f(a + h * static_cast<double>(i));
  return (h / 3.0) * (f(a) + f(b) + 4.0 * odd + 2.0 * even);
}

// Simpson over uniformly spaced samples. An even sample count gets a
// trapezoid correction on the final cell.
inline double simpson_samples(std::span<const double> y, double dx) {
  const std::size_t n = y.size();
  if (n < 2) return 0.0;
  std::size_t m = n;
  double tail = 0.0;
  if (m % 2 == 0) {
    tail = 0.5 * dx * (y[m - 2] + y[m - 1]);
    --m;
  }
  double odd = 0.0, even = 0.0;
  for (std::size_t i = 1; i + 1 < m; i += 2) odd += y[i];
  for (std::size_t i = 2; i + 1 < m; i += 2) even += y[i];
  return (dx / 3.0) * (y[0] + y[m - 1] + 4.0 * odd + 2.0 * even) + tail;
}

// ∫_0^b f(u) du for integrands with an integrable (log-power) singularity
// at u = 0: substitute u = b e^{-v} and integrate the decaying smooth
// integrand over v ∈ [0, vmax].
template <class F>
double integrate_log_singular_at_zero(F&& f, double b, double vmax = 45.0,
                                      std::size_t n = 6000) {
  if (!(b > 0.0)) return 0.0;
  auto g = [&](double v) {
    const double u = b * std::exp(-v);
    return f(u) * u;  // du = -u dv
  };
  return simpson(g, 0.0, vmax, n);
}

// Richardson pair: value at step h and h/2 -> extrapolated value and an
// error estimate for the finer result (fourth-order rule assumed).
struct RichardsonResult {
  double value;
  double error_estimate;
};

inline RichardsonResult richardson4(double coarse, double fine) {
  const double extrap = fine + (fine - coarse) / 15.0;
  return {extrap, std::abs(fine - coarse) / 15.0};
}

}  // namespace qeilab

#endif
