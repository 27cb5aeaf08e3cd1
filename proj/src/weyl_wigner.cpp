#include "qeilab/weyl_wigner.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace qeilab::phase {

namespace {
constexpr double kPi = std::numbers::pi;

void validate_grid(const PhaseGrid& g) {
  if (!(g.x_max > 0.0) || g.nx < 8 || g.nx % 2 != 0 || !(g.hbar > 0.0))
    throw std::invalid_argument("invalid phase grid: need x_max > 0, even nx >= 8, hbar > 0");
}
}  // namespace

// ---------------------------------------------------------------------------
// PhaseSpaceSymbol

PhaseSpaceSymbol PhaseSpaceSymbol::from_function(const std::function<double(double, double)>& f,
                                                 const PhaseGrid& grid) {
  validate_grid(grid);
  PhaseSpaceSymbol s;
  s.grid_ = grid;
  s.values_.resize(grid.refined_points(), grid.np());
  s.min_ = std::numeric_limits<double>::infinity();
  s.max_abs_ = 0.0;
  for (int r = 0; r < grid.refined_points(); ++r) {
    const double x = grid.half_x(r);
    for (int l = 0; l < grid.np(); ++l) {
      const double v = f(x, grid.p(l));
      if (!std::isfinite(v)) throw std::invalid_argument("symbol values must be finite");
      s.values_(r, l) = v;
      s.min_ = std::min(s.min_, v);
      s.max_abs_ = std::max(s.max_abs_, std::abs(v));
    }
  }
  return s;
}

double PhaseSpaceSymbol::p_tail_fraction() const {
  if (max_abs_ == 0.0) return 0.0;
  double edge = 0.0;
  const int last = grid_.np() - 1;
  for (int r = 0; r < grid_.refined_points(); ++r)
    edge = std::max({edge, std::abs(values_(r, 0)), std::abs(values_(r, last))});
  return edge / max_abs_;
}

void PhaseSpaceSymbol::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << "x,p,value\n";
  char buf[96];
  for (int i = 0; i < grid_.nx; ++i)
    for (int l = 0; l < grid_.np(); ++l) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", grid_.x(i), grid_.p(l), at(i, l));
      out << buf;
    }
}

// ---------------------------------------------------------------------------
// WaveFunction

WaveFunction WaveFunction::from_function(const std::function<std::complex<double>(double)>& f,
                                         const PhaseGrid& grid) {
  validate_grid(grid);
  WaveFunction w;
  w.grid_ = grid;
  w.samples_.resize(grid.refined_points());
  for (int s = 0; s < grid.refined_points(); ++s) w.samples_(s) = f(grid.half_x(s));
  const double norm2 = w.samples_.squaredNorm() * (0.5 * grid.dx());
  if (!(norm2 > 0.0)) throw std::invalid_argument("wave function must be nonzero");
  w.samples_ /= std::sqrt(norm2);
  w.boundary_max_ = std::max(std::abs(w.samples_(0)), std::abs(w.samples_(grid.refined_points() - 1)));
  return w;
}

double WaveFunction::momentum_density(double p) const {
  std::complex<double> acc{0.0, 0.0};
  const double h = grid_.hbar;
  for (int s = 0; s < grid_.refined_points(); ++s) {
    const double ph = -p * grid_.half_x(s) / h;
    acc += samples_(s) * std::complex<double>{std::cos(ph), std::sin(ph)};
  }
  acc *= 0.5 * grid_.dx();
  return std::norm(acc) / (2.0 * kPi * h);
}

WaveFunction harmonic_eigenstate(int n, const PhaseGrid& grid) {
  if (n < 0) throw std::invalid_argument("state index must be nonnegative");
  const double h = grid.hbar;
  return WaveFunction::from_function(
      [n, h](double x) -> std::complex<double> {
        const double xi = x / std::sqrt(h);
        double h0 = std::pow(kPi, -0.25) * std::exp(-0.5 * xi * xi);
        if (n == 0) return h0;
        double h1 = std::sqrt(2.0) * xi * h0;
        for (int k = 2; k <= n; ++k) {
          const double h2 = std::sqrt(2.0 / k) * xi * h1 - std::sqrt((k - 1.0) / k) * h0;
          h0 = h1;
          h1 = h2;
        }
        return h1;
      },
      grid);
}

// ---------------------------------------------------------------------------
// Quantisation

Eigen::MatrixXcd weyl_quantize(const PhaseSpaceSymbol& f, bool strict_p_support) {
  const PhaseGrid& g = f.grid();
  if (strict_p_support && f.p_tail_fraction() > 1e-10)
    throw std::invalid_argument("p-support overflow: symbol has weight at the momentum boundary");

  const int n = g.nx;
  const int np = g.np();
  // phase table e^{i p_l d dx / hbar}; with the DFT-dual grid this is
  // e^{i 2 pi (l - n/2) d / n}
  std::vector<std::complex<double>> phases(static_cast<std::size_t>(np) * (2 * n - 1));
  for (int l = 0; l < np; ++l)
    for (int d = -(n - 1); d <= n - 1; ++d) {
      const double ph = g.p(l) * d * g.dx() / g.hbar;
      phases[static_cast<std::size_t>(l) * (2 * n - 1) + static_cast<std::size_t>(d + n - 1)] = {std::cos(ph), std::sin(ph)};
    }

  Eigen::MatrixXcd k(n, n);
  const double pref = g.dp() / (2.0 * kPi * g.hbar);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int s = i + j;
      const int d = i - j;
      std::complex<double> acc{0.0, 0.0};
      for (int l = 0; l < np; ++l)
        acc += f.at_half(s, l) * phases[static_cast<std::size_t>(l) * (2 * n - 1) + static_cast<std::size_t>(d + n - 1)];
      k(i, j) = pref * acc;
    }
  }
  return k;
}

// ---------------------------------------------------------------------------
// Wigner transform

WignerFunction wigner(const WaveFunction& psi) {
  const PhaseGrid& g = psi.grid();
  const int n = g.nx;
  const int np = g.np();
  const int nr = g.refined_points();

  WignerFunction w;
  w.grid = g;
  w.values.resize(n, np);
  w.boundary_warning = psi.boundary_max();

  // y_m = m dx / hbar over refined half-steps; dy = dx / hbar
  const int mrange = nr - 1;
  std::vector<std::complex<double>> phases(static_cast<std::size_t>(np) * (2 * mrange + 1));
  for (int l = 0; l < np; ++l)
    for (int m = -mrange; m <= mrange; ++m) {
      const double ph = g.p(l) * m * g.dx() / g.hbar;
      phases[static_cast<std::size_t>(l) * (2 * mrange + 1) + static_cast<std::size_t>(m + mrange)] = {std::cos(ph), std::sin(ph)};
    }

  const double dy = g.dx() / g.hbar;
  double max_imag = 0.0;
  for (int i = 0; i < n; ++i) {
    const int s = 2 * i;
    const int mmax = std::min(s, nr - 1 - s);
    for (int l = 0; l < np; ++l) {
      std::complex<double> acc{0.0, 0.0};
      const std::complex<double>* ph = &phases[static_cast<std::size_t>(l) * (2 * mrange + 1) + static_cast<std::size_t>(mrange)];
      for (int m = -mmax; m <= mmax; ++m)
        acc += ph[m] * (std::conj(psi.at_half(s + m)) * psi.at_half(s - m));
      acc *= dy;
      w.values(i, l) = acc.real();
      max_imag = std::max(max_imag, std::abs(acc.imag()));
    }
  }
  w.max_imag = max_imag;
  return w;
}

double WignerFunction::normalization() const {
  return values.sum() * grid.dx() * grid.dp() / (2.0 * kPi);
}

double WignerFunction::position_marginal(int i) const {
  return values.row(i).sum() * grid.dp() / (2.0 * kPi);
}

double WignerFunction::momentum_marginal(int l) const {
  return values.col(l).sum() * grid.dx() / (2.0 * kPi);
}

void WignerFunction::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << "x,p,value\n";
  char buf[96];
  for (int i = 0; i < grid.nx; ++i)
    for (int l = 0; l < grid.np(); ++l) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", grid.x(i), grid.p(l), values(i, l));
      out << buf;
    }
}

// ---------------------------------------------------------------------------
// Expectations and the positivity defect

double expectation_via_wigner(const PhaseSpaceSymbol& f, const WaveFunction& psi) {
  const PhaseGrid& g = f.grid();
  if (g.nx != psi.grid().nx || g.x_max != psi.grid().x_max || g.hbar != psi.grid().hbar)
    throw std::invalid_argument("grid mismatch between symbol and state");
  const WignerFunction w = wigner(psi);
  double acc = 0.0;
  for (int i = 0; i < g.nx; ++i)
    for (int l = 0; l < g.np(); ++l) acc += f.at(i, l) * w.values(i, l);
  return acc * g.dx() * g.dp() / (2.0 * kPi);
}

double expectation_via_operator(const PhaseSpaceSymbol& f, const WaveFunction& psi) {
  const PhaseGrid& g = f.grid();
  if (g.nx != psi.grid().nx || g.x_max != psi.grid().x_max || g.hbar != psi.grid().hbar)
    throw std::invalid_argument("grid mismatch between symbol and state");
  const Eigen::MatrixXcd k = weyl_quantize(f);
  Eigen::VectorXcd coarse(g.nx);
  for (int i = 0; i < g.nx; ++i) coarse(i) = psi.at(i);
  const double norm2 = coarse.squaredNorm() * g.dx();
  const std::complex<double> v = coarse.dot(k * coarse) * g.dx() * g.dx();
  return v.real() / norm2;
}

double garding_constant(const PhaseSpaceSymbol& f) {
  if (f.min_value() < 0.0)
    throw std::invalid_argument("precondition: garding_constant needs a pointwise nonnegative symbol");
  const PhaseGrid& g = f.grid();
  const Eigen::MatrixXcd k = weyl_quantize(f);
  // operator matrix on l2(grid, dx): K dx
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es((k * g.dx()).eval());
  const double lmin = es.eigenvalues()(0);
  return std::max(0.0, -lmin);
}

}  // namespace qeilab::phase
