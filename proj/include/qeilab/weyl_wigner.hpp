#ifndef QEILAB_WEYL_WIGNER_HPP
#define QEILAB_WEYL_WIGNER_HPP

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <string>

namespace qeilab::phase {

/// One degree of freedom.  Position nodes x_i = -X + i dx (i < nx,
/// dx = 2X/nx); symbols and wave functions are stored on the half-step
/// refined grid r_s = -X + s dx/2 (2nx - 1 points) so that every midpoint
/// (x_i + x_j)/2 is a stored node.  The momentum grid spans the full DFT
/// band [-pi hbar/dx, pi hbar/dx) at half the dual spacing (np = 2 nx):
/// quantised multiplication operators stay exactly diagonal while the
/// kernel's alias period 2 np dp covers every grid separation, which keeps
/// positive quantisations positive on the grid.
struct PhaseGrid {
  double x_max = 8.0;
  int nx = 256;
  double hbar = 1.0;

  double dx() const { return 2.0 * x_max / nx; }
  int np() const { return 2 * nx; }
  double dp() const { return 3.14159265358979323846 * hbar / (nx * dx()); }
  double p_max() const { return nx * dp(); }
  double x(int i) const { return -x_max + i * dx(); }
  double half_x(int s) const { return -x_max + 0.5 * s * dx(); }
  double p(int l) const { return (l - nx) * dp(); }
  int refined_points() const { return 2 * nx - 1; }
};

/// Real phase-space symbol F(x, p) sampled on the refined grid.
class PhaseSpaceSymbol {
 public:
  static PhaseSpaceSymbol from_function(const std::function<double(double, double)>& f,
                                        const PhaseGrid& grid);

  const PhaseGrid& grid() const { return grid_; }
  /// value at refined x index s, momentum index l
  double at_half(int s, int l) const { return values_(s, l); }
  /// value at coarse x index i, momentum index l
  double at(int i, int l) const { return values_(2 * i, l); }
  double min_value() const { return min_; }
  double max_abs() const { return max_abs_; }

  /// Largest |F| on the outermost momentum columns relative to max |F|;
  /// symbols with genuine content there cannot be represented on the grid.
  double p_tail_fraction() const;

  void write_csv(const std::string& path) const;

 private:
  PhaseGrid grid_;
  Eigen::MatrixXd values_;  // (2nx-1) x np
  double min_ = 0.0;
  double max_abs_ = 0.0;
};

/// Complex wave function on the refined grid, unit norm under the grid
/// measure.  boundary_max reports max |psi| at the ends (truncation check).
class WaveFunction {
 public:
  static WaveFunction from_function(const std::function<std::complex<double>(double)>& f,
                                    const PhaseGrid& grid);

  const PhaseGrid& grid() const { return grid_; }
  const Eigen::VectorXcd& refined_samples() const { return samples_; }
  std::complex<double> at_half(int s) const { return samples_(s); }
  std::complex<double> at(int i) const { return samples_(2 * i); }
  double boundary_max() const { return boundary_max_; }

  /// |phi(p)|^2 of the momentum-space wave function (reference for the
  /// momentum marginal).
  double momentum_density(double p) const;

 private:
  PhaseGrid grid_;
  Eigen::VectorXcd samples_;
  double boundary_max_ = 0.0;
};

/// n-th harmonic-oscillator eigenstate of (x^2 + p^2)/2 at the grid's hbar.
WaveFunction harmonic_eigenstate(int n, const PhaseGrid& grid);

/// Kernel matrix K(x_i, x_j) = (1/2 pi hbar) sum_p F((x_i+x_j)/2, p)
/// e^{i p (x_i - x_j)/hbar} dp on the coarse grid.  The operator acts as
/// (F_w psi)(x_i) = sum_j K_ij psi_j dx; hermitian for real symbols.
/// Throws "p-support overflow" in strict mode when the symbol has weight at
/// the momentum boundary (unbounded symbols such as polynomials carry such
/// weight by construction and are quantised band-limited; use the default
/// non-strict mode for them).
Eigen::MatrixXcd weyl_quantize(const PhaseSpaceSymbol& f, bool strict_p_support = false);

/// Wigner function W(x, p) on the coarse-x / full-p grid; real part with the
/// largest imaginary residual reported.
struct WignerFunction {
  PhaseGrid grid;
  Eigen::MatrixXd values;  // nx x np
  double max_imag = 0.0;
  double boundary_warning = 0.0;  // max |psi| at the ends

  double min_value() const { return values.minCoeff(); }
  /// ∫ W dx dp / (2 pi)
  double normalization() const;
  /// ∫ W dp / (2 pi) at x index i
  double position_marginal(int i) const;
  /// ∫ W dx / (2 pi) at p index l
  double momentum_marginal(int l) const;
  void write_csv(const std::string& path) const;
};

WignerFunction wigner(const WaveFunction& psi);

/// Phase-space side of the expectation identity: ∫ F W dx dp / (2 pi).
double expectation_via_wigner(const PhaseSpaceSymbol& f, const WaveFunction& psi);

/// Operator side: <psi|F_w psi> / <psi|psi> on the coarse grid.
double expectation_via_operator(const PhaseSpaceSymbol& f, const WaveFunction& psi);

/// Sharp positivity defect of the quantisation of a pointwise nonnegative
/// symbol: C = max(0, -lambda_min(F_w)), so <F_w> >= -C for all grid states.
double garding_constant(const PhaseSpaceSymbol& f);

}  // namespace qeilab::phase

#endif
