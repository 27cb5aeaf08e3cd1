#ifndef QEILAB_SAMPLING_HPP
#define QEILAB_SAMPLING_HPP

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace qeilab::sampling {

/// Closed-form families of real sampling (weight) functions g(t), plus a
/// tabulated fallback.  Values are immutable after construction.
enum class SamplerKind { gaussian, lorentzian_sqrt, bump, tabulated };

std::string kind_name(SamplerKind k);
SamplerKind kind_from_name(const std::string& name);

struct Interval {
  double a = 0.0;
  double b = 0.0;
  double width() const { return b - a; }
};

/// Construction request.  tau is the width parameter for the non-compact
/// kinds; [a,b] is the bump support.  dt = 0 selects the per-kind default
/// grid.  amplitude is an overall scalar factor (normalisation is a caller
/// choice, never imposed here).
struct SamplerSpec {
  SamplerKind kind = SamplerKind::gaussian;
  double tau = 1.0;
  double a = -1.0;
  double b = 1.0;
  double dt = 0.0;
  double amplitude = 1.0;
};

class SamplingFunction {
 public:
  SamplerKind kind() const { return kind_; }
  double tau() const { return tau_; }
  double amplitude() const { return amplitude_; }
  Interval support() const { return support_; }
  double dt() const { return dt_; }
  double t0() const { return t0_; }
  const std::vector<double>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  double grid_time(std::size_t i) const { return t0_ + dt_ * static_cast<double>(i); }

  bool has_closed_form() const { return kind_ != SamplerKind::tabulated; }

  /// g(t): closed form for the built-in kinds, linear interpolation (zero
  /// outside the grid) for tabulated data.
  double value(double t) const;

  /// g'(t) evaluated directly; tabulated kinds use centred differences on
  /// the stored grid (one-sided at the ends).
  double derivative_value(double t) const;

  /// ∫ g(t)^2 dt, closed form when the kind admits one.
  double l2_norm_sq() const;

  /// ∫ |g'(t)|^2 dt.
  double derivative_l2_norm_sq() const;

  /// Samplewise derivative as a new sampling function (tabulated kind).
  SamplingFunction derivative() const;

  /// g_lambda(t) = g(lambda t); support rescales by 1/lambda.
  SamplingFunction scaled(double lambda) const;

  SamplingFunction with_amplitude(double amplitude) const;

  /// Characteristic width used for grid-resolution checks: tau for the
  /// non-compact kinds, the support width for bump/tabulated.
  double characteristic_width() const;

  static SamplingFunction tabulated(std::vector<double> times, std::vector<double> values);

  friend SamplingFunction make_sampler(const SamplerSpec& spec);
  friend class SpectralFunction;

 private:
  SamplingFunction() = default;
  void fill_grid();
  double closed_form(double t) const;
  double closed_form_derivative(double t) const;

  SamplerKind kind_ = SamplerKind::tabulated;
  double tau_ = 0.0;
  double amplitude_ = 1.0;
  Interval support_{};
  double t0_ = 0.0;
  double dt_ = 0.0;
  std::vector<double> samples_;
};

SamplingFunction make_sampler(const SamplerSpec& spec);
SamplingFunction make_gaussian(double tau, double dt = 0.0);
SamplingFunction make_lorentzian_sqrt(double tau, double dt = 0.0);
SamplingFunction make_bump(double a, double b, double dt = 0.0);

inline SamplingFunction derivative(const SamplingFunction& g) { return g.derivative(); }
SamplingFunction scale_family(const SamplingFunction& g, double lambda);

/// Uniform frequency grid request; du = umax = 0 selects per-kind defaults.
/// A half-offset grid places nodes at ±(j+1/2)du, avoiding u = 0 (needed for
/// spectra with a logarithmic singularity there).
struct FrequencyGrid {
  double du = 0.0;
  double umax = 0.0;
  std::optional<bool> offset;
};

/// Fourier transform in the convention  ĝ(u) = ∫ g(t) e^{iut} dt.
/// Closed forms are used where the kind admits one; otherwise composite
/// Simpson over the time grid.
class SpectralFunction {
 public:
  double du() const { return du_; }
  double umax() const { return umax_; }
  bool offset_grid() const { return offset_; }
  bool log_singular_at_zero() const { return singular_at_zero_; }

  std::size_t size() const { return values_.size(); }
  double frequency(std::size_t i) const;
  const std::vector<std::complex<double>>& values() const { return values_; }

  /// ĝ(u) at an arbitrary frequency (closed form or fresh quadrature; not
  /// interpolation, so consumers integrate the same object the grid samples).
  std::complex<double> value(double u) const;
  double abs2(double u) const;

  /// Relative Parseval residual |∫g² - (1/2π)∫|ĝ|²| / ∫g²  declared at
  /// construction time.
  double parseval_residual() const { return parseval_residual_; }
  double quadrature_tolerance() const { return quadrature_tolerance_; }

  /// Largest frequency-grid step that keeps bound integrals at the declared
  /// tolerance, and the window beyond which the spectral tail is negligible.
  double suggested_du() const { return suggested_du_; }
  double suggested_umax() const { return suggested_umax_; }

  const SamplingFunction& source() const { return source_; }

  friend SpectralFunction fourier_transform(const SamplingFunction& g, const FrequencyGrid& grid);

 private:
  SpectralFunction() = default;
  void compute_parseval();

  SamplingFunction source_;
  double du_ = 0.0;
  double umax_ = 0.0;
  bool offset_ = false;
  bool singular_at_zero_ = false;
  double parseval_residual_ = 0.0;
  double quadrature_tolerance_ = 1e-6;
  double suggested_du_ = 0.0;
  double suggested_umax_ = 0.0;
  std::vector<std::complex<double>> values_;
};

SpectralFunction fourier_transform(const SamplingFunction& g, const FrequencyGrid& grid = {});

/// Two-column CSV (t, g) with a one-line header.
void write_sampler_csv(const SamplingFunction& g, const std::string& path);
SamplingFunction load_sampler_csv(const std::string& path);

}  // namespace qeilab::sampling

#endif
