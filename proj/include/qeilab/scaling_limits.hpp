#ifndef QEILAB_SCALING_LIMITS_HPP
#define QEILAB_SCALING_LIMITS_HPP

#include <complex>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "qeilab/fock_models.hpp"

namespace qeilab::scaling {

/// Test function on a one-dimensional flat chart with a lazily accumulated
/// contraction scale, so that composing pushforwards multiplies scales
/// exactly and the semigroup law holds on shared grid nodes.
class ChartTestFunction {
 public:
  /// Smooth compactly supported profile exp(-1/(1-s^2)) on [-radius, radius].
  static ChartTestFunction bump(double radius, std::size_t samples = 2001);
  static ChartTestFunction from_samples(std::vector<double> values, double radius);

  double support_radius() const { return lambda_ * r0_; }
  double scale() const { return lambda_; }
  bool nonnegative() const { return nonneg_; }

  std::size_t size() const { return base_.size(); }
  double node(std::size_t i) const { return lambda_ * (-r0_ + dx0_ * static_cast<double>(i)); }
  double dx() const { return lambda_ * dx0_; }
  double sample(std::size_t i) const { return prefactor_ * base_[i]; }

  double value(double x) const;
  /// ∫ f dx on the natural grid (exact under the change of variables).
  double integral() const;
  /// ∫ f(x) e^{ikx} dx.
  std::complex<double> ft(double k) const;

  /// (sigma_lambda* f)(x) = f(x / lambda); lambda in (0, 1].
  ChartTestFunction pushforward(double lambda) const;

  /// f_lambda = lambda^{-1} sigma_lambda* (f / ∫f); integrates to one
  /// exactly and tends to a delta at the origin as lambda -> 0+.
  ChartTestFunction delta_scaled(double lambda) const;

 private:
  std::vector<double> base_;
  double r0_ = 1.0;
  double dx0_ = 0.0;
  double lambda_ = 1.0;
  double prefactor_ = 1.0;
  bool nonneg_ = true;
};

inline ChartTestFunction pushforward(const ChartTestFunction& f, double lambda) {
  return f.pushforward(lambda);
}
inline ChartTestFunction delta_family(const ChartTestFunction& f, double lambda) {
  return f.delta_scaled(lambda);
}

/// Provider of smeared n-point functionals omega^(n)(f^{(x) n}) for n <= 3
/// over the chart.
class ScalingModel {
 public:
  virtual ~ScalingModel() = default;
  virtual std::string tag() const = 0;
  virtual double omega_n(int n, const ChartTestFunction& f) const = 0;
  /// false when evaluation leaves the model's resolved regime (e.g. a mode
  /// cutoff saturates); sequences are still produced, flagged out of window.
  virtual bool in_window(const ChartTestFunction& /*f*/) const { return true; }
};

/// omega^(2)(f (x) g) = C ∫_0^inf dk k^{2h-1} conj(f̂(k)) ĝ(k), C > 0, h > 0:
/// positive type and positive frequency by construction; omega^(1) and
/// omega^(3) vanish.
class HomogeneousModel : public ScalingModel {
 public:
  HomogeneousModel(double h, double c);
  std::string tag() const override;
  double omega_n(int n, const ChartTestFunction& f) const override;
  double exponent() const { return h_; }

 private:
  double h_, c_;
};

/// Adapter presenting a truncated box model as a scaling-model provider:
/// T(f) = ∫ dt f(t) :T00:(t, x0) and omega^(n) = <vac| T(f)^n vac>.
class FockAdapterModel : public ScalingModel {
 public:
  FockAdapterModel(std::shared_ptr<fock::TruncatedFockSpace> space, double x0 = 0.0,
                   double window_fraction = 0.1);
  std::string tag() const override;
  double omega_n(int n, const ChartTestFunction& f) const override;
  bool in_window(const ChartTestFunction& f) const override;

 private:
  fock::FieldOperatorMatrix smear(const ChartTestFunction& f) const;
  std::shared_ptr<fock::TruncatedFockSpace> space_;
  double x0_;
  double window_fraction_;
  double omega_max_ = 0.0;
};

struct LambdaGrid {
  std::vector<double> values;  // strictly decreasing in (0, 1]
  static LambdaGrid geometric(double start, double stop, std::size_t count);
};

/// omega^(n)(sigma_lambda* f^{(x) n}) for each lambda.
std::vector<double> scaling_sequence(const ScalingModel& model, const ChartTestFunction& f, int n,
                                     const LambdaGrid& grid);

struct ScalingFit {
  std::vector<double> lambdas;
  std::vector<double> n_values;  // N(lambda), N(1) = 1
  double alpha = 0.0;
  int chart_dim = 1;
  double dimension = 0.0;  // chart_dim + alpha
  double residual = 0.0;
  bool degenerate = false;

  nlohmann::json to_json() const;
};

/// N(lambda) = omega^(2)(sigma_lambda* f^{(x)2})^{-1/2} normalised to
/// N(1) = 1; alpha from the log-log least-squares slope.
ScalingFit fit_n_alpha(const ScalingModel& model, const ChartTestFunction& f,
                       const LambdaGrid& grid, int chart_dim = 1);

struct VanishingReport {
  std::vector<double> lambda_pow_d_times_n;  // lambda^D N(lambda) along the grid
  bool decreasing_final_decade = false;
  double final_over_initial = 0.0;

  nlohmann::json to_json() const;
};

/// Checks that lambda^D N(lambda) decreases toward zero along the grid;
/// requires a strictly positive canonical dimension.
VanishingReport check_vanishing(const ScalingFit& fit);

struct TrajectoryPoint {
  double lambda;
  double zeta;
  double eta_over_zeta;
  double egj_bound;
  bool in_window;
};

/// zeta_lambda^2 = omega^(2)(f_lambda^{(x)2}), eta_lambda =
/// omega^(3)(f_lambda^{(x)3}) / (2 zeta^2), and the negative-energy bound
/// eta - sqrt(eta^2 + zeta^2) per lambda, with f_lambda the delta family.
std::vector<TrajectoryPoint> zeta_eta_trajectory(const ScalingModel& model,
                                                 const ChartTestFunction& f,
                                                 const LambdaGrid& grid);

void write_trajectory_csv(const std::vector<TrajectoryPoint>& traj, const ScalingFit& fit,
                          const std::string& path);

}  // namespace qeilab::scaling

#endif
