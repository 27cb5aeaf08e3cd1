#include "qeilab/scaling_limits.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "qeilab/quadrature.hpp"

namespace qeilab::scaling {

namespace {
constexpr double kPi = std::numbers::pi;
}

// ---------------------------------------------------------------------------
// ChartTestFunction

ChartTestFunction ChartTestFunction::bump(double radius, std::size_t samples) {
  if (!(radius > 0.0)) throw std::invalid_argument("invalid test function: radius must be positive");
  if (samples < 33) samples = 33;
  if (samples % 2 == 0) ++samples;
  ChartTestFunction f;
  f.r0_ = radius;
  f.dx0_ = 2.0 * radius / static_cast<double>(samples - 1);
  f.base_.resize(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    const double s = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(samples - 1);
    const double s2 = s * s;
    f.base_[i] = s2 < 1.0 ? std::exp(-1.0 / (1.0 - s2)) : 0.0;
  }
  f.nonneg_ = true;
  return f;
}

ChartTestFunction ChartTestFunction::from_samples(std::vector<double> values, double radius) {
  if (!(radius > 0.0) || values.size() < 3)
    throw std::invalid_argument("invalid test function: need radius > 0 and >= 3 samples");
  if (values.size() % 2 == 0) values.push_back(0.0);
  ChartTestFunction f;
  f.r0_ = radius;
  f.dx0_ = 2.0 * radius / static_cast<double>(values.size() - 1);
  f.nonneg_ = std::all_of(values.begin(), values.end(), [](double v) { return v >= 0.0; });
  f.base_ = std::move(values);
  return f;
}

double ChartTestFunction::value(double x) const {
  const double r = support_radius();
  if (std::abs(x) >= r) return 0.0;
  const double u = (x / lambda_ + r0_) / dx0_;
  const auto i = static_cast<std::size_t>(std::clamp(std::floor(u), 0.0, static_cast<double>(base_.size() - 2)));
  const double w = u - static_cast<double>(i);
  return prefactor_ * ((1.0 - w) * base_[i] + w * base_[i + 1]);
}

double ChartTestFunction::integral() const {
  return prefactor_ * lambda_ * simpson_samples(base_, dx0_);
}

std::complex<double> ChartTestFunction::ft(double k) const {
  std::vector<double> re(base_.size()), im(base_.size());
  for (std::size_t i = 0; i < base_.size(); ++i) {
    const double x = node(i);
    re[i] = base_[i] * std::cos(k * x);
    im[i] = base_[i] * std::sin(k * x);
  }
  const double w = prefactor_ * lambda_;
  return {w * simpson_samples(re, dx0_), w * simpson_samples(im, dx0_)};
}

ChartTestFunction ChartTestFunction::pushforward(double lambda) const {
  if (!(lambda > 0.0) || lambda > 1.0)
    throw std::invalid_argument("precondition: pushforward scale must lie in (0, 1]");
  ChartTestFunction out = *this;
  out.lambda_ *= lambda;
  return out;
}

ChartTestFunction ChartTestFunction::delta_scaled(double lambda) const {
  if (!nonneg_)
    throw std::invalid_argument("precondition: the delta family needs a nonnegative test function");
  const double mass = integral();
  if (!(mass > 0.0)) throw std::invalid_argument("precondition: test function must have positive mass");
  ChartTestFunction out = pushforward(lambda);
  out.prefactor_ /= mass * lambda;
  return out;
}

// ---------------------------------------------------------------------------
// Models

HomogeneousModel::HomogeneousModel(double h, double c) : h_(h), c_(c) {
  if (!(h > 0.0) || !(c > 0.0))
    throw std::invalid_argument("invalid homogeneous model: need h > 0 and C > 0");
}

std::string HomogeneousModel::tag() const {
  char buf[64];
  std::snprintf(buf, sizeof buf, "homogeneous(h=%g,C=%g)", h_, c_);
  return buf;
}

double HomogeneousModel::omega_n(int n, const ChartTestFunction& f) const {
  if (n < 1 || n > 3) throw std::invalid_argument("model supplies n in {1,2,3}");
  if (n != 2) return 0.0;
  const double r = f.support_radius();
  const double kmax = 200.0 / r;
  auto integrand = [&](double k) { return std::pow(k, 2.0 * h_ - 1.0) * std::norm(f.ft(k)); };
  double acc = 0.0;
  if (2.0 * h_ - 1.0 < 0.0) {
    const double ks = std::min(1.0 / r, kmax / 2.0);
    acc += integrate_log_singular_at_zero(integrand, ks, 45.0, 2000);
    acc += simpson(integrand, ks, kmax, 6000);
  } else {
    acc = simpson(integrand, 0.0, kmax, 8000);
  }
  return c_ * acc;
}

FockAdapterModel::FockAdapterModel(std::shared_ptr<fock::TruncatedFockSpace> space, double x0,
                                   double window_fraction)
    : space_(std::move(space)), x0_(x0), window_fraction_(window_fraction) {
  if (!space_) throw std::invalid_argument("fock adapter needs a space");
  for (int n : space_->modes()) omega_max_ = std::max(omega_max_, space_->mode_basis().energy(n));
}

std::string FockAdapterModel::tag() const { return "fock-adapter"; }

fock::FieldOperatorMatrix FockAdapterModel::smear(const ChartTestFunction& f) const {
  fock::WeightHat hat = [&f](double omega) { return f.ft(omega); };
  return fock::smeared_t00(*space_, hat, x0_, "T(f)");
}

double FockAdapterModel::omega_n(int n, const ChartTestFunction& f) const {
  if (n < 1 || n > 3) throw std::invalid_argument("model supplies n in {1,2,3}");
  const fock::FieldOperatorMatrix a = smear(f);
  const Eigen::VectorXcd w1 = a.vacuum_image();
  if (n == 1) return 0.0;  // normal ordering: <vac|T(f) vac> = 0 identically
  if (n == 2) return w1.squaredNorm();
  const Eigen::VectorXcd w2 = a.apply(w1);
  return std::real(w1.dot(w2));
}

bool FockAdapterModel::in_window(const ChartTestFunction& f) const {
  // saturation probe: spectral content of f at the fastest retained mode
  double peak = std::abs(f.ft(0.0));
  for (double w = 0.1 * omega_max_; w <= omega_max_; w += 0.1 * omega_max_)
    peak = std::max(peak, std::abs(f.ft(w)));
  if (peak == 0.0) return false;
  return std::abs(f.ft(omega_max_)) / peak < window_fraction_;
}

// ---------------------------------------------------------------------------
// Grids, sequences, fits

LambdaGrid LambdaGrid::geometric(double start, double stop, std::size_t count) {
  if (!(start > 0.0) || start > 1.0 || !(stop > 0.0) || stop >= start || count < 2)
    throw std::invalid_argument("invalid lambda grid: need 0 < stop < start <= 1 and count >= 2");
  LambdaGrid g;
  g.values.resize(count);
  const double ratio = std::pow(stop / start, 1.0 / static_cast<double>(count - 1));
  double v = start;
  for (std::size_t i = 0; i < count; ++i) {
    g.values[i] = v;
    v *= ratio;
  }
  return g;
}

namespace {

void validate_grid(const LambdaGrid& grid) {
  if (grid.values.size() < 2)
    throw std::invalid_argument("invalid lambda grid: need at least two points");
  for (std::size_t i = 0; i < grid.values.size(); ++i) {
    const double l = grid.values[i];
    if (!(l > 0.0) || l > 1.0 || (i > 0 && l >= grid.values[i - 1]))
      throw std::invalid_argument("invalid lambda grid: must decrease strictly within (0, 1]");
  }
}

}  // namespace

std::vector<double> scaling_sequence(const ScalingModel& model, const ChartTestFunction& f, int n,
                                     const LambdaGrid& grid) {
  validate_grid(grid);
  std::vector<double> out;
  out.reserve(grid.values.size());
  for (double l : grid.values) out.push_back(model.omega_n(n, f.pushforward(l)));
  return out;
}

nlohmann::json ScalingFit::to_json() const {
  return {{"alpha", alpha},       {"chart_dim", chart_dim}, {"dimension", dimension},
          {"residual", residual}, {"degenerate", degenerate}, {"points", lambdas.size()}};
}

ScalingFit fit_n_alpha(const ScalingModel& model, const ChartTestFunction& f,
                       const LambdaGrid& grid, int chart_dim) {
  validate_grid(grid);
  ScalingFit fit;
  fit.chart_dim = chart_dim;
  fit.lambdas = grid.values;
  const double s1 = model.omega_n(2, f);
  if (!(s1 > 0.0)) throw std::invalid_argument("precondition: omega^(2) must not vanish at lambda = 1");
  fit.n_values.reserve(grid.values.size());
  for (double l : grid.values) {
    const double s = model.omega_n(2, f.pushforward(l));
    if (!(s > 0.0)) throw std::runtime_error("omega^(2) vanished along the lambda grid");
    fit.n_values.push_back(std::sqrt(s1 / s));
  }

  // least-squares slope of log N against log lambda
  const std::size_t n = fit.n_values.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(fit.lambdas[i]);
    const double y = std::log(fit.n_values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = static_cast<double>(n) * sxx - sx * sx;
  double ymin = fit.n_values.front(), ymax = ymin;
  for (double v : fit.n_values) {
    ymin = std::min(ymin, v);
    ymax = std::max(ymax, v);
  }
  if (denom <= 0.0 || ymax - ymin <= 1e-14 * std::max(1.0, ymax)) {
    fit.degenerate = true;
    fit.alpha = 0.0;
  } else {
    fit.alpha = (static_cast<double>(n) * sxy - sx * sy) / denom;
  }
  fit.dimension = static_cast<double>(chart_dim) + fit.alpha;
  double ss = 0.0;
  const double intercept = (sy - fit.alpha * sx) / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = std::log(fit.n_values[i]) - (intercept + fit.alpha * std::log(fit.lambdas[i]));
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / static_cast<double>(n));
  return fit;
}

nlohmann::json VanishingReport::to_json() const {
  return {{"decreasing_final_decade", decreasing_final_decade},
          {"final_over_initial", final_over_initial},
          {"points", lambda_pow_d_times_n.size()}};
}

VanishingReport check_vanishing(const ScalingFit& fit) {
  if (!(fit.dimension > 0.0))
    throw std::invalid_argument("precondition: strictly positive canonical dimension required");
  VanishingReport rep;
  rep.lambda_pow_d_times_n.reserve(fit.lambdas.size());
  for (std::size_t i = 0; i < fit.lambdas.size(); ++i)
    rep.lambda_pow_d_times_n.push_back(std::pow(fit.lambdas[i], fit.chart_dim) * fit.n_values[i]);
  const double lmin = fit.lambdas.back();
  bool dec = true;
  double prev = 0.0;
  bool started = false;
  for (std::size_t i = 0; i < fit.lambdas.size(); ++i) {
    if (fit.lambdas[i] > 10.0 * lmin) continue;  // final decade only
    if (started && rep.lambda_pow_d_times_n[i] >= prev) dec = false;
    prev = rep.lambda_pow_d_times_n[i];
    started = true;
  }
  rep.decreasing_final_decade = started && dec;
  rep.final_over_initial =
      rep.lambda_pow_d_times_n.front() != 0.0
          ? rep.lambda_pow_d_times_n.back() / rep.lambda_pow_d_times_n.front()
          : 0.0;
  return rep;
}

std::vector<TrajectoryPoint> zeta_eta_trajectory(const ScalingModel& model,
                                                 const ChartTestFunction& f,
                                                 const LambdaGrid& grid) {
  validate_grid(grid);
  std::vector<TrajectoryPoint> out;
  out.reserve(grid.values.size());
  for (double l : grid.values) {
    const ChartTestFunction fl = f.delta_scaled(l);
    const double z2 = model.omega_n(2, fl);
    if (!(z2 > 0.0)) throw std::runtime_error("zeta vanished along the trajectory");
    TrajectoryPoint p;
    p.lambda = l;
    p.zeta = std::sqrt(z2);
    const double eta = model.omega_n(3, fl) / (2.0 * z2);
    p.eta_over_zeta = eta / p.zeta;
    p.egj_bound = fock::egj_bound(p.zeta, eta);
    p.in_window = model.in_window(fl);
    out.push_back(p);
  }
  return out;
}

void write_trajectory_csv(const std::vector<TrajectoryPoint>& traj, const ScalingFit& fit,
                          const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << "lambda,N,zeta,eta_over_zeta,egj_bound\n";
  char buf[160];
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double nv = i < fit.n_values.size() ? fit.n_values[i] : 0.0;
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", traj[i].lambda, nv,
                  traj[i].zeta, traj[i].eta_over_zeta, traj[i].egj_bound);
    out << buf;
  }
}

}  // namespace qeilab::scaling
