#include "qeilab/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "qeilab/quadrature.hpp"

namespace qeilab::sampling {

namespace {

constexpr double kPi = std::numbers::pi;

double bessel_k0(double x) {
  if (x > 700.0) return 0.0;  // e^{-x} underflows well before this
  return std::cyl_bessel_k(0.0, x);
}

}  // namespace

std::string kind_name(SamplerKind k) {
  switch (k) {
    case SamplerKind::gaussian: return "gaussian";
    case SamplerKind::lorentzian_sqrt: return "lorentzian-sqrt";
    case SamplerKind::bump: return "bump";
    case SamplerKind::tabulated: return "tabulated";
  }
  return "unknown";
}

SamplerKind kind_from_name(const std::string& name) {
  if (name == "gaussian") return SamplerKind::gaussian;
  if (name == "lorentzian-sqrt" || name == "lorentzian_sqrt") return SamplerKind::lorentzian_sqrt;
  if (name == "bump") return SamplerKind::bump;
  if (name == "tabulated") return SamplerKind::tabulated;
  throw std::invalid_argument("invalid-parameter: unknown sampler kind '" + name + "'");
}

double SamplingFunction::closed_form(double t) const {
  switch (kind_) {
    case SamplerKind::gaussian:
      return amplitude_ * std::exp(-t * t / (2.0 * tau_ * tau_));
    case SamplerKind::lorentzian_sqrt:
      return amplitude_ * std::sqrt(tau_ / (kPi * (t * t + tau_ * tau_)));
    case SamplerKind::bump: {
      const double s = (2.0 * t - (support_.a + support_.b)) / support_.width();
      const double s2 = s * s;
      if (s2 >= 1.0) return 0.0;
      return amplitude_ * std::exp(-1.0 / (1.0 - s2));
    }
    case SamplerKind::tabulated: break;
  }
  return 0.0;
}

double SamplingFunction::closed_form_derivative(double t) const {
  switch (kind_) {
    case SamplerKind::gaussian:
      return -amplitude_ * (t / (tau_ * tau_)) * std::exp(-t * t / (2.0 * tau_ * tau_));
    case SamplerKind::lorentzian_sqrt: {
      const double r2 = t * t + tau_ * tau_;
      return -amplitude_ * std::sqrt(tau_ / kPi) * t / (r2 * std::sqrt(r2));
    }
    case SamplerKind::bump: {
      const double w = support_.width();
      const double s = (2.0 * t - (support_.a + support_.b)) / w;
      const double s2 = s * s;
      if (s2 >= 1.0) return 0.0;
      const double om = 1.0 - s2;
      return amplitude_ * std::exp(-1.0 / om) * (-2.0 * s / (om * om)) * (2.0 / w);
    }
    case SamplerKind::tabulated: break;
  }
  return 0.0;
}

double SamplingFunction::value(double t) const {
  if (kind_ != SamplerKind::tabulated) return closed_form(t);
  if (samples_.empty() || t < support_.a || t > support_.b) return 0.0;
  const double x = (t - t0_) / dt_;
  const auto i = static_cast<std::size_t>(std::clamp(std::floor(x), 0.0, static_cast<double>(samples_.size() - 2)));
  const double w = x - static_cast<double>(i);
  return (1.0 - w) * samples_[i] + w * samples_[i + 1];
}

double SamplingFunction::derivative_value(double t) const {
  if (kind_ != SamplerKind::tabulated) return closed_form_derivative(t);
  if (samples_.size() < 2 || t < support_.a || t > support_.b) return 0.0;
  // centred differences between neighbouring nodes, interpolated
  const double x = (t - t0_) / dt_;
  auto slope_at = [&](std::size_t i) {
    const std::size_t n = samples_.size();
    if (i == 0) return (samples_[1] - samples_[0]) / dt_;
    if (i >= n - 1) return (samples_[n - 1] - samples_[n - 2]) / dt_;
    return (samples_[i + 1] - samples_[i - 1]) / (2.0 * dt_);
  };
  const auto i = static_cast<std::size_t>(std::clamp(std::floor(x), 0.0, static_cast<double>(samples_.size() - 2)));
  const double w = x - static_cast<double>(i);
  return (1.0 - w) * slope_at(i) + w * slope_at(i + 1);
}

double SamplingFunction::l2_norm_sq() const {
  const double a2 = amplitude_ * amplitude_;
  switch (kind_) {
    case SamplerKind::gaussian:
      return a2 * tau_ * std::sqrt(kPi);
    case SamplerKind::lorentzian_sqrt:
      return a2;  // ∫ tau/(pi(t^2+tau^2)) dt = 1
    default: {
      std::vector<double> sq(samples_.size());
      for (std::size_t i = 0; i < samples_.size(); ++i) sq[i] = samples_[i] * samples_[i];
      return simpson_samples(sq, dt_);
    }
  }
}

double SamplingFunction::derivative_l2_norm_sq() const {
  const double a2 = amplitude_ * amplitude_;
  switch (kind_) {
    case SamplerKind::gaussian:
      return a2 * std::sqrt(kPi) / (2.0 * tau_);
    case SamplerKind::lorentzian_sqrt:
      return a2 / (8.0 * tau_ * tau_);
    case SamplerKind::bump: {
      auto f = [this](double t) {
        const double d = closed_form_derivative(t);
        return d * d;
      };
      return simpson(f, support_.a, support_.b, 4000);
    }
    case SamplerKind::tabulated: {
      std::vector<double> sq(samples_.size());
      for (std::size_t i = 0; i < samples_.size(); ++i) {
        const double d = derivative_value(grid_time(i));
        sq[i] = d * d;
      }
      return simpson_samples(sq, dt_);
    }
  }
  return 0.0;
}

SamplingFunction SamplingFunction::derivative() const {
  std::vector<double> t(samples_.size()), v(samples_.size());
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    t[i] = grid_time(i);
    v[i] = derivative_value(t[i]);
  }
  if (kind_ == SamplerKind::tabulated) {
    const std::size_t n = samples_.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (i == 0)
        v[i] = (samples_[1] - samples_[0]) / dt_;
      else if (i == n - 1)
        v[i] = (samples_[n - 1] - samples_[n - 2]) / dt_;
      else
        v[i] = (samples_[i + 1] - samples_[i - 1]) / (2.0 * dt_);
    }
  }
  return tabulated(std::move(t), std::move(v));
}

SamplingFunction SamplingFunction::scaled(double lambda) const {
  if (!(lambda > 0.0)) throw std::invalid_argument("invalid-parameter: scale factor must be positive");
  SamplingFunction out;
  out.kind_ = kind_;
  out.amplitude_ = amplitude_;
  out.tau_ = tau_ / lambda;
  out.support_ = {support_.a / lambda, support_.b / lambda};
  out.t0_ = t0_ / lambda;
  out.dt_ = dt_ / lambda;
  switch (kind_) {
    case SamplerKind::gaussian:
    case SamplerKind::bump:
      out.samples_ = samples_;  // g(lambda t) hits the same values on the scaled grid
      break;
    case SamplerKind::lorentzian_sqrt:
      out.amplitude_ = amplitude_ / std::sqrt(lambda);
      out.samples_ = samples_;
      for (auto& s : out.samples_) s /= std::sqrt(lambda);
      break;
    case SamplerKind::tabulated:
      out.samples_ = samples_;
      break;
  }
  return out;
}

SamplingFunction scale_family(const SamplingFunction& g, double lambda) { return g.scaled(lambda); }

SamplingFunction SamplingFunction::with_amplitude(double amplitude) const {
  SamplingFunction out = *this;
  if (out.amplitude_ != 0.0) {
    const double ratio = amplitude / out.amplitude_;
    for (auto& s : out.samples_) s *= ratio;
  } else {
    for (auto& s : out.samples_) s = 0.0;
  }
  out.amplitude_ = amplitude;
  return out;
}

double SamplingFunction::characteristic_width() const {
  switch (kind_) {
    case SamplerKind::gaussian:
    case SamplerKind::lorentzian_sqrt:
      return tau_;
    default:
      return support_.width();
  }
}

void SamplingFunction::fill_grid() {
  const auto n = static_cast<std::size_t>(std::llround((support_.b - support_.a) / dt_)) + 1;
  samples_.resize(n);
  t0_ = support_.a;
  for (std::size_t i = 0; i < n; ++i) samples_[i] = closed_form(grid_time(i));
}

SamplingFunction SamplingFunction::tabulated(std::vector<double> times, std::vector<double> values) {
  if (times.size() != values.size() || times.size() < 2)
    throw std::invalid_argument("invalid-parameter: tabulated sampler needs matching t/g columns (>= 2 rows)");
  const double dt = times[1] - times[0];
  if (!(dt > 0.0)) throw std::invalid_argument("invalid-parameter: tabulated grid must be increasing");
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double step = times[i] - times[i - 1];
    if (std::abs(step - dt) > 1e-9 * std::max(1.0, std::abs(dt)))
      throw std::invalid_argument("invalid-parameter: tabulated grid must be uniform");
  }
  for (double v : values)
    if (!std::isfinite(v)) throw std::invalid_argument("invalid-parameter: non-finite sample value");
  SamplingFunction out;
  out.kind_ = SamplerKind::tabulated;
  out.support_ = {times.front(), times.back()};
  out.t0_ = times.front();
  out.dt_ = dt;
  out.samples_ = std::move(values);
  out.tau_ = out.support_.width();
  return out;
}

SamplingFunction make_sampler(const SamplerSpec& spec) {
  SamplingFunction g;
  g.kind_ = spec.kind;
  g.amplitude_ = spec.amplitude;
  switch (spec.kind) {
    case SamplerKind::gaussian:
    case SamplerKind::lorentzian_sqrt: {
      if (!(spec.tau > 0.0)) throw std::invalid_argument("invalid-parameter: tau must be positive");
      g.tau_ = spec.tau;
      g.support_ = {-12.0 * spec.tau, 12.0 * spec.tau};
      g.dt_ = spec.dt > 0.0 ? spec.dt : spec.tau / 100.0;
      if (g.dt_ > spec.tau / 16.0)
        throw std::invalid_argument("grid-too-coarse: fewer than 16 points across the characteristic width");
      g.fill_grid();
      break;
    }
    case SamplerKind::bump: {
      if (!(spec.a < spec.b)) throw std::invalid_argument("invalid-parameter: bump support needs a < b");
      g.support_ = {spec.a, spec.b};
      const double w = spec.b - spec.a;
      g.tau_ = w;
      g.dt_ = spec.dt > 0.0 ? spec.dt : w / 2000.0;
      if (g.dt_ > w / 16.0)
        throw std::invalid_argument("grid-too-coarse: fewer than 16 points across the characteristic width");
      g.fill_grid();
      break;
    }
    case SamplerKind::tabulated:
      throw std::invalid_argument("invalid-parameter: use SamplingFunction::tabulated or load_sampler_csv");
  }
  return g;
}

SamplingFunction make_gaussian(double tau, double dt) {
  return make_sampler({SamplerKind::gaussian, tau, 0, 0, dt, 1.0});
}
SamplingFunction make_lorentzian_sqrt(double tau, double dt) {
  return make_sampler({SamplerKind::lorentzian_sqrt, tau, 0, 0, dt, 1.0});
}
SamplingFunction make_bump(double a, double b, double dt) {
  return make_sampler({SamplerKind::bump, 1.0, a, b, dt, 1.0});
}

// ---------------------------------------------------------------------------
// Fourier transforms, convention  ĝ(u) = ∫ g(t) e^{iut} dt.

namespace {

std::complex<double> transform_by_quadrature(const SamplingFunction& g, double u) {
  const auto& s = g.samples();
  std::vector<double> re(s.size()), im(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double t = g.grid_time(i);
    re[i] = s[i] * std::cos(u * t);
    im[i] = s[i] * std::sin(u * t);
  }
  return {simpson_samples(re, g.dt()), simpson_samples(im, g.dt())};
}

std::complex<double> transform_value(const SamplingFunction& g, double u) {
  switch (g.kind()) {
    case SamplerKind::gaussian: {
      const double tau = g.tau();
      return {g.amplitude() * tau * std::sqrt(2.0 * kPi) * std::exp(-tau * tau * u * u / 2.0), 0.0};
    }
    case SamplerKind::lorentzian_sqrt: {
      const double tau = g.tau();
      if (u == 0.0) return {std::numeric_limits<double>::infinity(), 0.0};
      return {g.amplitude() * 2.0 * std::sqrt(tau / kPi) * bessel_k0(tau * std::abs(u)), 0.0};
    }
    default:
      return transform_by_quadrature(g, u);
  }
}

struct GridDefaults {
  double du;
  double umax;
  bool offset;
};

GridDefaults default_grid(const SamplingFunction& g) {
  switch (g.kind()) {
    case SamplerKind::gaussian:
      return {0.0025 / g.tau(), 15.0 / g.tau(), false};
    case SamplerKind::lorentzian_sqrt:
      return {0.0025 / g.tau(), 40.0 / g.tau(), true};
    case SamplerKind::bump: {
      const double w = g.support().width();
      return {0.02 / w, 80.0 / w, false};
    }
    case SamplerKind::tabulated: {
      const double umax = kPi / (2.0 * g.dt());
      return {umax / 8000.0, umax, false};
    }
  }
  return {0.01, 10.0, false};
}

}  // namespace

double SpectralFunction::frequency(std::size_t i) const {
  if (offset_) {
    const auto n = static_cast<std::ptrdiff_t>(values_.size() / 2);
    return (static_cast<double>(static_cast<std::ptrdiff_t>(i) - n) + 0.5) * du_;
  }
  const auto n = static_cast<std::ptrdiff_t>(values_.size() / 2);
  return static_cast<double>(static_cast<std::ptrdiff_t>(i) - n) * du_;
}

std::complex<double> SpectralFunction::value(double u) const { return transform_value(source_, u); }

double SpectralFunction::abs2(double u) const {
  const auto v = value(u);
  return std::norm(v);
}

void SpectralFunction::compute_parseval() {
  const double time_side = source_.l2_norm_sq();
  if (!(time_side > 0.0)) {
    parseval_residual_ = 0.0;
    return;
  }
  double freq_side = 0.0;
  if (singular_at_zero_) {
    // |ĝ|² has an integrable log² singularity at u = 0: handle [0, u_s] by a
    // log substitution and the rest with Simpson, then double by symmetry.
    const double us = std::min(1.0 / source_.tau(), umax_ / 2.0);
    auto f = [this](double u) { return abs2(u); };
    const double head = integrate_log_singular_at_zero(f, us);
    const double body = simpson(f, us, umax_, static_cast<std::size_t>((umax_ - us) / du_) + 1);
    freq_side = 2.0 * (head + body);
  } else {
    std::vector<double> sq(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) sq[i] = std::norm(values_[i]);
    freq_side = simpson_samples(sq, du_);
  }
  parseval_residual_ = std::abs(time_side - freq_side / (2.0 * kPi)) / time_side;
}

SpectralFunction fourier_transform(const SamplingFunction& g, const FrequencyGrid& grid) {
  const GridDefaults defaults = default_grid(g);
  SpectralFunction out;
  out.source_ = g;
  out.du_ = grid.du > 0.0 ? grid.du : defaults.du;
  out.umax_ = grid.umax > 0.0 ? grid.umax : defaults.umax;
  out.offset_ = grid.offset.value_or(defaults.offset);
  out.singular_at_zero_ = (g.kind() == SamplerKind::lorentzian_sqrt);
  if (out.singular_at_zero_ && !out.offset_)
    throw std::invalid_argument("invalid-parameter: this spectrum diverges at u = 0; use an offset grid");
  if (out.umax_ > kPi / g.dt())
    throw std::invalid_argument("aliasing-risk: requested frequency window exceeds pi/dt for the time grid");

  const auto n = static_cast<std::size_t>(std::ceil(out.umax_ / out.du_));
  if (out.offset_) {
    out.values_.resize(2 * n);
    for (std::size_t i = 0; i < 2 * n; ++i) {
      const double u = (static_cast<double>(static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(n)) + 0.5) * out.du_;
      out.values_[i] = transform_value(g, u);
    }
  } else {
    out.values_.resize(2 * n + 1);
    for (std::size_t i = 0; i <= 2 * n; ++i) {
      const double u = static_cast<double>(static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(n)) * out.du_;
      out.values_[i] = transform_value(g, u);
    }
  }
  out.umax_ = static_cast<double>(n) * out.du_;

  // real input: conjugate symmetry across the grid (the grids are built
  // symmetric, so paired indices exist for every node)
  const std::size_t count = out.values_.size();
  double scale = 1.0;
  for (const auto& v : out.values_)
    if (std::isfinite(v.real())) scale = std::max(scale, std::abs(v.real()) + std::abs(v.imag()));
  for (std::size_t i = 0; i < count / 2; ++i) {
    const auto a = out.values_[i];
    const auto b = out.values_[count - 1 - i];
    if (!std::isfinite(a.real()) || !std::isfinite(b.real())) continue;
    if (std::abs(a - std::conj(b)) > 1e-10 * scale)
      throw std::runtime_error("spectral invariant violated: transform of a real weight "
                               "must be conjugate symmetric");
  }

  out.suggested_du_ = defaults.du;
  out.suggested_umax_ = (g.kind() == SamplerKind::bump) ? 640.0 / g.support().width() : defaults.umax;
  out.compute_parseval();
  return out;
}

// ---------------------------------------------------------------------------
// CSV I/O

void write_sampler_csv(const SamplingFunction& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << "t,g\n";
  char buf[80];
  for (std::size_t i = 0; i < g.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", g.grid_time(i), g.samples()[i]);
    out << buf;
  }
}

SamplingFunction load_sampler_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty sampler file '" + path + "'");
  std::vector<double> t, v;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string a, b;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ','))
      throw std::runtime_error("malformed sampler row '" + line + "'");
    t.push_back(std::stod(a));
    v.push_back(std::stod(b));
  }
  return SamplingFunction::tabulated(std::move(t), std::move(v));
}

}  // namespace qeilab::sampling
