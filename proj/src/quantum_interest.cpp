#include "qeilab/quantum_interest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "qeilab/quadrature.hpp"

namespace qeilab::interest {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kWindowSigmas = 9.0;  // gaussian tail below 1e-17 beyond this
}  // namespace

// ---------------------------------------------------------------------------
// EnergyProfile

void EnergyProfile::validate() const {
  if (!(sigma > 0.0)) throw std::invalid_argument("invalid profile: sigma must be positive");
  for (std::size_t i = 0; i < pulses.size(); ++i) {
    if (!std::isfinite(pulses[i].time) || !std::isfinite(pulses[i].amplitude))
      throw std::invalid_argument("invalid profile: non-finite pulse");
    if (i > 0 && pulses[i].time < pulses[i - 1].time)
      throw std::invalid_argument("invalid profile: pulses must be ordered in time");
  }
  if (background_t.size() != background_rho.size())
    throw std::invalid_argument("invalid profile: background columns must match");
}

double EnergyProfile::rho(double t) const {
  double acc = 0.0;
  const double norm = 1.0 / (sigma * std::sqrt(2.0 * kPi));
  for (const auto& p : pulses) {
    const double x = (t - p.time) / sigma;
    if (std::abs(x) < 40.0) acc += p.amplitude * norm * std::exp(-0.5 * x * x);
  }
  if (!background_t.empty() && t >= background_t.front() && t <= background_t.back()) {
    const auto it = std::upper_bound(background_t.begin(), background_t.end(), t);
    const std::size_t i = std::max<std::ptrdiff_t>(1, it - background_t.begin()) - 1;
    const std::size_t j = std::min(i + 1, background_t.size() - 1);
    if (j > i) {
      const double w = (t - background_t[i]) / (background_t[j] - background_t[i]);
      acc += (1.0 - w) * background_rho[i] + w * background_rho[j];
    } else {
      acc += background_rho[i];
    }
  }
  return acc;
}

double EnergyProfile::amplitude_scale() const {
  // the attractive pulses set the binding length scale 1/(6 pi A); repayment
  // pulses only add positive potential and must not shrink the default box
  double attractive = 0.0, any = 0.0;
  for (const auto& p : pulses) {
    any = std::max(any, std::abs(p.amplitude));
    if (p.amplitude < 0.0) attractive = std::max(attractive, -p.amplitude);
  }
  return attractive > 0.0 ? attractive : any;
}

nlohmann::json EnergyProfile::to_json() const {
  nlohmann::json pj = nlohmann::json::array();
  for (const auto& p : pulses) pj.push_back({{"t", p.time}, {"A", p.amplitude}});
  nlohmann::json j{{"pulses", pj}, {"sigma", sigma}};
  if (!background_t.empty()) {
    j["background_t"] = background_t;
    j["background_rho"] = background_rho;
  }
  return j;
}

EnergyProfile EnergyProfile::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open profile file '" + path + "'");
  nlohmann::json j;
  in >> j;
  EnergyProfile p;
  p.sigma = j.at("sigma").get<double>();
  for (const auto& pj : j.at("pulses"))
    p.pulses.push_back({pj.at("t").get<double>(), pj.at("A").get<double>()});
  if (j.contains("background_t")) {
    p.background_t = j.at("background_t").get<std::vector<double>>();
    p.background_rho = j.at("background_rho").get<std::vector<double>>();
  }
  p.validate();
  return p;
}

EnergyProfile make_delta_pair(double a, double t, double eps, double sigma) {
  if (!(a > 0.0) || !(t > 0.0)) throw std::invalid_argument("precondition: A > 0 and T > 0 required");
  EnergyProfile p;
  p.sigma = sigma;
  p.pulses = {{0.0, -a}, {t, a * (1.0 + eps)}};
  p.validate();
  return p;
}

DeltaPairConstraints delta_pair_constraints(double a, double t) {
  if (!(a > 0.0) || !(t > 0.0)) throw std::invalid_argument("precondition: A > 0 and T > 0 required");
  DeltaPairConstraints c;
  c.t_max = 1.0 / (6.0 * kPi * a);
  const double s = 6.0 * kPi * a * t;
  if (s < 1.0) c.eps_min = s / (1.0 - s);
  return c;
}

// ---------------------------------------------------------------------------
// SchrodingerOperator

SchrodingerOperator::SchrodingerOperator(EnergyProfile profile, double half_width, double h)
    : profile_(std::move(profile)), r_(half_width), h_(h) {
  profile_.validate();
  if (!(r_ > 0.0) || !(h_ > 0.0)) throw std::invalid_argument("invalid operator: R and h must be positive");
  if (h_ > profile_.sigma / 10.0)
    throw std::invalid_argument("grid-resolution: h must resolve sigma (h <= sigma/10)");
  const double nodes = 2.0 * r_ / h_;
  if (nodes > 1e12) throw std::invalid_argument("invalid operator: grid too large");
  n_ = static_cast<std::size_t>(std::llround(nodes)) - 1;
  build_windows();

  // potential must be negligible at the Dirichlet ends
  double vscale = 1.0;
  for (const auto& p : profile_.pulses)
    vscale = std::max(vscale, 6.0 * kPi * std::abs(p.amplitude) / (profile_.sigma * std::sqrt(2.0 * kPi)));
  if (std::abs(profile_.potential(-r_)) > 1e-12 * vscale ||
      std::abs(profile_.potential(r_)) > 1e-12 * vscale)
    throw std::invalid_argument("invalid operator: potential not negligible at the box ends");
}

void SchrodingerOperator::build_windows() {
  // merge the supports of all pulses and the background into node windows
  std::vector<std::pair<double, double>> spans;
  for (const auto& p : profile_.pulses)
    spans.emplace_back(p.time - kWindowSigmas * profile_.sigma, p.time + kWindowSigmas * profile_.sigma);
  if (!profile_.background_t.empty())
    spans.emplace_back(profile_.background_t.front(), profile_.background_t.back());
  std::sort(spans.begin(), spans.end());
  std::vector<std::pair<double, double>> merged;
  for (auto& s : spans) {
    if (!merged.empty() && s.first <= merged.back().second)
      merged.back().second = std::max(merged.back().second, s.second);
    else
      merged.push_back(s);
  }
  windows_.clear();
  for (const auto& [lo, hi] : merged) {
    const auto j0 = static_cast<std::ptrdiff_t>(std::floor((lo + r_) / h_));
    const auto j1 = static_cast<std::ptrdiff_t>(std::ceil((hi + r_) / h_));
    const std::size_t first = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(j0, 1, static_cast<std::ptrdiff_t>(n_)));
    const std::size_t last = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(j1, 1, static_cast<std::ptrdiff_t>(n_)));
    if (last < first) continue;
    Window w;
    w.first = first;
    w.v.resize(last - first + 1);
    for (std::size_t j = 0; j < w.v.size(); ++j) {
      const double t = -r_ + static_cast<double>(first + j) * h_;
      w.v[j] = profile_.potential(t);
    }
    windows_.push_back(std::move(w));
  }
}

int SchrodingerOperator::count_below(double lambda) const {
  // Sturm/LDL^T pivot count for the tridiagonal with diagonal 2/h^2 + V - l
  // and off-diagonal -1/h^2.  V = 0 outside the precomputed windows.
  //
  // Potential-free stretches have the closed minor solution
  //   d_k = u_{k+1} / (h^2 u_k),  u_{k+1} = (c h^2) u_k - u_{k-1},
  // hyperbolic (at most one sign change) for lambda < 0 and sinusoidal with
  // phase advance th = acos(1 - lambda h^2/2) for lambda > 0.  Both transfer
  // a whole run in O(1), so very wide Dirichlet boxes cost only the window
  // nodes.  Runs shorter than 64 nodes and the dense-phase regime fall back
  // to the plain loop.
  const double diag0 = 2.0 / (h_ * h_);
  const double off2 = 1.0 / (h_ * h_ * h_ * h_);
  const double c = diag0 - lambda;
  const double x = std::abs(lambda) * h_ * h_ / 2.0;
  const double th = x < 1e-4 ? std::sqrt(2.0 * x) * (1.0 - x / 12.0)
                             : (lambda < 0.0 ? std::acosh(1.0 + x) : std::acos(1.0 - x));
  const bool closed_ok = lambda != 0.0 && (lambda < 0.0 || th < 0.05);

  int count = 0;
  double p = 1.0;
  bool first = true;
  std::size_t node = 1;

  auto run_flat = [&](std::size_t upto) {
    if (node >= upto) return;
    const std::size_t m = upto - node;
    if (closed_ok && m > 64) {
      double u0 = 1.0, u1 = p * h_ * h_;
      if (first) {
        u0 = 0.0;
        u1 = 1.0;
        first = false;
      }
      const double md = static_cast<double>(m);
      if (lambda < 0.0) {
        const double eth = std::exp(th), emth = std::exp(-th);
        const double a = (u1 - u0 * emth) / (eth - emth);
        const double b = (u0 * eth - u1) / (eth - emth);
        // run pivots pair u_j with u_{j+1} for j = 1..m: the single possible
        // sign change counts only for k* in (1, m+1)
        if (a != 0.0 && b != 0.0 && ((a > 0.0) != (b > 0.0))) {
          const double kstar = std::log(-b / a) / (2.0 * th);
          if (kstar > 1.0 && kstar < md + 1.0) ++count;
        }
        if (a == 0.0) {
          p = emth / (h_ * h_);
        } else {
          const double w = std::exp(-2.0 * md * th);
          const double ratio = (a * eth + b * emth * w) / (a + b * w);
          p = (std::isfinite(ratio) && ratio != 0.0 ? ratio : eth) / (h_ * h_);
        }
      } else {
        // u(k) = r sin(k th + phi); zeros are isolated on the k axis since
        // th << 1, and each zero in (1, m+1) flips one pivot sign
        const double a = (u1 - u0 * std::cos(th)) / std::sin(th);
        const double b = u0;
        const double phi = std::atan2(b, a);
        const double lo = (1.0 * th + phi) / kPi;
        const double hi = ((md + 1.0) * th + phi) / kPi;
        count += static_cast<int>(std::floor(hi) - std::floor(lo));
        const double num = std::sin((md + 1.0) * th + phi);
        const double den = std::sin(md * th + phi);
        double ratio = num / den;
        if (!std::isfinite(ratio)) ratio = 1e300;
        p = ratio / (h_ * h_);
      }
      node = upto;
      return;
    }
    for (; node < upto; ++node) {
      double d = first ? c : c - off2 / p;
      first = false;
      if (d == 0.0) d = -1e-30 * diag0;
      if (d < 0.0) ++count;
      p = d;
    }
  };

  for (const auto& w : windows_) {
    run_flat(w.first);
    for (std::size_t j = 0; j < w.v.size() && node <= n_; ++j, ++node) {
      double d = first ? c + w.v[j] : c + w.v[j] - off2 / p;
      first = false;
      if (d == 0.0) d = -1e-30 * diag0;
      if (d < 0.0) ++count;
      p = d;
    }
  }
  run_flat(n_ + 1);
  return count;
}

double SchrodingerOperator::lowest_eigenvalue() const {
  double vmin = 0.0;
  for (const auto& w : windows_)
    for (double v : w.v) vmin = std::min(vmin, v);
  double lo = vmin - 1.0;
  double hi = std::max(4.0 * (kPi / (2.0 * r_)) * (kPi / (2.0 * r_)), 1e-8);
  int guard = 0;
  while (count_below(hi) < 1 && guard++ < 200) hi *= 2.0;
  if (count_below(hi) < 1) throw std::runtime_error("eigenvalue bracket failure");
  const double scale = std::max({1.0, std::abs(lo), std::abs(hi)});
  while (hi - lo > 1e-13 * scale) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // no representable midpoint left
    if (count_below(mid) >= 1)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

SchrodingerOperator::Extrapolated SchrodingerOperator::lowest_eigenvalue_extrapolated() const {
  const double coarse = lowest_eigenvalue();
  SchrodingerOperator fine(profile_, r_, h_ / 2.0);
  const double f = fine.lowest_eigenvalue();
  // second-order discretisation: error ~ h^2
  return {f + (f - coarse) / 3.0, std::abs(f - coarse) / 3.0};
}

// ---------------------------------------------------------------------------
// Admissibility

Admissibility admissible(const EnergyProfile& profile, double half_width) {
  profile.validate();
  const double a = profile.amplitude_scale();
  double r = half_width;
  if (!(r > 0.0)) {
    r = a > 0.0 ? 50.0 / (6.0 * kPi * a) : 50.0;
    double extent = 1.0;
    for (const auto& p : profile.pulses) extent = std::max(extent, std::abs(p.time));
    if (!profile.background_t.empty())
      extent = std::max({extent, std::abs(profile.background_t.front()), std::abs(profile.background_t.back())});
    r = std::max(r, 2.0 * extent + 20.0 * profile.sigma + 1.0);
  }
  SchrodingerOperator op(profile, r, profile.sigma / 10.0);
  const auto [value, err] = op.lowest_eigenvalue_extrapolated();
  Admissibility out;
  out.half_width = r;
  out.step = op.step();
  out.margin = value;
  out.tolerance = err + (kPi / (2.0 * r)) * (kPi / (2.0 * r));
  out.admissible = value >= -out.tolerance;
  return out;
}

// ---------------------------------------------------------------------------
// Variational family

nlohmann::json TestFunctionReport::to_json() const {
  return {{"worst_value", worst_value},
          {"tau", tau},
          {"center", center},
          {"certifies_inadmissible", certifies_inadmissible}};
}

namespace {

// ∫ rho g² + (1/6pi) ∫ |g'|² for a gaussian g centred at c with width tau
double family_value(const EnergyProfile& profile, double tau, double c) {
  auto g2 = [&](double t) {
    const double x = (t - c) / tau;
    return std::exp(-x * x);
  };
  double acc = std::sqrt(kPi) / (2.0 * tau) / (6.0 * kPi);  // ∫|g'|² closed form
  for (const auto& p : profile.pulses) {
    const double lo = p.time - kWindowSigmas * profile.sigma;
    const double hi = p.time + kWindowSigmas * profile.sigma;
    auto f = [&](double t) {
      const double x = (t - p.time) / profile.sigma;
      return p.amplitude / (profile.sigma * std::sqrt(2.0 * kPi)) * std::exp(-0.5 * x * x) * g2(t);
    };
    acc += simpson(f, lo, hi, 400);
  }
  if (!profile.background_t.empty()) {
    // background contribution on its own grid
    std::vector<double> y(profile.background_t.size());
    for (std::size_t i = 0; i < y.size(); ++i)
      y[i] = profile.background_rho[i] * g2(profile.background_t[i]);
    if (y.size() >= 2)
      acc += simpson_samples(y, profile.background_t[1] - profile.background_t[0]);
  }
  return acc;
}

}  // namespace

TestFunctionReport test_function_constraint(const EnergyProfile& profile,
                                            const GaussianFamilySpec& family) {
  profile.validate();
  std::vector<double> taus = family.taus;
  std::vector<double> centers = family.centers;

  double t_lo = 0.0, t_hi = 0.0;
  if (!profile.pulses.empty()) {
    t_lo = profile.pulses.front().time;
    t_hi = profile.pulses.back().time;
  } else if (!profile.background_t.empty()) {
    t_lo = profile.background_t.front();
    t_hi = profile.background_t.back();
  }
  const double span = std::max(t_hi - t_lo, 10.0 * profile.sigma);

  if (taus.empty()) {
    double tau = std::max(4.0 * profile.sigma, span / 50.0);
    const double top = 20.0 * span;
    while (tau <= top) {
      taus.push_back(tau);
      tau *= 1.5;
    }
  }
  if (centers.empty()) {
    const int nc = 21;
    for (int i = 0; i < nc; ++i)
      centers.push_back(t_lo - span + (2.0 * span + (t_hi - t_lo)) * static_cast<double>(i) / (nc - 1));
  }

  TestFunctionReport rep;
  rep.worst_value = std::numeric_limits<double>::infinity();
  for (double tau : taus) {
    for (double c : centers) {
      const double v = family_value(profile, tau, c);
      if (v < rep.worst_value) {
        rep.worst_value = v;
        rep.tau = tau;
        rep.center = c;
      }
    }
  }
  const double scale = std::max(1e-12, profile.amplitude_scale());
  rep.certifies_inadmissible = rep.worst_value < -1e-10 * scale;
  return rep;
}

// ---------------------------------------------------------------------------
// Numeric thresholds for the delta pair

namespace {

bool pair_binds(double a, double t, double eps, double sigma, double box_scale) {
  const double s = 6.0 * kPi * a;
  const double r = box_scale / s;
  SchrodingerOperator op(make_delta_pair(a, t, eps, sigma), r, sigma / 10.0);
  // detection level: safely above discretisation noise, well below the
  // box resolution (pi/2R)^2
  const double guard = 1e-10 * s * s;
  return op.count_below(-guard) >= 1;
}

}  // namespace

double delta_pair_numeric_t_max(double a, double sigma, double box_scale) {
  if (!(a > 0.0) || !(sigma > 0.0)) throw std::invalid_argument("precondition: A > 0 and sigma > 0");
  const double s = 6.0 * kPi * a;
  const double eps_probe = 1e6;  // binding threshold then sits at S = 1 - 1e-6
  double lo = 0.5 / s, hi = 1.5 / s;
  while (pair_binds(a, lo, eps_probe, sigma, box_scale)) lo *= 0.5;
  while (!pair_binds(a, hi, eps_probe, sigma, box_scale)) hi *= 1.3;
  for (int i = 0; i < 18; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (pair_binds(a, mid, eps_probe, sigma, box_scale))
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

double delta_pair_numeric_eps_min(double a, double t, double sigma, double box_scale) {
  if (!(a > 0.0) || !(t > 0.0) || !(sigma > 0.0))
    throw std::invalid_argument("precondition: A > 0, T > 0, sigma > 0");
  const double s6 = 6.0 * kPi * a * t;
  if (s6 >= 1.0) throw std::invalid_argument("precondition: T beyond the maximum loan term");
  const double guess = s6 / (1.0 - s6);
  double lo = std::max(1e-8, 0.2 * guess);  // binds (eps too small)
  double hi = 5.0 * guess + 1e-6;           // does not bind
  int guard = 0;
  while (!pair_binds(a, t, lo, sigma, box_scale) && guard++ < 60) lo *= 0.5;
  guard = 0;
  while (pair_binds(a, t, hi, sigma, box_scale) && guard++ < 60) hi *= 2.0;
  for (int i = 0; i < 22; ++i) {
    const double mid = std::sqrt(lo * hi);
    if (pair_binds(a, t, mid, sigma, box_scale))
      lo = mid;
    else
      hi = mid;
  }
  return std::sqrt(lo * hi);
}

}  // namespace qeilab::interest
