#include "qeilab/qei_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "qeilab/quadrature.hpp"

namespace qeilab::bounds {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

nlohmann::json sampler_json(const SamplingFunction& g) {
  nlohmann::json j;
  j["kind"] = sampling::kind_name(g.kind());
  j["amplitude"] = g.amplitude();
  if (g.kind() == sampling::SamplerKind::gaussian || g.kind() == sampling::SamplerKind::lorentzian_sqrt)
    j["tau"] = g.tau();
  else
    j["support"] = {g.support().a, g.support().b};
  return j;
}

// ∫_lo^hi w(u) |ĝ(u)|² du on a fixed-order Simpson grid of step ~du.
// The weight is evaluated first so that points where it vanishes never touch
// a (possibly singular) spectrum value.  Panel endpoints take the weight's
// one-sided limit from inside the panel, so step weights split at their
// jumps integrate exactly.  A panel starting at u = 0 over a log-singular
// spectrum with nonvanishing weight is handled by the log substitution.
template <class W>
double weighted_panel(const SpectralFunction& gh, W&& w, double lo, double hi, double du) {
  if (!(hi > lo)) return 0.0;
  const double inset = 1e-9 * (hi - lo);
  auto f = [&, inset](double u) {
    const double uc = std::clamp(u, lo + inset, hi - inset);
    const double wu = w(uc);
    if (wu == 0.0) return 0.0;
    return wu * gh.abs2(uc);
  };
  if (lo == 0.0 && gh.log_singular_at_zero() && w(0.5 * du) > 0.0) {
    const double us = std::min(gh.source().tau() > 0 ? 1.0 / gh.source().tau() : hi / 2.0, hi / 2.0);
    const double head = integrate_log_singular_at_zero(f, us);
    const double body = simpson(f, us, hi, static_cast<std::size_t>(std::ceil((hi - us) / du)));
    return head + body;
  }
  return simpson(f, lo, hi, static_cast<std::size_t>(std::ceil((hi - lo) / du)));
}

template <class W>
double weighted_integral(const SpectralFunction& gh, W&& w, std::vector<double> cuts, double du) {
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += weighted_panel(gh, w, cuts[i], cuts[i + 1], du);
  return total;
}

}  // namespace

nlohmann::json BoundResult::to_json() const {
  nlohmann::json j;
  j["method"] = method;
  j["value"] = value;
  j["error_estimate"] = error_estimate;
  j["inputs"] = inputs;
  return j;
}

double q3(double x) {
  if (!(x >= 1.0)) throw std::invalid_argument("precondition: q3 requires x >= 1");
  const double e = x - 1.0;
  if (e < 1e-6) {
    // expansion about x = 1; the direct formula cancels to O(e^{3/2}) there
    const double c = 8.0 / 3.0 + e * (-106.0 / 15.0 + e * (5857.0 / 420.0 - e * (24065.0 / 1008.0)));
    return std::sqrt(2.0) * e * std::sqrt(e) * c;
  }
  const double ix2 = 1.0 / (x * x);
  return std::sqrt(1.0 - ix2) * (1.0 - 0.5 * ix2) -
         0.5 * ix2 * ix2 * std::log(x + std::sqrt(x * x - 1.0));
}

BoundResult ford_roman_rhs(double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("precondition: ford_roman_rhs requires tau > 0");
  BoundResult r;
  r.method = "ford-roman";
  r.value = -3.0 / (32.0 * kPi * kPi * tau * tau * tau * tau);
  r.error_estimate = 0.0;
  r.inputs = {{"tau", tau}};
  return r;
}

// ---------------------------------------------------------------------------
// QWeight

QWeight QWeight::fewster_eveson(double mass) {
  if (mass < 0.0) throw std::invalid_argument("precondition: mass must be nonnegative");
  QWeight q;
  q.rep_ = Rep::fewster_eveson;
  q.mass_ = mass;
  return q;
}

QWeight QWeight::step_from_lines(std::vector<std::pair<double, double>> lines) {
  for (const auto& [omega, mu] : lines) {
    if (omega < 0.0 || mu < 0.0)
      throw std::invalid_argument(
          "invalid QWeight: spectral lines must have nonnegative frequencies and weights");
  }
  std::sort(lines.begin(), lines.end());
  QWeight q;
  q.rep_ = Rep::step;
  q.lines_ = std::move(lines);
  return q;
}

QWeight QWeight::tabulated(std::vector<double> u, std::vector<double> qv) {
  if (u.size() != qv.size() || u.size() < 2)
    throw std::invalid_argument("invalid QWeight: need matching u/Q columns (>= 2 rows)");
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (qv[i] < 0.0) throw std::invalid_argument("invalid QWeight: negative values rejected");
    if (i > 0 && (u[i] <= u[i - 1] || qv[i] < qv[i - 1] - 1e-12 * std::max(1.0, qv[i - 1])))
      throw std::invalid_argument("invalid QWeight: must be monotone non-decreasing on an increasing grid");
  }
  QWeight q;
  q.rep_ = Rep::tabulated;
  q.tab_u_ = std::move(u);
  q.tab_q_ = std::move(qv);
  return q;
}

double QWeight::operator()(double u) const {
  if (u < 0.0) return 0.0;
  switch (rep_) {
    case Rep::fewster_eveson: {
      if (mass_ == 0.0) return u * u * u * u / (16.0 * kPi * kPi * kPi);
      if (u < mass_) return 0.0;
      return u * u * u * u * q3(u / mass_) / (16.0 * kPi * kPi * kPi);
    }
    case Rep::step: {
      double sum = 0.0;
      for (const auto& [omega, mu] : lines_) {
        if (omega < u) sum += mu;
      }
      return sum / kPi;
    }
    case Rep::tabulated: {
      if (tab_u_.empty() || u <= tab_u_.front()) return tab_q_.empty() ? 0.0 : tab_q_.front();
      if (u >= tab_u_.back()) return tab_q_.back();
      const auto it = std::upper_bound(tab_u_.begin(), tab_u_.end(), u);
      const std::size_t i = static_cast<std::size_t>(it - tab_u_.begin()) - 1;
      const double w = (u - tab_u_[i]) / (tab_u_[i + 1] - tab_u_[i]);
      return (1.0 - w) * tab_q_[i] + w * tab_q_[i + 1];
    }
  }
  return 0.0;
}

double QWeight::domain_max() const {
  // tabulated weights continue with their last value beyond the final node
  // (monotone bounded continuation keeps the bound valid), so every current
  // representation covers the whole half-line
  return kInf;
}

std::vector<double> QWeight::breakpoints() const {
  switch (rep_) {
    case Rep::fewster_eveson:
      return mass_ > 0.0 ? std::vector<double>{mass_} : std::vector<double>{};
    case Rep::step: {
      std::vector<double> b;
      b.reserve(lines_.size());
      for (const auto& [omega, mu] : lines_) b.push_back(omega);
      return b;
    }
    case Rep::tabulated: {
      // split at the nodes so staircases loaded from CSV integrate exactly;
      // dense smooth tables integrate fine as a single panel
      if (tab_u_.size() > 256) return {};
      return std::vector<double>(tab_u_.begin() + 1, tab_u_.end() - 1);
    }
  }
  return {};
}

void QWeight::write_csv(const std::string& path, double umax, std::size_t n) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << "u,Q\n";
  char buf[80];
  auto row = [&](double u, double q) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", u, q);
    out << buf;
  };
  if (rep_ == Rep::tabulated) {
    for (std::size_t i = 0; i < tab_u_.size(); ++i) row(tab_u_[i], tab_q_[i]);
    return;
  }
  if (rep_ == Rep::step) {
    // staircase: value at the jump and just above it
    row(0.0, (*this)(0.0));
    for (const auto& [omega, mu] : lines_) {
      row(omega, (*this)(omega));
      row(std::nextafter(omega, kInf), (*this)(omega) + mu / kPi);
    }
    const double top = lines_.empty() ? 1.0 : lines_.back().first * 1.25 + 1.0;
    row(top, (*this)(top));
    return;
  }
  const double hi = umax > 0.0 ? umax : std::max(1.0, 8.0 * mass_);
  for (std::size_t i = 0; i <= n; ++i) {
    const double u = hi * static_cast<double>(i) / static_cast<double>(n);
    row(u, (*this)(u));
  }
}

QWeight QWeight::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty QWeight file '" + path + "'");
  std::vector<double> u, q;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string a, b;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ','))
      throw std::runtime_error("malformed QWeight row '" + line + "'");
    const double uu = std::stod(a);
    const double qq = std::stod(b);
    if (!u.empty() && uu <= u.back()) continue;  // collapse staircase duplicates
    u.push_back(uu);
    q.push_back(qq);
  }
  return tabulated(std::move(u), std::move(q));
}

// ---------------------------------------------------------------------------
// Bound evaluators

BoundResult fewster_eveson_4d(const SamplingFunction& g, double mass) {
  if (mass < 0.0) throw std::invalid_argument("precondition: mass must be nonnegative");
  const SpectralFunction gh = sampling::fourier_transform(g);
  const double umax = gh.suggested_umax();
  const double du = gh.suggested_du();
  auto weight = [&](double u) {
    if (u <= 0.0) return 0.0;
    const double u4 = u * u * u * u;
    if (mass == 0.0) return u4;  // massless branch: Q3 -> 1
    if (u < mass) return 0.0;
    return u4 * q3(u / mass);
  };
  BoundResult r;
  r.method = "fewster-eveson-4d";
  r.inputs = {{"g", sampler_json(g)}, {"mass", mass}};
  if (mass >= umax) {
    r.value = 0.0;
    r.error_estimate = 0.0;
    return r;
  }
  const double lo = std::min(mass, umax);
  const double fine = weighted_panel(gh, weight, lo, umax, du);
  const double coarse = weighted_panel(gh, weight, lo, umax, 2.0 * du);
  r.value = -fine / (16.0 * kPi * kPi * kPi);
  r.error_estimate = std::abs(fine - coarse) / 15.0 / (16.0 * kPi * kPi * kPi);
  return r;
}

namespace {

double derivative_l2_with_estimate(const SamplingFunction& g, double* err) {
  const double full = g.derivative_l2_norm_sq();
  if (g.has_closed_form() && g.kind() != sampling::SamplerKind::bump) {
    if (err) *err = 0.0;
    return full;
  }
  // residual estimate from a half-resolution pass over the derivative samples
  const SamplingFunction d = g.derivative();
  std::vector<double> coarse;
  coarse.reserve(d.size() / 2 + 1);
  for (std::size_t i = 0; i < d.size(); i += 2) coarse.push_back(d.samples()[i] * d.samples()[i]);
  const double ic = simpson_samples(coarse, 2.0 * d.dt());
  if (err) *err = std::abs(full - ic) / 15.0;
  return full;
}

}  // namespace

BoundResult flanagan_2d(const SamplingFunction& g) {
  BoundResult r;
  r.method = "flanagan-2d";
  r.inputs = {{"g", sampler_json(g)}};
  double err = 0.0;
  const double i2 = derivative_l2_with_estimate(g, &err);
  r.value = -i2 / (6.0 * kPi);
  r.error_estimate = err / (6.0 * kPi);
  return r;
}

BoundResult fe_2d_massless(const SamplingFunction& g) {
  BoundResult r = flanagan_2d(g);
  r.method = "fewster-eveson-2d";
  r.value *= 1.5;
  r.error_estimate *= 1.5;
  r.inputs["note"] = "constant fixed by the 3/2 ratio to the sharp 2d bound";
  return r;
}

BoundResult static_qei(const SamplingFunction& g, const QWeight& q) {
  const SpectralFunction gh = sampling::fourier_transform(g);
  const double du = gh.suggested_du();
  const double uwin = gh.suggested_umax();
  const double qdom = q.domain_max();
  const double hi = std::min(uwin, qdom);

  std::vector<double> cuts{0.0, hi};
  for (double b : q.breakpoints())
    if (b > 0.0 && b < hi) cuts.push_back(b);

  auto w = [&](double u) { return q(u); };
  const double fine = weighted_integral(gh, w, cuts, du);
  const double coarse = weighted_integral(gh, w, cuts, 2.0 * du);

  BoundResult r;
  r.method = "static-qei";
  r.inputs = {{"g", sampler_json(g)}};
  r.value = -fine;
  r.error_estimate = std::abs(fine - coarse) / 15.0;

  if (qdom < uwin) {
    // weight domain ends inside the spectral window: the discarded tail must
    // be negligible for the bound to be meaningful
    const double tail = q(qdom) * weighted_panel(gh, [](double) { return 1.0; }, qdom, uwin, du);
    if (tail > 1e-10 * std::max(1.0, std::abs(r.value)))
      throw std::runtime_error(
          "precondition: spectral tail beyond the weight's domain is not negligible");
  }
  return r;
}

// ---------------------------------------------------------------------------
// TwoPointKernel and the half-space bound

TwoPointKernel::TwoPointKernel(std::vector<Line> lines) : lines_(std::move(lines)) {
  for (const auto& l : lines_) {
    if (l.omega < 0.0 || l.mu < 0.0)
      throw std::invalid_argument(
          "invalid kernel: lines must have nonnegative frequencies and weights "
          "(positive-frequency, positive-type reference)");
  }
  std::sort(lines_.begin(), lines_.end(), [](const Line& a, const Line& b) { return a.omega < b.omega; });
}

TwoPointKernel TwoPointKernel::from_density(const std::vector<double>& omega_grid,
                                            const std::vector<double>& density) {
  if (omega_grid.size() != density.size() + 1)
    throw std::invalid_argument("invalid kernel density: need one grid edge more than cells");
  std::vector<Line> lines;
  lines.reserve(density.size());
  for (std::size_t i = 0; i < density.size(); ++i) {
    const double w = omega_grid[i + 1] - omega_grid[i];
    if (!(w > 0.0)) throw std::invalid_argument("invalid kernel density: grid must be increasing");
    lines.push_back({0.5 * (omega_grid[i] + omega_grid[i + 1]), density[i] * w});
  }
  return TwoPointKernel(std::move(lines));
}

std::complex<double> TwoPointKernel::value(double t, double tprime) const {
  std::complex<double> acc{0.0, 0.0};
  const double d = t - tprime;
  for (const auto& l : lines_) acc += l.mu * std::complex<double>{std::cos(l.omega * d), -std::sin(l.omega * d)};
  return acc;
}

std::pair<BoundResult, QWeight> worldline_bound_from_kernel(const TwoPointKernel& kernel,
                                                            const SamplingFunction& g) {
  const SpectralFunction gh = sampling::fourier_transform(g);
  const double du = gh.suggested_du();
  const double uwin = gh.suggested_umax();

  auto one = [](double) { return 1.0; };
  double total = 0.0, total_coarse = 0.0;
  for (const auto& l : kernel.lines()) {
    if (l.mu == 0.0 || l.omega >= uwin) continue;
    total += l.mu * weighted_panel(gh, one, l.omega, uwin, du);
    total_coarse += l.mu * weighted_panel(gh, one, l.omega, uwin, 2.0 * du);
  }

  BoundResult r;
  r.method = "kernel-halfspace";
  r.inputs = {{"g", sampler_json(g)}, {"kernel_lines", kernel.lines().size()}};
  r.value = -total / kPi;
  r.error_estimate = std::abs(total - total_coarse) / 15.0 / kPi;

  std::vector<std::pair<double, double>> lines;
  lines.reserve(kernel.lines().size());
  for (const auto& l : kernel.lines()) lines.emplace_back(l.omega, l.mu);
  return {r, QWeight::step_from_lines(std::move(lines))};
}

// ---------------------------------------------------------------------------
// Classical pointwise conditions

StressTensorSample::StressTensorSample(const std::array<std::array<double, 4>, 4>& m) : t(m) {
  double scale = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) scale = std::max(scale, std::abs(t[a][b]));
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b)
      if (std::abs(t[a][b] - t[b][a]) > 1e-12 * std::max(1.0, scale))
        throw std::invalid_argument("invalid stress tensor: not symmetric");
}

StressTensorSample StressTensorSample::diagonal(double rho, double p1, double p2, double p3) {
  std::array<std::array<double, 4>, 4> m{};
  m[0][0] = rho;
  m[1][1] = p1;
  m[2][2] = p2;
  m[3][3] = p3;
  return StressTensorSample(m);
}

double StressTensorSample::contract(const FourVector& u, const FourVector& v) const {
  double acc = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) acc += t[a][b] * u[a] * v[b];
  return acc;
}

double minkowski_dot(const FourVector& u, const FourVector& v) {
  return u[0] * v[0] - u[1] * v[1] - u[2] * v[2] - u[3] * v[3];
}

namespace {

void require_timelike_future(const FourVector& u, const char* name) {
  if (!(minkowski_dot(u, u) > 0.0) || !(u[0] > 0.0))
    throw std::invalid_argument(std::string("precondition: ") + name +
                                " must be timelike and future-directed");
}

}  // namespace

ConditionFlags check_classical_conditions(const StressTensorSample& t, const FourVector& u,
                                          const FourVector& v, const std::optional<FourVector>& k) {
  require_timelike_future(u, "u");
  require_timelike_future(v, "v");
  ConditionFlags f;
  f.dec = t.contract(u, v) >= 0.0;
  f.wec = t.contract(u, u) >= 0.0 && t.contract(v, v) >= 0.0;
  if (k) {
    double scale = 0.0;
    for (double c : *k) scale += c * c;
    if (std::abs(minkowski_dot(*k, *k)) > 1e-12 * std::max(1.0, scale))
      throw std::invalid_argument("precondition: k must be null (tolerance 1e-12 on the norm)");
    f.nec = t.contract(*k, *k) >= 0.0;
  }
  return f;
}

}  // namespace qeilab::bounds
