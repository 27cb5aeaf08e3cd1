#ifndef QEILAB_QEI_BOUNDS_HPP
#define QEILAB_QEI_BOUNDS_HPP

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qeilab/sampling.hpp"

namespace qeilab::bounds {

using sampling::SamplingFunction;
using sampling::SpectralFunction;

/// Result of a lower-bound evaluation.  value <= 0 for every QEI method;
/// error_estimate is a quadrature residual (0 for closed forms).
struct BoundResult {
  double value = 0.0;
  std::string method;
  double error_estimate = 0.0;
  nlohmann::json inputs;

  nlohmann::json to_json() const;
};

/// Mass-dependent factor of the four-dimensional worldline bound,
/// defined on [1, inf) and valued in [0, 1]; monotone increasing with
/// q3(1) = 0 and q3 -> 1 at infinity.  Uses a cancellation-safe expansion
/// just above x = 1.
double q3(double x);

/// Lorentzian-weight worldline bound for the massless field in four
/// dimensions: -3/(32 pi^2 tau^4), exact.
BoundResult ford_roman_rhs(double tau);

/// Nonnegative, monotone non-decreasing spectral weight Q(u) defining a
/// static-form bound  -∫ Q(u)|ĝ(u)|² du.
class QWeight {
 public:
  enum class Rep { fewster_eveson, step, tabulated };

  /// Q(u) = u^4 Q3(u/m) / (16 pi^3) for u >= m (the massless branch uses
  /// Q3 == 1).
  static QWeight fewster_eveson(double mass);

  /// Step weight induced by a discrete spectral measure: Q jumps by mu/pi
  /// at each frequency omega.
  static QWeight step_from_lines(std::vector<std::pair<double, double>> lines);

  /// Piecewise-linear tabulated weight, continued with its last value past
  /// the final node; rejected unless nonnegative and monotone non-decreasing.
  static QWeight tabulated(std::vector<double> u, std::vector<double> q);

  double operator()(double u) const;
  Rep representation() const { return rep_; }
  /// +inf for representations defined on the whole half-line.
  double domain_max() const;
  /// Points where the weight is not smooth; bound integrals split here.
  std::vector<double> breakpoints() const;

  void write_csv(const std::string& path, double umax = 0.0, std::size_t n = 512) const;
  static QWeight load_csv(const std::string& path);

 private:
  QWeight() = default;
  Rep rep_ = Rep::tabulated;
  double mass_ = 0.0;
  std::vector<std::pair<double, double>> lines_;  // (omega, mu), sorted
  std::vector<double> tab_u_, tab_q_;
};

/// Worldline bound for a scalar field of mass m >= 0 in four dimensions:
///   -(1/16 pi^3) ∫_m^inf du |ĝ(u)|² u^4 Q3(u/m).
BoundResult fewster_eveson_4d(const SamplingFunction& g, double mass);

/// Sharp massless bound in two dimensions: -(1/6 pi) ∫ |g'(t)|² dt.
BoundResult flanagan_2d(const SamplingFunction& g);

/// Two-dimensional massless bound of the general worldline argument.  The
/// constant -(1/4 pi) is reconstructed from the known 3/2 ratio against the
/// sharp bound; it is not independently derived here.
BoundResult fe_2d_massless(const SamplingFunction& g);

/// Generic static-form bound  -∫_0^inf du Q(u) |ĝ(u)|².
BoundResult static_qei(const SamplingFunction& g, const QWeight& q);

/// Reference two-point kernel along a static worldline, represented by a
/// discrete spectral measure: W(t,t') = Σ_j mu_j e^{-i omega_j (t-t')}.
/// Positive type and positive frequency are enforced at construction
/// (the flat-chart stand-in for the microlocal spectrum condition).
class TwoPointKernel {
 public:
  struct Line {
    double omega;
    double mu;
  };

  explicit TwoPointKernel(std::vector<Line> lines);
  /// Discretises a continuous spectral density into lines at the midpoints
  /// of the given grid cells.
  static TwoPointKernel from_density(const std::vector<double>& omega_grid,
                                     const std::vector<double>& density);

  const std::vector<Line>& lines() const { return lines_; }
  std::complex<double> value(double t, double tprime) const;

 private:
  std::vector<Line> lines_;
};

/// Half-space positivity bound built from a reference kernel:
///   value = -(1/pi) Σ_j mu_j ∫_0^inf |ĝ(xi + omega_j)|² dxi,
/// together with the induced step weight Q(u) = (1/pi) Σ_{omega_j < u} mu_j
/// for which static_qei(g, Q) reproduces the same number.
std::pair<BoundResult, QWeight> worldline_bound_from_kernel(const TwoPointKernel& kernel,
                                                            const SamplingFunction& g);

using FourVector = std::array<double, 4>;

/// 4x4 symmetric stress tensor sample, signature (+,-,-,-).
struct StressTensorSample {
  explicit StressTensorSample(const std::array<std::array<double, 4>, 4>& t);
  static StressTensorSample diagonal(double rho, double p1, double p2, double p3);
  double contract(const FourVector& u, const FourVector& v) const;
  std::array<std::array<double, 4>, 4> t;
};

struct ConditionFlags {
  bool dec = false;
  bool wec = false;
  std::optional<bool> nec;
};

double minkowski_dot(const FourVector& u, const FourVector& v);

/// Pointwise classical energy conditions for the supplied contractions:
/// dec uses the (u,v) pair, wec the diagonal contractions, nec the optional
/// null vector (validated to 1e-12 on the norm).
ConditionFlags check_classical_conditions(const StressTensorSample& t, const FourVector& u,
                                          const FourVector& v,
                                          const std::optional<FourVector>& k = std::nullopt);

}  // namespace qeilab::bounds

#endif
