#ifndef QEILAB_QUANTUM_INTEREST_HPP
#define QEILAB_QUANTUM_INTEREST_HPP

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace qeilab::interest {

struct DeltaPulse {
  double time;
  double amplitude;
};

/// Energy-density profile rho(t) along an inertial worldline: delta pulses
/// regularised as unit-mass Gaussians of width sigma, plus an optional
/// smooth background sampled on a grid.
///
/// Sign convention: a "debt" pulse of magnitude A enters with amplitude -A
/// and its repayment with +A(1+eps).  The toy-model formula is often written
/// with both pulses positive; only the debt reading makes the loan-term
/// constraint nontrivial, so that is what the constructors here use.
struct EnergyProfile {
  std::vector<DeltaPulse> pulses;  // ordered by time
  std::vector<double> background_t, background_rho;
  double sigma = 1e-3;

  double rho(double t) const;
  double potential(double t) const { return 6.0 * 3.14159265358979323846 * rho(t); }
  double amplitude_scale() const;  // max pulse magnitude (0 if none)
  void validate() const;

  nlohmann::json to_json() const;
  static EnergyProfile from_json_file(const std::string& path);
};

/// Debt -A at t = 0, repayment +A(1+eps) at t = T.
EnergyProfile make_delta_pair(double a, double t, double eps, double sigma);

struct DeltaPairConstraints {
  double t_max;                   // 1/(6 pi A)
  std::optional<double> eps_min;  // empty when T >= T_max (infeasible)
};

/// Closed-form loan-term and interest constraints for the delta-pulse pair:
/// T_max = 1/(6 pi A); for T < T_max, eps_min = 6 pi A T / (1 - 6 pi A T).
DeltaPairConstraints delta_pair_constraints(double a, double t);

/// -d^2/dt^2 + 6 pi rho(t) on [-R, R] with Dirichlet ends, discretised by
/// second-order central differences with step h.  The potential must be
/// negligible at the ends and h must resolve sigma (h <= sigma/10).
class SchrodingerOperator {
 public:
  SchrodingerOperator(EnergyProfile profile, double half_width, double h);

  double half_width() const { return r_; }
  double step() const { return h_; }
  std::size_t interior_points() const { return n_; }
  const EnergyProfile& profile() const { return profile_; }

  /// Number of eigenvalues strictly below lambda (one Sturm pass).
  int count_below(double lambda) const;

  /// Smallest eigenvalue by Sturm bisection at this operator's step.
  double lowest_eigenvalue() const;

  struct Extrapolated {
    double value;
    double error_estimate;
  };
  /// Solves at h and h/2 and Richardson-extrapolates the O(h^2) error.
  Extrapolated lowest_eigenvalue_extrapolated() const;

 private:
  struct Window {
    std::size_t first;
    std::vector<double> v;
  };
  void build_windows();

  EnergyProfile profile_;
  double r_ = 0.0;
  double h_ = 0.0;
  std::size_t n_ = 0;  // interior points
  std::vector<Window> windows_;
};

struct Admissibility {
  bool admissible = false;
  double margin = 0.0;     // lowest eigenvalue
  double tolerance = 0.0;  // Richardson estimate + Dirichlet box offset
  double half_width = 0.0;
  double step = 0.0;
};

/// Profile admissibility via positivity of the Schrodinger form.  The
/// default box is R = 50/(6 pi A) with the (pi/2R)^2 Dirichlet offset folded
/// into the tolerance; pass half_width > 0 to override.
Admissibility admissible(const EnergyProfile& profile, double half_width = 0.0);

struct GaussianFamilySpec {
  std::vector<double> taus;     // empty -> default geometric grid
  std::vector<double> centers;  // empty -> default span of the profile
};

struct TestFunctionReport {
  double worst_value = 0.0;  // min over the family of ∫rho g² + (1/6pi)∫|g'|²
  double tau = 0.0;
  double center = 0.0;
  bool certifies_inadmissible = false;

  nlohmann::json to_json() const;
};

/// Variational check with a Gaussian test-function family.  A negative
/// optimum certifies inadmissibility; a nonnegative one is inconclusive
/// (the operator method is sharper).
TestFunctionReport test_function_constraint(const EnergyProfile& profile,
                                            const GaussianFamilySpec& family = {});

/// Numerically determined maximum loan term for the delta pair at
/// regularisation sigma: bisects the binding threshold in T at a large
/// probe interest rate.  Wide search boxes are
/// affordable because potential-free Sturm runs transfer in closed form.
double delta_pair_numeric_t_max(double a, double sigma, double box_scale = 2e4);

/// Numerical minimum interest rate at loan term T (same method, bisection
/// in the rate).
double delta_pair_numeric_eps_min(double a, double t, double sigma, double box_scale = 2e4);

}  // namespace qeilab::interest

#endif
