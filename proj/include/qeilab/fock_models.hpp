#ifndef QEILAB_FOCK_MODELS_HPP
#define QEILAB_FOCK_MODELS_HPP

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qeilab/qei_bounds.hpp"
#include "qeilab/sampling.hpp"

namespace qeilab::fock {

using sampling::SamplingFunction;

/// Box modes of a real scalar field on a circle of length L: momenta
/// k_n = 2 pi n / L, energies omega_n = sqrt(k_n^2 + m^2).  The massless
/// zero mode is excluded by default (its omega = 0 quantisation is
/// ill-defined in a box); retaining n = 0 requires m > 0.
struct ModeBasis {
  double box_length = 10.0;
  double mass = 0.0;
  int n_min = -3;
  int n_max = 3;
  bool include_zero_mode = false;

  std::vector<int> mode_numbers() const;
  double momentum(int n) const;
  double energy(int n) const;

  nlohmann::json to_json(int total_cutoff) const;
};

/// Occupation-number basis with a total-quanta cutoff.  States are
/// enumerated graded by total occupation and, within a grade, in ascending
/// lexicographic order of the occupation vector (slot order = mode order).
/// The vacuum is index 0.
class TruncatedFockSpace {
 public:
  TruncatedFockSpace(ModeBasis basis, int total_cutoff, std::size_t dimension_cap = 200000);

  std::size_t dimension() const { return dim_; }
  int total_cutoff() const { return cutoff_; }
  const ModeBasis& mode_basis() const { return basis_; }
  int num_modes() const { return static_cast<int>(modes_.size()); }
  const std::vector<int>& modes() const { return modes_; }

  std::uint8_t occupation(std::size_t state, int slot) const { return occ_[state * modes_.size() + static_cast<std::size_t>(slot)]; }
  const std::uint8_t* occupation_row(std::size_t state) const { return &occ_[state * modes_.size()]; }
  int total_occupation(std::size_t state) const { return totals_[state]; }

  /// Index after adding/removing one quantum in a slot; -1 when the result
  /// leaves the truncated space.
  std::int32_t raise_index(std::size_t state, int slot) const { return raise_[state * modes_.size() + static_cast<std::size_t>(slot)]; }
  std::int32_t lower_index(std::size_t state, int slot) const { return lower_[state * modes_.size() + static_cast<std::size_t>(slot)]; }

  std::size_t index_of(const std::vector<std::uint8_t>& occ) const;

 private:
  std::ptrdiff_t find(const std::uint8_t* occ, int total) const;

  ModeBasis basis_;
  int cutoff_ = 0;
  std::size_t dim_ = 0;
  std::vector<int> modes_;
  std::vector<std::uint8_t> occ_;      // dim x M occupation matrix
  std::vector<std::uint8_t> totals_;
  std::vector<std::size_t> grade_offset_;  // first index of each total-occupation grade
  std::vector<std::int32_t> raise_, lower_;
};

TruncatedFockSpace build_space(const ModeBasis& basis, int total_cutoff,
                               std::size_t dimension_cap = 200000);

struct LanczosOptions {
  int max_iterations = 140;
  double tolerance = 1e-10;
  std::uint64_t seed = 0x5eedULL;
  bool force_iterative = false;  // skip the dense small-space path
};

/// Hermitian quadratic form in the ladder operators,
///   A = sum_pq dag(p,q) a_p^† a_q + sum_pq [ pair(p,q) a_p a_q + h.c. ],
/// applied matrix-free on the truncated basis.  Normal ordering means the
/// vacuum expectation of every such operator vanishes identically.
class FieldOperatorMatrix {
 public:
  FieldOperatorMatrix(const TruncatedFockSpace& space, Eigen::MatrixXcd dag, Eigen::MatrixXcd pair,
                      std::string label);

  const TruncatedFockSpace& space() const { return *space_; }
  const std::string& label() const { return label_; }
  bool hermitian() const { return hermitian_; }
  const Eigen::MatrixXcd& dag_coeff() const { return dag_; }
  const Eigen::MatrixXcd& pair_coeff() const { return pair_; }

  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;
  /// <x|A x> / <x|x>
  double expectation(const Eigen::VectorXcd& x) const;
  Eigen::VectorXcd vacuum_image() const;  // A|vacuum>

  Eigen::MatrixXcd dense(std::size_t cap = 4000) const;

  /// Smallest eigenvalue: dense solve for small spaces, Lanczos with full
  /// reorthogonalisation otherwise.  Eigenvalues are reported ascending;
  /// the returned vector is the associated Ritz vector.
  std::pair<double, Eigen::VectorXcd> lowest_eigenpair(const LanczosOptions& opts = {}) const;
  double lowest_eigenvalue(const LanczosOptions& opts = {}) const;

 private:
  const TruncatedFockSpace* space_;
  Eigen::MatrixXcd dag_, pair_;
  std::string label_;
  bool hermitian_ = false;
};

/// Ĝ(omega) = ∫ W(t) e^{i omega t} dt of a real smearing weight.
using WeightHat = std::function<std::complex<double>(double)>;

/// Energy-density operator :T00:(t, x) as a ladder quadratic form.
FieldOperatorMatrix energy_density_matrix(const TruncatedFockSpace& space, double t, double x);

/// A = ∫ dt W(t) :T00:(t, x0) given the weight's Fourier transform.
FieldOperatorMatrix smeared_t00(const TruncatedFockSpace& space, const WeightHat& weight_hat,
                                double x0, std::string label);

/// A = ∫ dt g(t)^2 :T00:(t, x0); the Gaussian kind integrates exactly,
/// other kinds by quadrature on g's grid (which must resolve the fastest
/// retained mode, dt <= 0.1/omega_max).
FieldOperatorMatrix smeared_energy(const TruncatedFockSpace& space, const SamplingFunction& g,
                                   double x0 = 0.0);

/// Ĝ for W = g(t)^2 (closed form for the gaussian kind).
WeightHat weight_hat_from_g_squared(const SamplingFunction& g);
/// Ĝ for W = f(t) itself.
WeightHat weight_hat_from_function(const SamplingFunction& f);

/// cos(alpha) vacuum + sin(alpha) A vacuum / ||A vacuum||, normalised.
Eigen::VectorXcd egj_state(const FieldOperatorMatrix& a, double alpha);

struct EgjParameters {
  double zeta;  // ||A vacuum||
  double eta;   // <vac|A^3 vac> / (2 zeta^2)
};
EgjParameters egj_parameters(const FieldOperatorMatrix& a);

/// min over alpha of  zeta sin 2a + eta (1 - cos 2a)  =  eta - sqrt(eta^2 + zeta^2).
double egj_bound(double zeta, double eta);

/// Vacuum worldline kernel of the model's energy density: spectral lines
/// (omega_n, omega_n / 2L) per retained mode.
bounds::TwoPointKernel vacuum_kernel(const TruncatedFockSpace& space);

/// Unsubtracted mode-sum zero-point energy (removed by normal ordering;
/// reported for reference only).
double casimir_vacuum_energy(const TruncatedFockSpace& space);

struct StateSampleSpec {
  std::size_t count = 200;
  std::uint64_t seed = 1;
  bool include_lowest_eigenvector = true;
};

struct VerifyReport {
  double bound_value = 0.0;
  double tolerance = 0.0;
  double min_expectation = 0.0;
  double max_expectation = 0.0;
  double lowest_eigenvalue = 0.0;
  bool lowest_included = false;
  std::size_t violations = 0;
  bool pass = false;
  double flanagan_reference = 0.0;  // infinite-line trend reference, not asserted
  std::vector<double> expectations;

  nlohmann::json to_json() const;
  void write_csv(const std::string& path) const;
};

/// Checks seeded random states (plus optionally the lowest eigenvector of
/// the smeared operator) against a bound; violations beyond the declared
/// tolerance are reported, never thrown.
VerifyReport verify_qei(const TruncatedFockSpace& space, const SamplingFunction& g,
                        const bounds::BoundResult& bound, const StateSampleSpec& spec,
                        double x0 = 0.0);

/// Model description file: {L, mass, n_min, n_max, N_max, zero_mode}.
std::pair<ModeBasis, int> load_model_json(const std::string& path);
void save_model_json(const ModeBasis& basis, int total_cutoff, const std::string& path);

}  // namespace qeilab::fock

#endif
