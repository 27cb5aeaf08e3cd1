#include "qeilab/fock_models.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "qeilab/quadrature.hpp"
#include "qeilab/random.hpp"

namespace qeilab::fock {

namespace {
constexpr double kPi = std::numbers::pi;
}

// ---------------------------------------------------------------------------
// ModeBasis

std::vector<int> ModeBasis::mode_numbers() const {
  if (!(box_length > 0.0)) throw std::invalid_argument("invalid-parameter: box length must be positive");
  if (mass < 0.0) throw std::invalid_argument("invalid-parameter: mass must be nonnegative");
  if (n_min > n_max) throw std::invalid_argument("invalid-parameter: empty mode range");
  std::vector<int> out;
  for (int n = n_min; n <= n_max; ++n) {
    if (n == 0) {
      if (mass == 0.0) {
        if (include_zero_mode)
          throw std::invalid_argument(
              "invalid-parameter: the massless zero mode has omega = 0 and cannot be retained; "
              "use a small positive mass instead");
        continue;  // excluded by policy
      }
      if (!include_zero_mode) continue;
    }
    out.push_back(n);
  }
  if (out.empty()) throw std::invalid_argument("invalid-parameter: no modes retained");
  return out;
}

double ModeBasis::momentum(int n) const { return 2.0 * kPi * static_cast<double>(n) / box_length; }

double ModeBasis::energy(int n) const {
  const double k = momentum(n);
  return std::sqrt(k * k + mass * mass);
}

nlohmann::json ModeBasis::to_json(int total_cutoff) const {
  return {{"L", box_length}, {"mass", mass},          {"n_min", n_min},
          {"n_max", n_max},  {"N_max", total_cutoff}, {"zero_mode", include_zero_mode}};
}

// ---------------------------------------------------------------------------
// TruncatedFockSpace

TruncatedFockSpace::TruncatedFockSpace(ModeBasis basis, int total_cutoff, std::size_t dimension_cap)
    : basis_(std::move(basis)), cutoff_(total_cutoff) {
  if (cutoff_ < 2)
    throw std::invalid_argument("invalid-parameter: total cutoff must be at least 2 "
                                "(two-particle sectors are essential)");
  modes_ = basis_.mode_numbers();
  const std::size_t m = modes_.size();

  // combinatorial dimension check before any enumeration
  double count = 0.0;
  for (int k = 0; k <= cutoff_; ++k) {
    double c = 1.0;
    for (int j = 1; j <= k; ++j) c *= static_cast<double>(m + static_cast<std::size_t>(k) - static_cast<std::size_t>(j)) / static_cast<double>(j);
    count += c;
  }
  if (count > static_cast<double>(dimension_cap))
    throw std::invalid_argument("refused: truncated space dimension " + std::to_string(static_cast<std::size_t>(count)) +
                                " exceeds the cap " + std::to_string(dimension_cap));

  // graded enumeration, ascending lexicographic occupation vectors
  std::vector<std::uint8_t> occ(m, 0);
  grade_offset_.assign(static_cast<std::size_t>(cutoff_) + 2, 0);
  std::function<void(std::size_t, int)> emit = [&](std::size_t slot, int remaining) {
    if (slot + 1 == m) {
      occ[slot] = static_cast<std::uint8_t>(remaining);
      occ_.insert(occ_.end(), occ.begin(), occ.end());
      ++dim_;
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      occ[slot] = static_cast<std::uint8_t>(c);
      emit(slot + 1, remaining - c);
    }
    occ[slot] = 0;
  };
  for (int k = 0; k <= cutoff_; ++k) {
    grade_offset_[static_cast<std::size_t>(k)] = dim_;
    emit(0, k);
  }
  grade_offset_[static_cast<std::size_t>(cutoff_) + 1] = dim_;
  if (dim_ != static_cast<std::size_t>(std::llround(count)))
    throw std::logic_error("basis enumeration does not match the multiset count");

  totals_.resize(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    int tot = 0;
    for (std::size_t s = 0; s < m; ++s) tot += occ_[i * m + s];
    totals_[i] = static_cast<std::uint8_t>(tot);
  }

  raise_.assign(dim_ * m, -1);
  lower_.assign(dim_ * m, -1);
  std::vector<std::uint8_t> tmp(m);
  for (std::size_t i = 0; i < dim_; ++i) {
    const std::uint8_t* row = &occ_[i * m];
    const int tot = totals_[i];
    for (std::size_t s = 0; s < m; ++s) {
      if (tot < cutoff_) {
        std::memcpy(tmp.data(), row, m);
        ++tmp[s];
        raise_[i * m + s] = static_cast<std::int32_t>(find(tmp.data(), tot + 1));
      }
      if (row[s] > 0) {
        std::memcpy(tmp.data(), row, m);
        --tmp[s];
        lower_[i * m + s] = static_cast<std::int32_t>(find(tmp.data(), tot - 1));
      }
    }
  }
}

std::ptrdiff_t TruncatedFockSpace::find(const std::uint8_t* target, int total) const {
  const std::size_t m = modes_.size();
  std::size_t lo = grade_offset_[static_cast<std::size_t>(total)];
  std::size_t hi = grade_offset_[static_cast<std::size_t>(total) + 1];
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    const int cmp = std::memcmp(&occ_[mid * m], target, m);
    if (cmp < 0)
      lo = mid + 1;
    else
      hi = mid;
  }
  return static_cast<std::ptrdiff_t>(lo);
}

std::size_t TruncatedFockSpace::index_of(const std::vector<std::uint8_t>& occ) const {
  if (occ.size() != modes_.size()) throw std::invalid_argument("occupation vector has wrong length");
  int tot = 0;
  for (auto c : occ) tot += c;
  if (tot > cutoff_) throw std::invalid_argument("occupation exceeds the total cutoff");
  const auto i = static_cast<std::size_t>(find(occ.data(), tot));
  if (i >= dim_ || std::memcmp(&occ_[i * modes_.size()], occ.data(), modes_.size()) != 0)
    throw std::invalid_argument("occupation vector not found");
  return i;
}

TruncatedFockSpace build_space(const ModeBasis& basis, int total_cutoff, std::size_t dimension_cap) {
  return TruncatedFockSpace(basis, total_cutoff, dimension_cap);
}

// ---------------------------------------------------------------------------
// FieldOperatorMatrix

FieldOperatorMatrix::FieldOperatorMatrix(const TruncatedFockSpace& space, Eigen::MatrixXcd dag,
                                         Eigen::MatrixXcd pair, std::string label)
    : space_(&space), dag_(std::move(dag)), pair_(std::move(pair)), label_(std::move(label)) {
  const auto m = static_cast<Eigen::Index>(space.num_modes());
  if (dag_.rows() != m || dag_.cols() != m || pair_.rows() != m || pair_.cols() != m)
    throw std::invalid_argument("coefficient matrices must be M x M");
  // a_p a_q commute, so only the symmetric part of the pair coefficients acts
  pair_ = 0.5 * (pair_ + pair_.transpose()).eval();
  hermitian_ = (dag_ - dag_.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, dag_.cwiseAbs().maxCoeff());
}

Eigen::VectorXcd FieldOperatorMatrix::apply(const Eigen::VectorXcd& x) const {
  const auto& sp = *space_;
  const std::size_t dim = sp.dimension();
  const int m = sp.num_modes();
  if (static_cast<std::size_t>(x.size()) != dim) throw std::invalid_argument("state vector has wrong dimension");

  Eigen::VectorXcd y = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
  const int nmax = sp.total_cutoff();
  std::vector<double> sq(static_cast<std::size_t>(nmax) + 2);
  for (std::size_t k = 0; k < sq.size(); ++k) sq[k] = std::sqrt(static_cast<double>(k));

  // transpose of pair coefficients not needed: pair_ is used symmetrically
  for (std::size_t i = 0; i < dim; ++i) {
    const std::complex<double> xi = x[static_cast<Eigen::Index>(i)];
    if (xi == std::complex<double>{0.0, 0.0}) continue;
    const std::uint8_t* occ = sp.occupation_row(i);
    const int tot = sp.total_occupation(i);

    // a_p^dag a_q
    for (int q = 0; q < m; ++q) {
      const int cq = occ[q];
      if (cq == 0) continue;
      const auto i2 = static_cast<std::size_t>(sp.lower_index(i, q));
      const std::complex<double> base = xi * sq[static_cast<std::size_t>(cq)];
      const std::complex<double>* col = dag_.col(q).data();
      for (int p = 0; p < m; ++p) {
        const int cp = occ[p] - (p == q ? 1 : 0);
        const auto j = static_cast<std::size_t>(sp.raise_index(i2, p));
        y[static_cast<Eigen::Index>(j)] += col[p] * (base * sq[static_cast<std::size_t>(cp) + 1]);
      }
    }

    // a_p a_q (two lowerings)
    if (tot >= 2) {
      for (int q1 = 0; q1 < m; ++q1) {
        const int c1 = occ[q1];
        if (c1 == 0) continue;
        const auto i2 = static_cast<std::size_t>(sp.lower_index(i, q1));
        const std::complex<double> base1 = xi * sq[static_cast<std::size_t>(c1)];
        for (int q2 = 0; q2 < m; ++q2) {
          const int c2 = occ[q2] - (q1 == q2 ? 1 : 0);
          if (c2 <= 0) continue;
          const auto j = static_cast<std::size_t>(sp.lower_index(i2, q2));
          y[static_cast<Eigen::Index>(j)] += pair_(q1, q2) * (base1 * sq[static_cast<std::size_t>(c2)]);
        }
      }
    }

    // a_p^dag a_q^dag (conjugate coefficients)
    if (tot <= nmax - 2) {
      for (int p1 = 0; p1 < m; ++p1) {
        const auto i2 = static_cast<std::size_t>(sp.raise_index(i, p1));
        const std::complex<double> base1 = xi * sq[static_cast<std::size_t>(occ[p1]) + 1];
        const std::complex<double>* col = pair_.col(p1).data();
        for (int p2 = 0; p2 < m; ++p2) {
          const int cp = occ[p2] + (p1 == p2 ? 1 : 0);
          const auto j = static_cast<std::size_t>(sp.raise_index(i2, p2));
          // coefficient of a_{p2}^dag a_{p1}^dag term is conj(pair(p2,p1));
          // pair_ enters symmetrically so the column read is safe
          y[static_cast<Eigen::Index>(j)] += std::conj(col[p2]) * (base1 * sq[static_cast<std::size_t>(cp) + 1]);
        }
      }
    }
  }
  return y;
}

double FieldOperatorMatrix::expectation(const Eigen::VectorXcd& x) const {
  const double n2 = x.squaredNorm();
  if (!(n2 > 0.0)) throw std::invalid_argument("expectation of the zero vector");
  const std::complex<double> v = x.dot(apply(x));  // Eigen dot conjugates the left factor
  return v.real() / n2;
}

Eigen::VectorXcd FieldOperatorMatrix::vacuum_image() const {
  Eigen::VectorXcd omega = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(space_->dimension()));
  omega[0] = 1.0;
  return apply(omega);
}

Eigen::MatrixXcd FieldOperatorMatrix::dense(std::size_t cap) const {
  const std::size_t dim = space_->dimension();
  if (dim > cap) throw std::runtime_error("dense conversion refused: dimension exceeds cap");
  Eigen::MatrixXcd a(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
  for (std::size_t j = 0; j < dim; ++j) {
    e[static_cast<Eigen::Index>(j)] = 1.0;
    a.col(static_cast<Eigen::Index>(j)) = apply(e);
    e[static_cast<Eigen::Index>(j)] = 0.0;
  }
  return a;
}

std::pair<double, Eigen::VectorXcd> FieldOperatorMatrix::lowest_eigenpair(const LanczosOptions& opts) const {
  const std::size_t dim = space_->dimension();
  if (dim <= 2500 && !opts.force_iterative) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense(2500));
    return {es.eigenvalues()(0), es.eigenvectors().col(0)};
  }

  // Lanczos with full reorthogonalisation; the Ritz value is a variational
  // upper bound on the smallest eigenvalue at every step.
  const int mmax = std::min<int>(opts.max_iterations, static_cast<int>(dim));
  SeededRng rng(opts.seed);
  std::vector<Eigen::VectorXcd> basis;
  basis.reserve(static_cast<std::size_t>(mmax));
  Eigen::VectorXcd q(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < q.size(); ++i) q[i] = rng.complex_normal();
  q.normalize();
  basis.push_back(q);

  std::vector<double> alpha, beta;
  double best = 0.0;
  Eigen::VectorXd ritz_small;
  for (int k = 0; k < mmax; ++k) {
    Eigen::VectorXcd w = apply(basis.back());
    const double a = std::real(basis.back().dot(w));
    alpha.push_back(a);
    w -= a * basis.back();
    if (k > 0) w -= beta.back() * basis[static_cast<std::size_t>(k) - 1];
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) w -= b.dot(w) * b;
    const double bnorm = w.norm();

    // small tridiagonal solve
    const auto n = static_cast<Eigen::Index>(alpha.size());
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      t(i, i) = alpha[static_cast<std::size_t>(i)];
      if (i + 1 < n) t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    best = es.eigenvalues()(0);
    ritz_small = es.eigenvectors().col(0);
    const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    if (bnorm * std::abs(ritz_small(n - 1)) < opts.tolerance * scale || bnorm < 1e-14 * scale) break;
    if (k + 1 < mmax) {
      beta.push_back(bnorm);
      basis.push_back(w / bnorm);
    }
  }

  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < static_cast<std::size_t>(ritz_small.size()) && i < basis.size(); ++i)
    v += ritz_small(static_cast<Eigen::Index>(i)) * basis[i];
  v.normalize();
  return {best, v};
}

double FieldOperatorMatrix::lowest_eigenvalue(const LanczosOptions& opts) const {
  return lowest_eigenpair(opts).first;
}

// ---------------------------------------------------------------------------
// Operator builders

namespace {

// Coefficient matrices for a quadratic in the box mode functions
// u_n(t,x) = e^{i(k_n x - omega_n t)} / sqrt(2 L omega_n):
//   S_pq =  omega_p omega_q + k_p k_q + m^2   (a^dag a cross terms)
//   T_pq = -omega_p omega_q - k_p k_q + m^2   (a a / a^dag a^dag terms)
struct ModeData {
  std::vector<double> k, w, rt;  // momentum, energy, 1/sqrt(2 L omega)
  double mass = 0.0;
};

ModeData mode_data(const TruncatedFockSpace& sp) {
  ModeData md;
  const auto& basis = sp.mode_basis();
  md.mass = basis.mass;
  for (int n : sp.modes()) {
    md.k.push_back(basis.momentum(n));
    md.w.push_back(basis.energy(n));
    md.rt.push_back(1.0 / std::sqrt(2.0 * basis.box_length * basis.energy(n)));
  }
  return md;
}

}  // namespace

FieldOperatorMatrix energy_density_matrix(const TruncatedFockSpace& space, double t, double x) {
  if (!std::isfinite(t) || !std::isfinite(x)) throw std::invalid_argument("(t,x) must be finite");
  const ModeData md = mode_data(space);
  const int m = space.num_modes();
  Eigen::MatrixXcd dag(m, m), pair(m, m);
  const double m2 = md.mass * md.mass;
  for (int p = 0; p < m; ++p) {
    for (int q = 0; q < m; ++q) {
      const double s = md.w[static_cast<std::size_t>(p)] * md.w[static_cast<std::size_t>(q)] + md.k[static_cast<std::size_t>(p)] * md.k[static_cast<std::size_t>(q)] + m2;
      const double tt = -md.w[static_cast<std::size_t>(p)] * md.w[static_cast<std::size_t>(q)] - md.k[static_cast<std::size_t>(p)] * md.k[static_cast<std::size_t>(q)] + m2;
      const double norm = md.rt[static_cast<std::size_t>(p)] * md.rt[static_cast<std::size_t>(q)];
      const double phase_dag = -(md.k[static_cast<std::size_t>(p)] - md.k[static_cast<std::size_t>(q)]) * x + (md.w[static_cast<std::size_t>(p)] - md.w[static_cast<std::size_t>(q)]) * t;
      const double phase_pair = (md.k[static_cast<std::size_t>(p)] + md.k[static_cast<std::size_t>(q)]) * x - (md.w[static_cast<std::size_t>(p)] + md.w[static_cast<std::size_t>(q)]) * t;
      dag(p, q) = s * norm * std::complex<double>{std::cos(phase_dag), std::sin(phase_dag)};
      pair(p, q) = 0.5 * tt * norm * std::complex<double>{std::cos(phase_pair), std::sin(phase_pair)};
    }
  }
  char label[96];
  std::snprintf(label, sizeof label, ":T00:(%g, %g)", t, x);
  return FieldOperatorMatrix(space, std::move(dag), std::move(pair), label);
}

FieldOperatorMatrix smeared_t00(const TruncatedFockSpace& space, const WeightHat& weight_hat,
                                double x0, std::string label) {
  const ModeData md = mode_data(space);
  const int m = space.num_modes();
  Eigen::MatrixXcd dag(m, m), pair(m, m);
  const double m2 = md.mass * md.mass;
  for (int p = 0; p < m; ++p) {
    for (int q = 0; q < m; ++q) {
      const double s = md.w[static_cast<std::size_t>(p)] * md.w[static_cast<std::size_t>(q)] + md.k[static_cast<std::size_t>(p)] * md.k[static_cast<std::size_t>(q)] + m2;
      const double tt = -md.w[static_cast<std::size_t>(p)] * md.w[static_cast<std::size_t>(q)] - md.k[static_cast<std::size_t>(p)] * md.k[static_cast<std::size_t>(q)] + m2;
      const double norm = md.rt[static_cast<std::size_t>(p)] * md.rt[static_cast<std::size_t>(q)];
      const double dk = md.k[static_cast<std::size_t>(p)] - md.k[static_cast<std::size_t>(q)];
      const double sk = md.k[static_cast<std::size_t>(p)] + md.k[static_cast<std::size_t>(q)];
      const std::complex<double> ghat_diff = weight_hat(md.w[static_cast<std::size_t>(p)] - md.w[static_cast<std::size_t>(q)]);
      const std::complex<double> ghat_sum = weight_hat(-(md.w[static_cast<std::size_t>(p)] + md.w[static_cast<std::size_t>(q)]));
      const std::complex<double> ph_dag{std::cos(dk * x0), -std::sin(dk * x0)};
      const std::complex<double> ph_pair{std::cos(sk * x0), std::sin(sk * x0)};
      dag(p, q) = s * norm * ph_dag * ghat_diff;
      pair(p, q) = 0.5 * tt * norm * ph_pair * ghat_sum;
    }
  }
  return FieldOperatorMatrix(space, std::move(dag), std::move(pair), std::move(label));
}

WeightHat weight_hat_from_g_squared(const SamplingFunction& g) {
  if (g.kind() == sampling::SamplerKind::gaussian) {
    const double tau = g.tau();
    const double a2 = g.amplitude() * g.amplitude();
    return [tau, a2](double omega) {
      return std::complex<double>{a2 * tau * std::sqrt(kPi) * std::exp(-tau * tau * omega * omega / 4.0), 0.0};
    };
  }
  // quadrature over the stored grid of g^2
  auto samples = std::make_shared<std::vector<double>>(g.size());
  auto times = std::make_shared<std::vector<double>>(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    (*times)[i] = g.grid_time(i);
    (*samples)[i] = g.samples()[i] * g.samples()[i];
  }
  const double dt = g.dt();
  return [samples, times, dt](double omega) {
    std::vector<double> re(samples->size()), im(samples->size());
    for (std::size_t i = 0; i < samples->size(); ++i) {
      re[i] = (*samples)[i] * std::cos(omega * (*times)[i]);
      im[i] = (*samples)[i] * std::sin(omega * (*times)[i]);
    }
    return std::complex<double>{simpson_samples(re, dt), simpson_samples(im, dt)};
  };
}

WeightHat weight_hat_from_function(const SamplingFunction& f) {
  auto samples = std::make_shared<std::vector<double>>(f.samples());
  auto times = std::make_shared<std::vector<double>>(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) (*times)[i] = f.grid_time(i);
  const double dt = f.dt();
  return [samples, times, dt](double omega) {
    std::vector<double> re(samples->size()), im(samples->size());
    for (std::size_t i = 0; i < samples->size(); ++i) {
      re[i] = (*samples)[i] * std::cos(omega * (*times)[i]);
      im[i] = (*samples)[i] * std::sin(omega * (*times)[i]);
    }
    return std::complex<double>{simpson_samples(re, dt), simpson_samples(im, dt)};
  };
}

FieldOperatorMatrix smeared_energy(const TruncatedFockSpace& space, const SamplingFunction& g,
                                   double x0) {
  if (g.kind() != sampling::SamplerKind::gaussian) {
    double wmax = 0.0;
    for (int n : space.modes()) wmax = std::max(wmax, space.mode_basis().energy(n));
    if (g.dt() > 0.1 / wmax)
      throw std::invalid_argument(
          "quadrature-resolution: g's grid does not resolve the fastest retained mode "
          "(need dt <= 0.1/omega_max)");
  }
  char label[64];
  std::snprintf(label, sizeof label, "int g^2 :T00:(t, %g) dt", x0);
  return smeared_t00(space, weight_hat_from_g_squared(g), x0, label);
}

// ---------------------------------------------------------------------------
// Negative-energy construction

Eigen::VectorXcd egj_state(const FieldOperatorMatrix& a, double alpha) {
  Eigen::VectorXcd v = a.vacuum_image();
  const double norm = v.norm();
  if (!(norm > 0.0))
    throw std::invalid_argument("precondition: the operator must not annihilate the vacuum");
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(v.size());
  psi[0] = std::cos(alpha);
  psi += (std::sin(alpha) / norm) * v;
  psi.normalize();
  return psi;
}

EgjParameters egj_parameters(const FieldOperatorMatrix& a) {
  const Eigen::VectorXcd w1 = a.vacuum_image();
  const double zeta = w1.norm();
  if (!(zeta > 0.0))
    throw std::invalid_argument("precondition: the operator must not annihilate the vacuum");
  const Eigen::VectorXcd w2 = a.apply(w1);
  const double a3 = std::real(w1.dot(w2));  // <vac|A^3 vac> = <A vac | A (A vac)>
  return {zeta, a3 / (2.0 * zeta * zeta)};
}

double egj_bound(double zeta, double eta) {
  if (!(zeta > 0.0)) throw std::invalid_argument("precondition: egj_bound requires zeta > 0");
  return eta - std::sqrt(eta * eta + zeta * zeta);
}

bounds::TwoPointKernel vacuum_kernel(const TruncatedFockSpace& space) {
  std::vector<bounds::TwoPointKernel::Line> lines;
  const auto& basis = space.mode_basis();
  for (int n : space.modes()) {
    const double w = basis.energy(n);
    lines.push_back({w, w / (2.0 * basis.box_length)});
  }
  return bounds::TwoPointKernel(std::move(lines));
}

double casimir_vacuum_energy(const TruncatedFockSpace& space) {
  double e = 0.0;
  for (int n : space.modes()) e += 0.5 * space.mode_basis().energy(n);
  return e;
}

// ---------------------------------------------------------------------------
// Verification

nlohmann::json VerifyReport::to_json() const {
  return {{"bound_value", bound_value},
          {"tolerance", tolerance},
          {"min_expectation", min_expectation},
          {"max_expectation", max_expectation},
          {"lowest_eigenvalue", lowest_eigenvalue},
          {"lowest_included", lowest_included},
          {"violations", violations},
          {"pass", pass},
          {"flanagan_reference", flanagan_reference},
          {"states", expectations.size()}};
}

void VerifyReport::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << "state_index,expectation\n";
  char buf[64];
  for (std::size_t i = 0; i < expectations.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i, expectations[i]);
    out << buf;
  }
}

VerifyReport verify_qei(const TruncatedFockSpace& space, const SamplingFunction& g,
                        const bounds::BoundResult& bound, const StateSampleSpec& spec,
                        double x0) {
  const FieldOperatorMatrix a = smeared_energy(space, g, x0);
  VerifyReport rep;
  rep.bound_value = bound.value;
  rep.tolerance = bound.error_estimate + 1e-8 * std::max(1.0, std::abs(bound.value));
  rep.flanagan_reference = bounds::flanagan_2d(g).value;

  SeededRng rng(spec.seed);
  const auto dim = static_cast<Eigen::Index>(space.dimension());
  rep.expectations.reserve(spec.count + 1);
  for (std::size_t s = 0; s < spec.count; ++s) {
    Eigen::VectorXcd psi(dim);
    for (Eigen::Index i = 0; i < dim; ++i) psi[i] = rng.complex_normal();
    psi.normalize();
    rep.expectations.push_back(a.expectation(psi));
  }
  if (spec.include_lowest_eigenvector) {
    const auto [val, vec] = a.lowest_eigenpair();
    rep.lowest_eigenvalue = a.expectation(vec);
    rep.lowest_included = true;
    rep.expectations.push_back(rep.lowest_eigenvalue);
  }

  rep.min_expectation = rep.expectations.empty() ? 0.0 : rep.expectations[0];
  rep.max_expectation = rep.min_expectation;
  for (double e : rep.expectations) {
    rep.min_expectation = std::min(rep.min_expectation, e);
    rep.max_expectation = std::max(rep.max_expectation, e);
    if (e < bound.value - rep.tolerance) ++rep.violations;
  }
  rep.pass = rep.violations == 0;
  return rep;
}

std::pair<ModeBasis, int> load_model_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file '" + path + "'");
  nlohmann::json j;
  in >> j;
  ModeBasis b;
  b.box_length = j.at("L").get<double>();
  b.mass = j.at("mass").get<double>();
  b.n_min = j.at("n_min").get<int>();
  b.n_max = j.at("n_max").get<int>();
  b.include_zero_mode = j.value("zero_mode", false);
  return {b, j.at("N_max").get<int>()};
}

void save_model_json(const ModeBasis& basis, int total_cutoff, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << basis.to_json(total_cutoff).dump(2) << "\n";
}

}  // namespace qeilab::fock
