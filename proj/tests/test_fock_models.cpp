#include "qeilab/fock_models.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <filesystem>
#include <numbers>

#include "qeilab/random.hpp"

using Catch::Approx;
using namespace qeilab::fock;
using qeilab::sampling::make_gaussian;

namespace {
constexpr double kPi = std::numbers::pi;

ModeBasis small_basis() {
  ModeBasis b;
  b.box_length = 10.0;
  b.mass = 0.0;
  b.n_min = -3;
  b.n_max = 3;
  return b;
}
}  // namespace

TEST_CASE("space enumeration", "[fock]") {
  SECTION("single mode dimensions") {
    ModeBasis b;
    b.box_length = 10.0;
    b.n_min = 1;
    b.n_max = 1;
    REQUIRE(build_space(b, 2).dimension() == 3);  // occupations 0,1,2
  }

  SECTION("two modes, cutoff two") {
    ModeBasis b;
    b.box_length = 10.0;
    b.n_min = 1;
    b.n_max = 2;
    REQUIRE(build_space(b, 2).dimension() == 6);
  }

  SECTION("massless zero mode is excluded by policy") {
    ModeBasis b;
    b.box_length = 10.0;
    b.n_min = 0;
    b.n_max = 0;
    REQUIRE_THROWS_AS(build_space(b, 2), std::invalid_argument);  // nothing retained
    b.include_zero_mode = true;
    REQUIRE_THROWS_AS(build_space(b, 2), std::invalid_argument);  // omega = 0 rejected
    b.mass = 0.5;
    REQUIRE(build_space(b, 2).dimension() == 3);  // massive zero mode is fine
  }

  SECTION("graded dimension for the standard small model") {
    const auto space = build_space(small_basis(), 3);
    REQUIRE(space.num_modes() == 6);
    REQUIRE(space.dimension() == 1 + 6 + 21 + 56);
    REQUIRE(space.total_occupation(0) == 0);  // vacuum first
  }

  SECTION("cutoff and cap validation") {
    REQUIRE_THROWS_AS(build_space(small_basis(), 1), std::invalid_argument);
    REQUIRE_THROWS_AS(build_space(small_basis(), 4, 50), std::invalid_argument);
  }

  SECTION("raise and lower tables invert each other") {
    const auto space = build_space(small_basis(), 3);
    for (std::size_t i = 0; i < space.dimension(); i += 7) {
      for (int s = 0; s < space.num_modes(); ++s) {
        const auto up = space.raise_index(i, s);
        if (up >= 0) REQUIRE(space.lower_index(static_cast<std::size_t>(up), s) == static_cast<std::int32_t>(i));
        const auto dn = space.lower_index(i, s);
        if (dn >= 0) REQUIRE(space.raise_index(static_cast<std::size_t>(dn), s) == static_cast<std::int32_t>(i));
      }
    }
  }
}

TEST_CASE("energy density operator", "[fock]") {
  const auto space = build_space(small_basis(), 3);

  SECTION("normal ordering: vacuum expectation vanishes") {
    for (double t : {0.0, 0.4}) {
      const auto a = energy_density_matrix(space, t, 1.3);
      Eigen::VectorXcd vac = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(space.dimension()));
      vac[0] = 1.0;
      REQUIRE(std::abs(a.expectation(vac)) < 1e-12);
    }
  }

  SECTION("hermitian matrix") {
    const auto a = energy_density_matrix(space, 0.3, 0.7);
    REQUIRE(a.hermitian());
    const auto dense = a.dense();
    REQUIRE((dense - dense.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  }

  SECTION("box average equals the mode-number energy for number states") {
    // trapezoid over the box is exact for the trigonometric polynomials here
    const auto& basis = space.mode_basis();
    const int nx = 4 * 3 + 5;
    std::vector<Eigen::MatrixXcd> dens;
    for (int ix = 0; ix < nx; ++ix)
      dens.push_back(energy_density_matrix(space, 0.0, basis.box_length * ix / nx).dense());

    qeilab::SeededRng rng(11);
    for (std::size_t state : {1ul, 5ul, 9ul, 30ul}) {
      double avg = 0.0;
      for (const auto& d : dens) avg += d(static_cast<Eigen::Index>(state), static_cast<Eigen::Index>(state)).real();
      avg *= basis.box_length / nx;
      double expected = 0.0;
      for (int s = 0; s < space.num_modes(); ++s)
        expected += basis.energy(space.modes()[static_cast<std::size_t>(s)]) * space.occupation(state, s);
      REQUIRE(avg == Approx(expected).margin(1e-10));
    }
  }

  SECTION("one-particle states carry average density omega/L") {
    const auto& basis = space.mode_basis();
    const int nx = 4 * 3 + 5;
    for (std::size_t state = 1; state <= 3; ++state) {
      double avg = 0.0;
      for (int ix = 0; ix < nx; ++ix) {
        const auto d = energy_density_matrix(space, 0.0, basis.box_length * ix / nx);
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(space.dimension()));
        v[static_cast<Eigen::Index>(state)] = 1.0;
        avg += d.expectation(v);
      }
      avg /= nx;
      double expected = 0.0;
      for (int s = 0; s < space.num_modes(); ++s)
        expected += basis.energy(space.modes()[static_cast<std::size_t>(s)]) * space.occupation(state, s) / basis.box_length;
      REQUIRE(avg == Approx(expected).margin(1e-10));
    }
  }
}

TEST_CASE("smeared energy operator", "[fock]") {
  const auto space = build_space(small_basis(), 3);
  const auto g = make_gaussian(2.0);

  SECTION("vacuum expectation vanishes and the matrix is hermitian") {
    const auto a = smeared_energy(space, g, 0.0);
    REQUIRE(a.hermitian());
    Eigen::VectorXcd vac = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(space.dimension()));
    vac[0] = 1.0;
    REQUIRE(std::abs(a.expectation(vac)) < 1e-12);
  }

  SECTION("matrix-free application matches the dense matrix") {
    const auto a = smeared_energy(space, g, 0.4);
    const auto dense = a.dense();
    qeilab::SeededRng rng(3);
    Eigen::VectorXcd x(static_cast<Eigen::Index>(space.dimension()));
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.complex_normal();
    const Eigen::VectorXcd direct = a.apply(x);
    const Eigen::VectorXcd ref = dense * x;
    REQUIRE((direct - ref).cwiseAbs().maxCoeff() < 1e-12 * ref.cwiseAbs().maxCoeff());
  }

  SECTION("closed-form gaussian weight matches the quadrature path") {
    const auto closed = smeared_energy(space, g, 0.0);
    const auto numeric = smeared_t00(space, weight_hat_from_function(
        [&] {
          // tabulate g^2 on g's grid
          std::vector<double> t(g.size()), v(g.size());
          for (std::size_t i = 0; i < g.size(); ++i) {
            t[i] = g.grid_time(i);
            v[i] = g.samples()[i] * g.samples()[i];
          }
          return qeilab::sampling::SamplingFunction::tabulated(t, v);
        }()), 0.0, "numeric");
    REQUIRE((closed.dag_coeff() - numeric.dag_coeff()).cwiseAbs().maxCoeff() < 1e-8);
    REQUIRE((closed.pair_coeff() - numeric.pair_coeff()).cwiseAbs().maxCoeff() < 1e-8);
  }

  SECTION("vanishing weight gives the zero operator") {
    std::vector<double> t, v;
    for (int i = 0; i <= 200; ++i) {
      t.push_back(-5.0 + 0.05 * i);
      v.push_back(0.0);
    }
    const auto z = qeilab::sampling::SamplingFunction::tabulated(t, v);
    const auto a = smeared_energy(space, z, 0.0);
    REQUIRE(a.dag_coeff().cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(a.pair_coeff().cwiseAbs().maxCoeff() == 0.0);
  }

  SECTION("coarse grids are rejected for the quadrature path") {
    // highest retained mode has omega = 2 pi 3 / 10; need dt <= 0.1/omega
    ModeBasis wide = small_basis();
    wide.n_min = -30;
    wide.n_max = 30;
    const auto big = build_space(wide, 2);
    std::vector<double> t, v;
    for (int i = 0; i <= 40; ++i) {
      t.push_back(-2.0 + 0.1 * i);
      v.push_back(std::exp(-t.back() * t.back()));
    }
    const auto coarse = qeilab::sampling::SamplingFunction::tabulated(t, v);
    REQUIRE_THROWS_AS(smeared_energy(big, coarse, 0.0), std::invalid_argument);
  }

  SECTION("negative energy exists for every nonvanishing weight") {
    for (double tau : {1.0, 2.0, 5.0}) {
      const auto a = smeared_energy(space, make_gaussian(tau), 0.0);
      REQUIRE(a.lowest_eigenvalue() < 0.0);
    }
  }
}

TEST_CASE("negative-energy construction", "[fock]") {
  const auto space = build_space(small_basis(), 4);
  const auto a = smeared_energy(space, make_gaussian(2.0), 0.0);
  const auto [zeta, eta] = egj_parameters(a);
  REQUIRE(zeta > 0.0);

  SECTION("state at alpha = 0 is the vacuum") {
    const auto psi = egj_state(a, 0.0);
    REQUIRE(std::abs(psi[0] - 1.0) < 1e-14);
    REQUIRE(psi.tail(psi.size() - 1).cwiseAbs().maxCoeff() < 1e-14);
  }

  SECTION("state at alpha = pi/2 is the normalised image of the vacuum") {
    const auto psi = egj_state(a, kPi / 2.0);
    Eigen::VectorXcd v = a.vacuum_image();
    v.normalize();
    REQUIRE((psi - v).cwiseAbs().maxCoeff() < 1e-12);
  }

  SECTION("expectation identity in alpha") {
    for (double alpha : {0.1, 0.7, 1.9, 2.8}) {
      const auto psi = egj_state(a, alpha);
      const double lhs = a.expectation(psi);
      const double rhs = zeta * std::sin(2 * alpha) + eta * (1.0 - std::cos(2 * alpha));
      REQUIRE(lhs == Approx(rhs).margin(1e-10));
    }
  }

  SECTION("third moment against dense multiplication") {
    const auto dense = a.dense();
    Eigen::VectorXcd vac = Eigen::VectorXcd::Zero(dense.rows());
    vac[0] = 1.0;
    const double a3 = (vac.adjoint() * dense * dense * dense * vac)(0, 0).real();
    REQUIRE(eta == Approx(a3 / (2.0 * zeta * zeta)).margin(1e-12));
  }

  SECTION("grid minimisation matches the closed minimum") {
    double best = 1e300;
    for (int i = 0; i < 500000; ++i) {
      const double alpha = kPi * i / 500000.0;
      best = std::min(best, zeta * std::sin(2 * alpha) + eta * (1.0 - std::cos(2 * alpha)));
    }
    REQUIRE(best == Approx(egj_bound(zeta, eta)).margin(1e-10));
    REQUIRE(egj_bound(zeta, eta) < 0.0);
  }

  SECTION("closed bound values") {
    REQUIRE(egj_bound(1.0, 0.0) == Approx(-1.0).epsilon(1e-15));
    REQUIRE(egj_bound(3.0, 4.0) == Approx(-1.0).epsilon(1e-15));
    REQUIRE_THROWS_AS(egj_bound(0.0, 1.0), std::invalid_argument);
  }

  SECTION("operators annihilating the vacuum are rejected") {
    const auto zero = FieldOperatorMatrix(space, Eigen::MatrixXcd::Zero(space.num_modes(), space.num_modes()),
                                          Eigen::MatrixXcd::Zero(space.num_modes(), space.num_modes()), "zero");
    REQUIRE_THROWS_AS(egj_state(zero, 0.3), std::invalid_argument);
  }
}

TEST_CASE("lanczos agrees with the dense solver", "[fock]") {
  ModeBasis b;
  b.box_length = 12.0;
  b.n_min = -5;
  b.n_max = 5;
  const auto space = build_space(b, 4);  // dimension 1001
  const auto a = smeared_energy(space, make_gaussian(2.0), 0.0);
  const double dense_val = a.lowest_eigenvalue();
  LanczosOptions opts;
  opts.force_iterative = true;
  const auto [iter_val, vec] = a.lowest_eigenpair(opts);
  REQUIRE(iter_val == Approx(dense_val).epsilon(1e-8));
  REQUIRE(a.expectation(vec) == Approx(dense_val).epsilon(1e-7));
}

TEST_CASE("vacuum kernel and verification", "[fock]") {
  const auto space = build_space(small_basis(), 4);
  const auto g = make_gaussian(2.0);

  SECTION("kernel lines carry omega/2L per retained mode") {
    const auto kernel = vacuum_kernel(space);
    REQUIRE(kernel.lines().size() == 6);
    const auto& basis = space.mode_basis();
    for (const auto& l : kernel.lines())
      REQUIRE(l.mu == Approx(l.omega / (2.0 * basis.box_length)).epsilon(1e-14));
  }

  SECTION("no state violates the self-consistent bound") {
    auto [bound, q] = qeilab::bounds::worldline_bound_from_kernel(vacuum_kernel(space), g);
    REQUIRE(bound.value < 0.0);
    StateSampleSpec spec;
    spec.count = 50;
    spec.seed = 42;
    const auto rep = verify_qei(space, g, bound, spec);
    REQUIRE(rep.pass);
    REQUIRE(rep.violations == 0);
    REQUIRE(rep.min_expectation >= bound.value - rep.tolerance);
    // the extremal state is negative yet above the bound
    REQUIRE(rep.lowest_eigenvalue < 0.0);
    REQUIRE(rep.lowest_eigenvalue >= bound.value - rep.tolerance);
  }

  SECTION("the family minimum is the closed negative value") {
    const auto a = smeared_energy(space, g, 0.0);
    const auto [zeta, eta] = egj_parameters(a);
    double family_min = 0.0;
    for (int i = 0; i < 2000; ++i) {
      const double alpha = kPi * i / 2000.0;
      family_min = std::min(family_min, a.expectation(egj_state(a, alpha)));
    }
    REQUIRE(family_min == Approx(egj_bound(zeta, eta)).margin(1e-8));
    REQUIRE(family_min < 0.0);
  }

  SECTION("casimir reference energy is the half mode sum") {
    double expected = 0.0;
    for (int n : space.modes()) expected += 0.5 * space.mode_basis().energy(n);
    REQUIRE(casimir_vacuum_energy(space) == Approx(expected).epsilon(1e-14));
  }
}

TEST_CASE("model file round trip", "[fock]") {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "qeilab_fock_json";
  fs::create_directories(dir);
  const auto path = (dir / "model.json").string();
  save_model_json(small_basis(), 3, path);
  const auto [basis, nmax] = load_model_json(path);
  REQUIRE(basis.box_length == 10.0);
  REQUIRE(basis.n_min == -3);
  REQUIRE(basis.n_max == 3);
  REQUIRE(nmax == 3);
  REQUIRE_FALSE(basis.include_zero_mode);
  fs::remove_all(dir);
}
