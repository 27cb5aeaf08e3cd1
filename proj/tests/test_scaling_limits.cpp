#include "qeilab/scaling_limits.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <memory>
#include <numbers>

#include "qeilab/random.hpp"

using Catch::Approx;
using namespace qeilab::scaling;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("pushforward mechanics", "[scaling]") {
  const auto f = ChartTestFunction::bump(1.0);

  SECTION("identity at scale one") {
    const auto g = f.pushforward(1.0);
    REQUIRE(g.support_radius() == f.support_radius());
    REQUIRE(g.value(0.3) == f.value(0.3));
  }

  SECTION("support contracts by the scale") {
    const auto g = f.pushforward(0.25);
    REQUIRE(g.support_radius() == Approx(0.25).epsilon(1e-15));
    REQUIRE(g.value(0.2) == Approx(f.value(0.8)).epsilon(1e-12));
    REQUIRE(g.value(0.3) == 0.0);
  }

  SECTION("mass scales linearly") {
    for (double l : {0.5, 0.1}) {
      REQUIRE(f.pushforward(l).integral() == Approx(l * f.integral()).epsilon(1e-14));
    }
  }

  SECTION("semigroup law holds exactly on shared scales") {
    const auto a = f.pushforward(0.5).pushforward(0.25);
    const auto b = f.pushforward(0.125);
    REQUIRE(a.scale() == b.scale());
    REQUIRE(a.value(0.05) == b.value(0.05));
    REQUIRE(a.integral() == b.integral());
  }

  REQUIRE_THROWS_AS(f.pushforward(0.0), std::invalid_argument);
  REQUIRE_THROWS_AS(f.pushforward(1.5), std::invalid_argument);
}

TEST_CASE("delta family", "[scaling]") {
  const auto f = ChartTestFunction::bump(1.0);

  SECTION("unit mass at every scale") {
    for (double l : {1.0, 0.1, 0.01}) {
      REQUIRE(f.delta_scaled(l).integral() == Approx(1.0).margin(1e-9));
    }
  }

  SECTION("support contracts toward the origin") {
    REQUIRE(f.delta_scaled(0.01).support_radius() == Approx(0.01).epsilon(1e-14));
  }

  SECTION("smears toward the point value") {
    auto probe = [](double x) { return std::cos(0.7 * x) + 0.3 * x; };
    double prev = 1e300;
    for (double l : {0.3, 0.1, 0.03, 0.01}) {
      const auto fl = f.delta_scaled(l);
      double acc = 0.0;
      for (std::size_t i = 0; i < fl.size(); ++i) acc += fl.sample(i) * probe(fl.node(i));
      acc *= fl.dx();
      const double err = std::abs(acc - probe(0.0));
      REQUIRE(err < prev);
      prev = err;
    }
    REQUIRE(prev < 1e-4);
  }

  SECTION("negative test functions are rejected") {
    const auto g = ChartTestFunction::from_samples({0.0, 1.0, -0.5, 1.0, 0.0}, 1.0);
    REQUIRE_THROWS_AS(g.delta_scaled(0.5), std::invalid_argument);
  }
}

TEST_CASE("homogeneous model", "[scaling]") {
  const auto f = ChartTestFunction::bump(1.0);

  SECTION("two-point values scale with the analytic exponent") {
    for (double h : {1.5, 2.0}) {
      const HomogeneousModel model(h, 1.0);
      const double base = model.omega_n(2, f);
      for (double l : {0.5, 0.1}) {
        const double scaled = model.omega_n(2, f.pushforward(l));
        REQUIRE(scaled / base == Approx(std::pow(l, 2.0 - 2.0 * h)).epsilon(1e-3));
      }
    }
  }

  SECTION("odd orders vanish") {
    const HomogeneousModel model(2.0, 1.0);
    REQUIRE(model.omega_n(1, f) == 0.0);
    REQUIRE(model.omega_n(3, f) == 0.0);
  }

  SECTION("positive type on seeded test functions") {
    const HomogeneousModel model(1.3, 0.7);
    qeilab::SeededRng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> raw(41);
      for (auto& v : raw) v = 2.0 * rng.uniform() - 1.0;
      // light smoothing keeps the transform well resolved
      std::vector<double> smooth(raw.size(), 0.0);
      for (std::size_t i = 1; i + 1 < raw.size(); ++i)
        smooth[i] = 0.25 * raw[i - 1] + 0.5 * raw[i] + 0.25 * raw[i + 1];
      const auto g = ChartTestFunction::from_samples(smooth, 1.0);
      REQUIRE(model.omega_n(2, g) >= -1e-12);
    }
  }

  REQUIRE_THROWS_AS(HomogeneousModel(0.0, 1.0), std::invalid_argument);
  REQUIRE_THROWS_AS(HomogeneousModel(1.0, -1.0), std::invalid_argument);
}

TEST_CASE("scaling fits", "[scaling]") {
  const auto f = ChartTestFunction::bump(1.0);
  const auto grid = LambdaGrid::geometric(1.0, 1e-3, 25);

  SECTION("fitted exponent matches the analytic value") {
    for (double h : {1.5, 2.0}) {
      const HomogeneousModel model(h, 1.0);
      const auto fit = fit_n_alpha(model, f, grid);
      REQUIRE(fit.alpha == Approx(h - 1.0).margin(1e-2));
      REQUIRE(fit.dimension == Approx(1.0 + (h - 1.0)).margin(1e-2));
      REQUIRE_FALSE(fit.degenerate);
      REQUIRE(fit.residual >= 0.0);
    }
  }

  SECTION("scale-invariant two-point function flags a degenerate fit") {
    const HomogeneousModel model(1.0, 1.0);  // omega2 exponent 2 - 2h = 0
    const auto fit = fit_n_alpha(model, f, grid);
    REQUIRE(fit.degenerate);
    REQUIRE(fit.alpha == Approx(0.0).margin(1e-2));
  }

  SECTION("vanishing check on the fitted sequence") {
    const HomogeneousModel model(2.0, 1.0);
    const auto fit = fit_n_alpha(model, f, grid);
    const auto rep = check_vanishing(fit);
    REQUIRE(rep.decreasing_final_decade);
    REQUIRE(rep.final_over_initial < 1e-5);
  }

  SECTION("nonpositive canonical dimension is rejected") {
    ScalingFit fit;
    fit.alpha = -1.5;
    fit.chart_dim = 1;
    fit.dimension = -0.5;
    fit.lambdas = {1.0, 0.5};
    fit.n_values = {1.0, 2.0};
    REQUIRE_THROWS_AS(check_vanishing(fit), std::invalid_argument);
  }

  SECTION("borderline scaling gives a constant, non-vanishing sequence") {
    ScalingFit fit;
    fit.alpha = -1.0;
    fit.chart_dim = 1;
    fit.dimension = 1e-6;  // just above zero so the check runs
    fit.lambdas = {1.0, 0.1, 0.01, 0.001};
    fit.n_values = {1.0, 10.0, 100.0, 1000.0};  // N = 1/lambda
    const auto rep = check_vanishing(fit);
    REQUIRE_FALSE(rep.decreasing_final_decade);
  }
}

TEST_CASE("scaling sequences", "[scaling]") {
  const auto f = ChartTestFunction::bump(1.0);
  const HomogeneousModel model(2.0, 1.0);
  const auto grid = LambdaGrid::geometric(1.0, 0.01, 9);

  const auto seq = scaling_sequence(model, f, 2, grid);
  REQUIRE(seq.size() == grid.values.size());
  for (std::size_t i = 1; i < seq.size(); ++i) REQUIRE(seq[i] > seq[i - 1]);  // lambda^{-2} growth

  const auto zero = scaling_sequence(model, f, 3, grid);
  for (double v : zero) REQUIRE(v == 0.0);

  // vanishing test function gives a vanishing sequence at every order
  const auto none = ChartTestFunction::from_samples({0.0, 0.0, 0.0, 0.0, 0.0}, 1.0);
  for (int n : {1, 2, 3})
    for (double v : scaling_sequence(model, none, n, grid)) REQUIRE(v == 0.0);
}

TEST_CASE("trajectories", "[scaling]") {
  const auto f = ChartTestFunction::bump(1.0);

  SECTION("homogeneous trajectory diverges with the analytic rate") {
    const HomogeneousModel model(2.0, 1.0);
    const auto grid = LambdaGrid::geometric(1.0, 1e-3, 13);
    const auto traj = zeta_eta_trajectory(model, f, grid);
    REQUIRE(traj.size() == grid.values.size());
    for (std::size_t i = 1; i < traj.size(); ++i) {
      REQUIRE(traj[i].zeta > traj[i - 1].zeta);
      REQUIRE(traj[i].egj_bound < traj[i - 1].egj_bound);
      REQUIRE(traj[i].eta_over_zeta == 0.0);
    }
    // zeta ~ lambda^{-h}: check the decade ratio
    REQUIRE(traj.back().zeta / traj[traj.size() - 2].zeta ==
            Approx(std::pow(traj.back().lambda / traj[traj.size() - 2].lambda, -2.0)).epsilon(1e-2));
    // with eta = 0 the bound equals -zeta exactly
    for (const auto& p : traj) REQUIRE(p.egj_bound == Approx(-p.zeta).epsilon(1e-14));
  }

  SECTION("lambda^D N zeta is asymptotically constant for the homogeneous model") {
    const HomogeneousModel model(2.0, 1.0);
    const auto grid = LambdaGrid::geometric(1.0, 1e-3, 13);
    const auto fit = fit_n_alpha(model, f, grid);
    const auto traj = zeta_eta_trajectory(model, f, grid);
    std::vector<double> products;
    for (std::size_t i = 0; i < traj.size(); ++i)
      products.push_back(traj[i].lambda * fit.n_values[i] * traj[i].zeta);
    for (std::size_t i = 1; i < products.size(); ++i)
      REQUIRE(products[i] == Approx(products[0]).epsilon(1e-3));
  }

  SECTION("fock adapter third moments match dense multiplication") {
    qeilab::fock::ModeBasis basis;
    basis.box_length = 8.0;
    basis.n_min = -2;
    basis.n_max = 2;
    auto space = std::make_shared<qeilab::fock::TruncatedFockSpace>(basis, 4);
    const FockAdapterModel model(space, 0.0);

    const auto fl = f.pushforward(0.8);
    const double w3 = model.omega_n(3, fl);

    qeilab::fock::WeightHat hat = [&fl](double omega) { return fl.ft(omega); };
    const auto op = qeilab::fock::smeared_t00(*space, hat, 0.0, "T(f)");
    const Eigen::MatrixXcd dense = op.dense();
    Eigen::VectorXcd vac = Eigen::VectorXcd::Zero(dense.rows());
    vac[0] = 1.0;
    const double expected = (vac.adjoint() * dense * dense * dense * vac)(0, 0).real();
    REQUIRE(w3 == Approx(expected).margin(1e-10 * std::max(1.0, std::abs(expected))));
    REQUIRE(model.omega_n(1, fl) == 0.0);
    REQUIRE(model.omega_n(2, fl) >= 0.0);
  }

  SECTION("fock adapter reports its resolved window") {
    qeilab::fock::ModeBasis basis;
    basis.box_length = 8.0;
    basis.n_min = -2;
    basis.n_max = 2;
    auto space = std::make_shared<qeilab::fock::TruncatedFockSpace>(basis, 4);
    const FockAdapterModel model(space, 0.0);
    // wide smearing resolves the model; near-delta smearing saturates it
    REQUIRE(model.in_window(ChartTestFunction::bump(8.0)));
    REQUIRE_FALSE(model.in_window(ChartTestFunction::bump(8.0).delta_scaled(1e-3)));
  }
}

TEST_CASE("lambda grids", "[scaling]") {
  const auto g = LambdaGrid::geometric(1.0, 0.001, 4);
  REQUIRE(g.values.size() == 4);
  REQUIRE(g.values.front() == Approx(1.0));
  REQUIRE(g.values.back() == Approx(0.001).epsilon(1e-12));
  REQUIRE_THROWS_AS(LambdaGrid::geometric(0.5, 0.9, 4), std::invalid_argument);
  REQUIRE_THROWS_AS(LambdaGrid::geometric(1.2, 0.1, 4), std::invalid_argument);
}
