#include <cmath>
#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

#include "doctest.h"
#include "wchain/circuit.hpp"
#include "wchain/hamiltonian.hpp"
#include "wchain/hilbert.hpp"
#include "wchain/model.hpp"
#include "wchain/protocol.hpp"

using namespace wchain;

namespace {

// lambda_eb = 0.3 in plain rad/ns numbers, small enough to run everywhere
ModelParams synthetic_params(int n_sites, int cutoff) {
  ModelParams p;
  p.t_e = 1.0;
  p.hbar_omega_b = 0.5;
  p.g = std::sqrt(0.3 * p.t_e / (2.0 * p.hbar_omega_b));
  p.n_sites = n_sites;
  p.boson_cutoff = cutoff;
  return p;
}

DriveParams resonant_drive(const ModelParams& p, double beta_p,
                           DriveShape shape) {
  DriveParams d;
  d.q_d = Quasimomentum::of(0, p.n_sites);
  d.beta_p = beta_p;
  d.omega_d = 2.0 * p.t_e;
  d.shape = shape;
  return d;
}

}  // namespace

TEST_CASE("two-sector space layout and block structure") {
  const ModelParams p = synthetic_params(4, 2);
  const TwoSectorSpace space(p);
  const Index db = BosonBasis::dimension_for(4, 2);
  REQUIRE(db == 15);
  CHECK(space.boson_dim() == db);
  CHECK(space.dim() == 5 * db);
  CHECK(space.vacuum_index() == 0);
  CHECK(space.excited_index(0, 0) == db);
  CHECK(space.excited_index(3, db - 1) == 5 * db - 1);
  CHECK_THROWS_AS(space.excited_index(4, 0), std::out_of_range);
  CHECK_THROWS_AS(space.excited_index(-1, 0), std::out_of_range);
  CHECK_THROWS_AS(space.excited_index(0, db), std::out_of_range);

  const Eigen::VectorXcd vac = space.vacuum_state();
  CHECK(vac.norm() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(vac[0] == Complex(1.0, 0.0));

  const Eigen::MatrixXd h = Eigen::MatrixXd(space.model_hamiltonian());
  // Hermitian as a whole
  CHECK((h - h.transpose()).norm() == 0.0);
  // zero-excitation block: free bosons, strictly diagonal
  const BosonBasis bosons(4, 2, kDefaultMaxBosonConfigs);
  for (Index c = 0; c < db; ++c) {
    const int total = bosons.config(c).total;
    CHECK(h(c, c) == doctest::Approx(p.hbar_omega_b * total).epsilon(1e-15));
  }
  Eigen::MatrixXd vac_block = h.topLeftCorner(db, db);
  vac_block.diagonal().setZero();
  CHECK(vac_block.norm() == 0.0);
  // no static coupling between the sectors
  CHECK(h.block(0, db, db, 4 * db).norm() == 0.0);
  // one-excitation block is the full lattice Hamiltonian
  const Eigen::MatrixXd one_exc = build_real_space(p).dense();
  CHECK((h.bottomRightCorner(4 * db, 4 * db) - one_exc).norm() <=
        1e-14 * one_exc.norm());
}

TEST_CASE("target states and drive structure") {
  const ModelParams p = synthetic_params(4, 2);
  const TwoSectorSpace space(p);
  const Index db = space.boson_dim();

  const Eigen::VectorXcd w0 = space.target_state(Quasimomentum::of(0, 4));
  CHECK(w0.norm() == doctest::Approx(1.0).epsilon(1e-14));
  for (int site = 0; site < 4; ++site) {
    CHECK(w0[db + site * db] == Complex(0.5, 0.0));
  }
  CHECK(std::abs(w0[0]) == 0.0);
  CHECK(std::abs(w0[db + 1]) == 0.0);  // boson-carrying entries stay empty

  // the twisted target carries the Bloch phase e^{-i q n}
  const Eigen::VectorXcd w1 = space.target_state(Quasimomentum::of(1, 4));
  const double q1 = two_pi / 4.0;
  for (int site = 0; site < 4; ++site) {
    const Complex expected = std::polar(0.5, -q1 * site);
    CHECK(std::abs(w1[db + site * db] - expected) <= 1e-15);
  }

  // the zero-momentum target is an exact eigenstate at E = -2 t_e even
  // with the coupling switched on
  const Eigen::SparseMatrix<Complex> h =
      space.model_hamiltonian().cast<Complex>();
  CHECK((h * w0 + 2.0 * p.t_e * w0).norm() <= 1e-13);
  // a twisted target is not (the coupling scatters it)
  CHECK((h * w1 - (w1.dot(h * w1)) * w1).norm() > 1e-2);

  const Eigen::SparseMatrix<Complex> d =
      space.drive_structure(Quasimomentum::of(1, 4));
  const Eigen::MatrixXcd dd(d);
  CHECK((dd - dd.adjoint()).norm() == 0.0);
  // the drive maps the vacuum exactly onto the matching target and back
  CHECK((d * space.vacuum_state() - w1).norm() == 0.0);
  CHECK((d * w1 - space.vacuum_state()).norm() <= 1e-15);

  CHECK_THROWS_AS(space.target_state(Quasimomentum::of(0, 6)),
                  std::invalid_argument);
  CHECK_THROWS_AS(space.drive_structure(Quasimomentum::of(0, 6)),
                  std::invalid_argument);
}

TEST_CASE("drive matrix element selects the matching Bloch state") {
  const auto q2 = Quasimomentum::of(2, 8);
  CHECK(drive_matrix_element(q2, Quasimomentum::of(2, 8)).real() == 1.0);
  CHECK(drive_matrix_element(q2, Quasimomentum::of(2, 8)).imag() == 0.0);
  for (int k : {0, 1, 3, 5, 7}) {
    CHECK(std::abs(drive_matrix_element(q2, Quasimomentum::of(k, 8))) <=
          1e-15);
  }
  CHECK(drive_matrix_element(Quasimomentum::of(0, 4), Quasimomentum::of(0, 4))
            .real() == 1.0);
  CHECK_THROWS_AS(
      drive_matrix_element(Quasimomentum::of(0, 4), Quasimomentum::of(0, 6)),
      std::invalid_argument);
}

TEST_CASE("preparation time formula") {
  // betap/2pi hbar = 10 MHz -> 25 ns exactly
  CHECK(prep_time_ns(two_pi * 0.01) == doctest::Approx(25.0).epsilon(1e-13));
  CHECK(prep_time_ns(two_pi * 0.02) == doctest::Approx(12.5).epsilon(1e-13));
  CHECK(prep_time_ns(1.0) == doctest::Approx(two_pi / 4.0).epsilon(1e-15));
  CHECK_THROWS_AS(prep_time_ns(0.0), std::domain_error);
  CHECK_THROWS_AS(prep_time_ns(-0.1), std::domain_error);
}

TEST_CASE("static rotating-frame drive reproduces the analytic flop") {
  const ModelParams p = synthetic_params(4, 2);
  const TwoSectorSpace space(p);
  const double beta = 0.2;
  const DriveParams drive = resonant_drive(p, beta, DriveShape::kRwaStatic);
  const EvolutionResult r =
      evolve(space, space.vacuum_state(), drive, 10.0, 0.01);

  REQUIRE(r.t_ns.size() == r.fidelity.size());
  REQUIRE(r.t_ns.size() == 1001);
  double max_dev = 0.0;
  double max_leak = 0.0;
  for (std::size_t i = 0; i < r.t_ns.size(); ++i) {
    const double s = std::sin(beta * r.t_ns[i]);
    max_dev = std::max(max_dev, std::abs(r.fidelity[i] - s * s));
    max_leak = std::max(
        max_leak, std::abs(r.fidelity[i] + r.vacuum_population[i] - 1.0));
  }
  CHECK(max_dev <= 1e-9);
  CHECK(max_leak <= 1e-9);
  CHECK(r.norm_drift_max < 1e-9);
  CHECK(r.max_fidelity >= 0.999999);
  // first maximum of sin^2(beta t) at pi/(2 beta)
  CHECK(std::abs(r.tau_first_max_ns - two_pi / (4.0 * beta)) <= 1e-6);
  CHECK(fidelity_at_time(r, 5.0) ==
        doctest::Approx(std::pow(std::sin(beta * 5.0), 2)).epsilon(1e-9));
  REQUIRE(r.final_state.size() == space.dim());
  const Eigen::VectorXcd target = space.target_state(drive.q_d);
  CHECK(std::norm(target.dot(r.final_state)) ==
        doctest::Approx(r.fidelity.back()).epsilon(1e-12));
}

TEST_CASE("flop time does not depend on the chain length") {
  const double beta = 0.2;
  double tau_ref = 0.0;
  for (int n : {4, 6, 8}) {
    const ModelParams p = synthetic_params(n, 2);
    const TwoSectorSpace space(p);
    const DriveParams drive = resonant_drive(p, beta, DriveShape::kRwaStatic);
    const EvolutionResult r =
        evolve(space, space.vacuum_state(), drive, 10.0, 0.01);
    if (n == 4) {
      tau_ref = r.tau_first_max_ns;
    } else {
      CHECK(std::abs(r.tau_first_max_ns - tau_ref) <= 1e-9);
    }
    CHECK(std::abs(r.tau_first_max_ns - two_pi / (4.0 * beta)) <= 1e-6);
  }
}

TEST_CASE("zero drive amplitude freezes the populations") {
  const ModelParams p = synthetic_params(4, 2);
  const TwoSectorSpace space(p);
  DriveParams drive = resonant_drive(p, 0.0, DriveShape::kCosine);

  const EvolutionResult from_vac =
      evolve(space, space.vacuum_state(), drive, 1.0, 0.01);
  for (std::size_t i = 0; i < from_vac.t_ns.size(); ++i) {
    CHECK(from_vac.fidelity[i] <= 1e-12);
    CHECK(std::abs(from_vac.vacuum_population[i] - 1.0) <= 1e-12);
  }

  const Eigen::VectorXcd target = space.target_state(drive.q_d);
  const EvolutionResult from_target = evolve(space, target, drive, 1.0, 0.01);
  for (std::size_t i = 0; i < from_target.t_ns.size(); ++i) {
    // eigenstate: only a global phase accumulates
    CHECK(std::abs(from_target.fidelity[i] - 1.0) <= 1e-12);
    CHECK(from_target.vacuum_population[i] <= 1e-12);
  }
}

TEST_CASE("cosine drive agrees with the rotating-frame solution") {
  const ModelParams p = synthetic_params(4, 2);
  const TwoSectorSpace space(p);
  const double beta = 0.05;
  const DriveParams rwa = resonant_drive(p, beta, DriveShape::kRwaStatic);
  const DriveParams cosine = resonant_drive(p, beta, DriveShape::kCosine);
  const double dt = 0.01;
  const EvolutionResult r1 =
      evolve(space, space.vacuum_state(), rwa, 34.0, dt);
  const EvolutionResult r2 =
      evolve(space, space.vacuum_state(), cosine, 34.0, dt);
  REQUIRE(r1.t_ns.size() == r2.t_ns.size());

  // pointwise difference is dominated by first-order micromotion,
  // (beta/2 omega) sin(2 beta t) sin(2 omega t); allow twice its envelope
  const double ratio = beta / cosine.omega_d;
  double max_dev = 0.0;
  for (std::size_t i = 0; i < r1.t_ns.size(); ++i) {
    max_dev = std::max(max_dev, std::abs(r1.fidelity[i] - r2.fidelity[i]));
  }
  CHECK(max_dev <= ratio + 1e-6);
  CHECK(max_dev > 0.1 * ratio);  // the envelope is genuinely first order

  // at the flop maximum the first-order term vanishes and the agreement
  // tightens to second order in beta/omega
  const auto idx = static_cast<std::size_t>(
      std::llround(two_pi / (4.0 * beta) / dt));
  REQUIRE(idx < r1.fidelity.size());
  CHECK(std::abs(r1.fidelity[idx] - r2.fidelity[idx]) <=
        5.0 * ratio * ratio + 1e-6);

  // both detectors land on the same flop time through the ripple
  CHECK(std::abs(r1.tau_first_max_ns - r2.tau_first_max_ns) <= 0.05);
  CHECK(r2.norm_drift_max < 1e-9);
}

TEST_CASE("mapped circuit parameters prepare the state on schedule") {
  CircuitParams cp;
  cp.phi_dc = flux_for_lambda(cp, 0.3);
  const ModelParams p = model_params(cp, 4, 2, EnergyUnit::kRadNs);
  CHECK(effective_lambda(p) == doctest::Approx(0.3).epsilon(1e-10));

  const TwoSectorSpace space(p);
  DriveParams drive = resonant_drive(p, betap_radns(cp), DriveShape::kCosine);
  const double dt = 0.004;
  const EvolutionResult r =
      evolve(space, space.vacuum_state(), drive, 26.0, dt);

  const double tau_formula = prep_time_ns(betap_radns(cp));
  CHECK(tau_formula == doctest::Approx(25.0).epsilon(1e-12));
  CHECK(std::abs(r.tau_first_max_ns - tau_formula) <= 0.5);

  const double f_at_tau = fidelity_at_time(r, 25.0);
  CHECK(f_at_tau >= 0.99);
  CHECK(r.norm_drift_max < 1e-9);

  // selectivity: the one-excitation weight off the target stays negligible
  const auto idx = static_cast<std::size_t>(std::llround(25.0 / dt));
  const double other =
      1.0 - r.fidelity[idx] - r.vacuum_population[idx];
  CHECK(other <= 0.01);
}

TEST_CASE("step-size refinement converges at fourth order") {
  const ModelParams p = synthetic_params(4, 2);
  const TwoSectorSpace space(p);
  const DriveParams drive = resonant_drive(p, 0.5, DriveShape::kCosine);
  const EvolutionResult ra =
      evolve(space, space.vacuum_state(), drive, 2.0, 0.02);
  const EvolutionResult rb =
      evolve(space, space.vacuum_state(), drive, 2.0, 0.01);
  const EvolutionResult rc =
      evolve(space, space.vacuum_state(), drive, 2.0, 0.005);
  const double d1 = (ra.final_state - rb.final_state).norm();
  const double d2 = (rb.final_state - rc.final_state).norm();
  REQUIRE(d2 > 0.0);
  const double order_ratio = d1 / d2;
  // halving the step should shrink the defect by about 2^4
  CHECK(order_ratio >= 12.0);
  CHECK(order_ratio <= 20.0);
  CHECK(std::abs(ra.final_state.norm() - 1.0) <= 1e-12);
  CHECK(std::abs(rc.final_state.norm() - 1.0) <= 1e-12);
}

TEST_CASE("evolution input validation") {
  const ModelParams p = synthetic_params(4, 2);
  const TwoSectorSpace space(p);
  const DriveParams drive = resonant_drive(p, 0.1, DriveShape::kRwaStatic);
  const Eigen::VectorXcd vac = space.vacuum_state();

  CHECK_THROWS_AS(
      evolve(space, Eigen::VectorXcd::Zero(space.dim() + 1), drive, 1.0, 0.01),
      std::invalid_argument);
  CHECK_THROWS_AS(evolve(space, 2.0 * vac, drive, 1.0, 0.01),
                  std::invalid_argument);
  CHECK_THROWS_AS(evolve(space, vac, drive, 0.0, 0.01),
                  std::invalid_argument);
  CHECK_THROWS_AS(evolve(space, vac, drive, 1.0, 0.0), std::invalid_argument);
  // a step too coarse for the spectral scale is rejected up front
  CHECK_THROWS_AS(evolve(space, vac, drive, 1.0, 1.0), std::invalid_argument);

  DriveParams negative = drive;
  negative.beta_p = -0.1;
  CHECK_THROWS_AS(evolve(space, vac, negative, 1.0, 0.01),
                  std::invalid_argument);
  DriveParams mismatched = drive;
  mismatched.q_d = Quasimomentum::of(0, 6);
  CHECK_THROWS_AS(evolve(space, vac, mismatched, 1.0, 0.01),
                  std::invalid_argument);

  const EvolutionResult r = evolve(space, vac, drive, 1.0, 0.01);
  CHECK_THROWS_AS(fidelity_at_time(r, 0.005), std::invalid_argument);
  CHECK_THROWS_AS(fidelity_at_time(r, -0.01), std::invalid_argument);
  CHECK_THROWS_AS(fidelity_at_time(r, 2.0), std::invalid_argument);

  ModelParams bad = p;
  bad.n_sites = 1;
  CHECK_THROWS_AS(TwoSectorSpace{bad}, std::invalid_argument);
}
