#pragma once

#include "wchain/model.hpp"

namespace wchain {

/// Energy unit used when exporting circuit-derived model parameters.
///   kEu      multiples of E_u = 1e-3 * dphi0^2 E_J (the natural readout
///            unit; 2*pi*hbar * 100 MHz at the default E_J)
///   kGhz     energy / (2*pi*hbar), in GHz
///   kRadNs   angular frequency energy/hbar in rad/ns (what the time
///            evolution consumes; 1 GHz of kGhz equals 2*pi of these)
enum class EnergyUnit { kEu, kGhz, kRadNs };

/// Junction-array circuit knobs.  Frequencies are conventional lab values:
/// X_mhz means X/(2*pi*hbar) in MHz.  phi_dc is the dc flux bias in
/// radians; dtheta the small relative oscillation amplitude; ej_dphi2_ghz
/// the product dphi0^2 E_J/(2*pi*hbar) in GHz.
struct CircuitParams {
  double dtheta = 3.5e-3;
  double domega_mhz = 300.0;
  double ej_dphi2_ghz = 100.0;
  double phi_dc = 0.0;
  double betap_mhz = 10.0;
  double alpha_mhz = -200.0;  ///< transmon anharmonicity, sign irrelevant here
  double gamma_mhz = 0.01;    ///< decoherence rate entering feasibility ratios

  void validate() const;
};

/// Bessel function of the first kind, orders 0 and 1 only, |x| <= 10,
/// evaluated by its power series with terms added until the next one drops
/// below 1e-16 of the partial sum.
double bessel_j(int order, double x);

/// E_u/(2*pi*hbar) in GHz.
double eu_ghz(const CircuitParams& cp);

/// Effective hopping t_0(phi_dc)/(2*pi*hbar) in GHz:
/// 2 J_0(pi/2) * dphi0^2 E_J * (1 + cos phi_dc).
double effective_hopping_ghz(const CircuitParams& cp);

/// Dimensionless coupling g = dphi0^2 E_J J_1(pi/2) dtheta / (hbar domega).
double coupling_g(const CircuitParams& cp);

/// Effective coupling lambda(phi_dc) = g J_1(pi/2) dtheta /
/// [J_0(pi/2) (1 + cos phi_dc)].  Throws std::domain_error at phi_dc = pi
/// where the hopping vanishes.
double lambda_of_flux(const CircuitParams& cp);

/// Inverse of lambda_of_flux on (0, pi): the flux bias realizing the given
/// coupling.  Throws std::domain_error when lambda_target is below the
/// phi_dc = 0 minimum (unreachable).
double flux_for_lambda(const CircuitParams& cp, double lambda_target);

/// Resolved model-facing view of the circuit at its flux bias.
struct MappedModel {
  double t0_ghz = 0.0;
  double hbar_domega_ghz = 0.0;
  double g = 0.0;
  double lambda_eb = 0.0;
  double eu_ghz = 0.0;
  double t0_eu = 0.0;
  double hbar_domega_eu = 0.0;
};

MappedModel map_at_flux(const CircuitParams& cp);

/// Lattice model parameters realized by the circuit, with energies in the
/// requested unit.
ModelParams model_params(const CircuitParams& cp, int n_sites,
                         int boson_cutoff, EnergyUnit unit = EnergyUnit::kEu);

/// Drive amplitude beta_p as an angular rate in rad/ns.
double betap_radns(const CircuitParams& cp);

/// Static timescale comparison of the protocol against circuit decoherence.
/// The anharmonicity-limited leakage time hbar/|alpha| is quoted under both
/// common readings of an "alpha ~ -200 MHz" figure: alpha = 2*pi*hbar*f
/// (alpha_mhz as an ordinary frequency) and alpha = hbar*f (the same digits
/// read as an angular rate).
struct FeasibilityReport {
  double tau_prep_ns = 0.0;            ///< pi*hbar/(2 beta_p)
  double leakage_ns_angular = 0.0;     ///< hbar/|alpha|, alpha = 2 pi hbar f
  double leakage_ns_plain = 0.0;       ///< hbar/|alpha|, alpha = hbar f
  double gap_eu = 0.0;                 ///< protocol gap hbar*domega in E_u
  double gap_ghz = 0.0;
  double domega_mhz = 0.0;             ///< rate table, frequency readings
  double g_domega_mhz = 0.0;
  double t0_mhz = 0.0;
  double gamma_mhz = 0.0;
  double domega_over_gamma = 0.0;
  double g_domega_over_gamma = 0.0;
  double t0_over_gamma = 0.0;
  double tau_prep_gamma = 0.0;         ///< tau_prep * gamma (dimensionless)
};

FeasibilityReport feasibility_report(const CircuitParams& cp);

}  // namespace wchain
