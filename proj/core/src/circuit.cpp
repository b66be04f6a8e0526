#include "wchain/circuit.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace wchain {

namespace {
constexpr double half_pi = 1.57079632679489661923132169163975144;
}

void CircuitParams::validate() const {
  if (!(dtheta > 0.0)) {
    throw std::invalid_argument("CircuitParams: dtheta must be > 0");
  }
  if (!(domega_mhz > 0.0)) {
    throw std::invalid_argument("CircuitParams: domega_mhz must be > 0");
  }
  if (!(ej_dphi2_ghz > 0.0)) {
    throw std::invalid_argument("CircuitParams: ej_dphi2_ghz must be > 0");
  }
  if (phi_dc < 0.0 || phi_dc >= two_pi) {
    throw std::invalid_argument("CircuitParams: phi_dc must lie in [0, 2*pi)");
  }
  if (!(betap_mhz > 0.0)) {
    throw std::invalid_argument("CircuitParams: betap_mhz must be > 0");
  }
  if (!(gamma_mhz > 0.0)) {
    throw std::invalid_argument("CircuitParams: gamma_mhz must be > 0");
  }
}

double bessel_j(int order, double x) {
  if (order != 0 && order != 1) {
    throw std::invalid_argument("bessel_j: only orders 0 and 1 are supported");
  }
  if (std::abs(x) > 10.0) {
    throw std::domain_error("bessel_j: |x| must be <= 10, got " +
                            std::to_string(x));
  }
  if (x == 0.0) return order == 0 ? 1.0 : 0.0;
  const double half = 0.5 * x;
  double term = order == 0 ? 1.0 : half;
  double sum = term;
  for (int m = 1; m < 200; ++m) {
    term *= -(half * half) / (static_cast<double>(m) * (m + order));
    sum += term;
    if (std::abs(term) < 1e-16 * std::abs(sum)) break;
  }
  return sum;
}

double eu_ghz(const CircuitParams& cp) { return 1e-3 * cp.ej_dphi2_ghz; }

double effective_hopping_ghz(const CircuitParams& cp) {
  return 2.0 * bessel_j(0, half_pi) * cp.ej_dphi2_ghz *
         (1.0 + std::cos(cp.phi_dc));
}

double coupling_g(const CircuitParams& cp) {
  const double domega_ghz = 1e-3 * cp.domega_mhz;
  return cp.ej_dphi2_ghz * bessel_j(1, half_pi) * cp.dtheta / domega_ghz;
}

double lambda_of_flux(const CircuitParams& cp) {
  const double window = 1.0 + std::cos(cp.phi_dc);
  if (window <= 0.0) {
    throw std::domain_error(
        "lambda_of_flux: hopping vanishes at phi_dc = pi; coupling diverges");
  }
  return coupling_g(cp) * bessel_j(1, half_pi) * cp.dtheta /
         (bessel_j(0, half_pi) * window);
}

double flux_for_lambda(const CircuitParams& cp, double lambda_target) {
  if (!(lambda_target > 0.0)) {
    throw std::domain_error("flux_for_lambda: lambda_target must be > 0");
  }
  const double numerator =
      coupling_g(cp) * bessel_j(1, half_pi) * cp.dtheta / bessel_j(0, half_pi);
  const double window = numerator / lambda_target;  // 1 + cos(phi_dc)
  if (window > 2.0 + 1e-12) {
    throw std::domain_error(
        "flux_for_lambda: lambda_target " + std::to_string(lambda_target) +
        " is below the phi_dc = 0 minimum " + std::to_string(numerator / 2.0));
  }
  return std::acos(std::min(1.0, window - 1.0));
}

MappedModel map_at_flux(const CircuitParams& cp) {
  cp.validate();
  MappedModel m;
  m.t0_ghz = effective_hopping_ghz(cp);
  m.hbar_domega_ghz = 1e-3 * cp.domega_mhz;
  m.g = coupling_g(cp);
  m.lambda_eb = lambda_of_flux(cp);
  m.eu_ghz = eu_ghz(cp);
  m.t0_eu = m.t0_ghz / m.eu_ghz;
  m.hbar_domega_eu = m.hbar_domega_ghz / m.eu_ghz;
  return m;
}

ModelParams model_params(const CircuitParams& cp, int n_sites,
                         int boson_cutoff, EnergyUnit unit) {
  const MappedModel m = map_at_flux(cp);
  double scale = 1.0;  // from GHz readings to the requested unit
  switch (unit) {
    case EnergyUnit::kEu:
      scale = 1.0 / m.eu_ghz;
      break;
    case EnergyUnit::kGhz:
      scale = 1.0;
      break;
    case EnergyUnit::kRadNs:
      scale = two_pi;
      break;
  }
  ModelParams p;
  p.t_e = m.t0_ghz * scale;
  p.hbar_omega_b = m.hbar_domega_ghz * scale;
  p.g = m.g;
  p.n_sites = n_sites;
  p.boson_cutoff = boson_cutoff;
  p.validate();
  return p;
}

double betap_radns(const CircuitParams& cp) {
  return two_pi * 1e-3 * cp.betap_mhz;
}

FeasibilityReport feasibility_report(const CircuitParams& cp) {
  cp.validate();
  FeasibilityReport r;
  // pi*hbar/(2 beta_p) with beta_p = 2*pi*hbar * betap_mhz:
  // 1/(4 * betap_mhz), converted from microseconds^-1 scale to ns.
  r.tau_prep_ns = 1e3 / (4.0 * cp.betap_mhz);
  r.leakage_ns_angular = 1e3 / (two_pi * std::abs(cp.alpha_mhz));
  r.leakage_ns_plain = 1e3 / std::abs(cp.alpha_mhz);
  r.gap_ghz = 1e-3 * cp.domega_mhz;
  r.gap_eu = r.gap_ghz / eu_ghz(cp);
  r.domega_mhz = cp.domega_mhz;
  r.g_domega_mhz = coupling_g(cp) * cp.domega_mhz;
  r.t0_mhz = 1e3 * effective_hopping_ghz(cp);
  r.gamma_mhz = cp.gamma_mhz;
  r.domega_over_gamma = r.domega_mhz / cp.gamma_mhz;
  r.g_domega_over_gamma = r.g_domega_mhz / cp.gamma_mhz;
  r.t0_over_gamma = r.t0_mhz / cp.gamma_mhz;
  r.tau_prep_gamma = r.tau_prep_ns * 1e-3 * cp.gamma_mhz * two_pi;
  return r;
}

}  // namespace wchain
