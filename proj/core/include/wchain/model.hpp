#pragma once

#include <complex>
#include <cstdint>

namespace wchain {

using Complex = std::complex<double>;

inline constexpr double two_pi = 6.28318530717958647692528676655900577;

/// Quasimomentum on an N-site ring, kept as an exact grid index so that
/// momentum arithmetic (k + q, -k) never accumulates floating point error.
struct Quasimomentum {
  int index = 0;    ///< grid index in [0, n_sites)
  int n_sites = 1;

  /// Build a momentum from an arbitrary integer index; reduced mod n_sites.
  static Quasimomentum of(int index, int n_sites);

  /// Angle 2*pi*index/n_sites in radians.
  double value() const { return two_pi * static_cast<double>(index) / n_sites; }

  Quasimomentum operator+(const Quasimomentum& other) const;
  Quasimomentum operator-(const Quasimomentum& other) const;
  Quasimomentum operator-() const;
  bool operator==(const Quasimomentum& other) const = default;
};

/// Couplings and sizes of the lattice model: a single spinless-fermion
/// excitation on an N-site ring, dispersionless bosons of energy
/// hbar_omega_b on every site, and a dimensionless coupling g entering both
/// the density-displacement (breathing) and hopping-displacement (Peierls)
/// interaction terms.
///
/// Energies (t_e, hbar_omega_b) are carried in one consistent but arbitrary
/// unit chosen by the caller; every derived quantity that is not a pure
/// ratio is reported in that same unit.
struct ModelParams {
  double t_e = 1.0;           ///< nearest-neighbour hopping energy, > 0
  double hbar_omega_b = 1.0;  ///< boson quantum, > 0
  double g = 0.0;             ///< dimensionless coupling, >= 0
  int n_sites = 4;            ///< ring size N >= 2
  int boson_cutoff = 0;       ///< max total boson number M >= 0

  /// Throws std::invalid_argument describing the first violated constraint.
  void validate() const;
};

/// Bare band energy -2 t_e cos(k).
double bare_dispersion(const Quasimomentum& k, const ModelParams& params);

/// Interaction vertex gamma(k, q) = 2 i g hbar_omega_b
/// [sin k + sin q - sin(k+q)] for scattering an excitation of momentum k by
/// emission/absorption of a boson of momentum q.  Purely imaginary, and
/// gamma(0, q) = gamma(k, -k) = 0 identically; the vanishing at k = 0 is
/// what makes the k = 0 Bloch state an exact eigenstate at every coupling.
Complex vertex_gamma(double k, double q, const ModelParams& params);
Complex vertex_gamma(const Quasimomentum& k, const Quasimomentum& q,
                     const ModelParams& params);

/// Dimensionless effective coupling lambda = 2 g^2 hbar_omega_b / t_e.
double effective_lambda(const ModelParams& params);

}  // namespace wchain
