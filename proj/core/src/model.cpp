#include "wchain/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace wchain {

Quasimomentum Quasimomentum::of(int index, int n_sites) {
  if (n_sites < 1) {
    throw std::invalid_argument("Quasimomentum: n_sites must be >= 1, got " +
                                std::to_string(n_sites));
  }
  int r = index % n_sites;
  if (r < 0) r += n_sites;
  return Quasimomentum{r, n_sites};
}

namespace {
void require_same_grid(const Quasimomentum& a, const Quasimomentum& b) {
  if (a.n_sites != b.n_sites) {
    throw std::invalid_argument(
        "Quasimomentum: mixing momenta from rings of size " +
        std::to_string(a.n_sites) + " and " + std::to_string(b.n_sites));
  }
}
}  // namespace

Quasimomentum Quasimomentum::operator+(const Quasimomentum& other) const {
  require_same_grid(*this, other);
  return of(index + other.index, n_sites);
}

Quasimomentum Quasimomentum::operator-(const Quasimomentum& other) const {
  require_same_grid(*this, other);
  return of(index - other.index, n_sites);
}

Quasimomentum Quasimomentum::operator-() const { return of(-index, n_sites); }

void ModelParams::validate() const {
  if (!(t_e > 0.0)) {
    throw std::invalid_argument("ModelParams: t_e must be > 0, got " +
                                std::to_string(t_e));
  }
  if (!(hbar_omega_b > 0.0)) {
    throw std::invalid_argument("ModelParams: hbar_omega_b must be > 0, got " +
                                std::to_string(hbar_omega_b));
  }
  if (!(g >= 0.0)) {
    throw std::invalid_argument("ModelParams: g must be >= 0, got " +
                                std::to_string(g));
  }
  if (n_sites < 2) {
    throw std::invalid_argument("ModelParams: n_sites must be >= 2, got " +
                                std::to_string(n_sites));
  }
  if (boson_cutoff < 0) {
    throw std::invalid_argument("ModelParams: boson_cutoff must be >= 0, got " +
                                std::to_string(boson_cutoff));
  }
}

double bare_dispersion(const Quasimomentum& k, const ModelParams& params) {
  return -2.0 * params.t_e * std::cos(k.value());
}

Complex vertex_gamma(double k, double q, const ModelParams& params) {
  const double trig = std::sin(k) + std::sin(q) - std::sin(k + q);
  return Complex(0.0, 2.0 * params.g * params.hbar_omega_b * trig);
}

Complex vertex_gamma(const Quasimomentum& k, const Quasimomentum& q,
                     const ModelParams& params) {
  require_same_grid(k, q);
  return vertex_gamma(k.value(), q.value(), params);
}

double effective_lambda(const ModelParams& params) {
  if (params.t_e == 0.0) {
    throw std::domain_error("effective_lambda: t_e must be nonzero");
  }
  return 2.0 * params.g * params.g * params.hbar_omega_b / params.t_e;
}

}  // namespace wchain
