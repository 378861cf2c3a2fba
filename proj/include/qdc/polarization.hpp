#pragma once

#include <complex>
#include <string_view>

#include <Eigen/Dense>

#include "qdc/errors.hpp"

namespace qdc {

using complexd = std::complex<double>;
using Jones = Eigen::Vector2cd;     ///< single-photon polarization state in the (H, V) basis
using PairKet = Eigen::Vector4cd;   ///< two-photon state, basis order (HH, HV, VH, VV), X photon first

/// Measurement basis for polarization-resolved correlations.
enum class Basis { linear, diagonal, circular };

struct BasisVectors {
  Jones a;  ///< first analyzer setting (H, D, or L)
  Jones b;  ///< orthogonal setting (V, A, or R)
};

/// Analyzer pairs: D = (H+V)/sqrt2, A = (H-V)/sqrt2, L = (H+iV)/sqrt2, R = (H-iV)/sqrt2.
inline BasisVectors basis_vectors(Basis basis) {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const complexd i(0.0, 1.0);
  switch (basis) {
    case Basis::linear:
      return {Jones(1.0, 0.0), Jones(0.0, 1.0)};
    case Basis::diagonal:
      return {Jones(inv_sqrt2, inv_sqrt2), Jones(inv_sqrt2, -inv_sqrt2)};
    case Basis::circular:
      return {Jones(inv_sqrt2, i * inv_sqrt2), Jones(inv_sqrt2, -i * inv_sqrt2)};
  }
  throw ValidationError("unknown polarization basis");
}

/// Jones vector orthogonal to v (up to global phase).
inline Jones orthogonal(const Jones& v) { return Jones(-std::conj(v(1)), std::conj(v(0))); }

/// Product state |x> (X photon) ⊗ |xx> (XX photon) in the pair basis.
inline PairKet pair_product(const Jones& x, const Jones& xx) {
  PairKet out;
  out << x(0) * xx(0), x(0) * xx(1), x(1) * xx(0), x(1) * xx(1);
  return out;
}

constexpr std::string_view to_string(Basis basis) {
  switch (basis) {
    case Basis::linear: return "linear";
    case Basis::diagonal: return "diagonal";
    case Basis::circular: return "circular";
  }
  return "?";
}

}  // namespace qdc
