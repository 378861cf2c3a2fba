#pragma once

#include <Eigen/Dense>

#include "qdc/errors.hpp"
#include "qdc/polarization.hpp"

namespace qdc {

/// 4x4 polarization density matrix of the photon pair, basis order
/// (HH, HV, VH, VV). Valid instances are Hermitian, unit trace, and
/// positive semidefinite within the stated tolerances.
struct TwoPhotonDensityMatrix {
  Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();

  static constexpr double kHermitianTol = 1e-12;
  static constexpr double kTraceTol = 1e-12;
  static constexpr double kEigenvalueFloor = -1e-10;

  void validate() const {
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol)
      throw ValidationError("density matrix is not Hermitian");
    if (std::abs(rho.trace() - complexd(1.0, 0.0)) > kTraceTol)
      throw ValidationError("density matrix trace differs from 1");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(rho, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < kEigenvalueFloor)
      throw ValidationError("density matrix is not positive semidefinite");
  }

  /// Expectation value <psi|rho|psi> for a pure pair state.
  double expectation(const PairKet& psi) const { return std::real(psi.dot(rho * psi)); }
};

/// The Bell state (|HH> + |VV>)/sqrt2 the cascade ideally emits.
inline PairKet psi_plus() {
  PairKet k = PairKet::Zero();
  k(0) = k(3) = 1.0 / std::sqrt(2.0);
  return k;
}

}  // namespace qdc
