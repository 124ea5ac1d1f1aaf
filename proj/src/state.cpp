#include "hero/state.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace hero {

bool RobotState::finite() const {
  return std::isfinite(stamp) && p.allFinite() && v.allFinite() && w.allFinite() &&
         a.allFinite() && alpha.allFinite() && std::isfinite(r.w());
}

StateQuality worst_quality(const StateQuality& a, const StateQuality& b) {
  auto both = [](Q x, Q y) { return (x == Q::Good && y == Q::Good) ? Q::Good : Q::Bad; };
  StateQuality out;
  out.p = both(a.p, b.p);
  out.gz = both(a.gz, b.gz);
  out.vxy = both(a.vxy, b.vxy);
  out.vz = both(a.vz, b.vz);
  out.att = both(a.att, b.att);
  return out;
}

bool is_valid_covariance(const Mat3& m, double sym_tol, double eig_floor) {
  if (!m.allFinite()) return false;
  if (((m - m.transpose()).cwiseAbs().maxCoeff()) > sym_tol) return false;
  Eigen::SelfAdjointEigenSolver<Mat3> eig(m);
  return eig.eigenvalues().minCoeff() >= eig_floor;
}

}  // namespace hero
