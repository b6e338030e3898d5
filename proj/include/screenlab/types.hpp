#pragma once

#include <complex>

#include <Eigen/Dense>

namespace screenlab {

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using Vec3c = Eigen::Vector3cd;
using Vec2c = Eigen::Vector2cd;
using MatX = Eigen::MatrixXcd;
using VecX = Eigen::VectorXcd;

inline constexpr double pi = 3.14159265358979323846;

// Plain bilinear cross product of complex 3-vectors.  Eigen's cross() returns
// the conjugated product for complex scalars, which is not what vector
// calculus identities on complexified fields need.
inline Vec3c cross3(const Vec3c& a, const Vec3c& b) {
  return {a(1) * b(2) - a(2) * b(1), a(2) * b(0) - a(0) * b(2), a(0) * b(1) - a(1) * b(0)};
}

inline Vec3c cross3(const Vec3& a, const Vec3c& b) { return cross3(a.cast<cplx>().eval(), b); }

}  // namespace screenlab
