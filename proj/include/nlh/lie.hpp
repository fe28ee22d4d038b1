#pragma once

// SU(2) and SO(3) with a shared algebra chart: both algebras are identified
// with R^3 through orthonormal bases (T_a = -i sigma_a / 2 for su(2), the
// cross-product generators for so(3)), so the bracket is the cross product
// and Ad is a rotation matrix.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>

namespace nlh::lie {

using Vec3 = Eigen::Vector3d;
using Rot3 = Eigen::Matrix3d;
using Rng = std::mt19937_64;

enum class GroupId : std::int64_t { SU2 = 1, SO3 = 2 };

/// Holonomy angle beyond which log is refused.
inline constexpr double kBranchMargin = 1e-8;

inline Vec3 bracket(const Vec3& x, const Vec3& y) { return x.cross(y); }

Vec3 random_algebra(Rng& rng, double scale);

struct SU2 {
  using Matrix = Eigen::Matrix2cd;
  static constexpr GroupId id = GroupId::SU2;
  static constexpr const char* name = "SU2";
  /// Norm of the algebra element whose exponential is -I.
  static constexpr double cut_locus = 2.0 * 3.14159265358979323846;
  /// Real numbers per matrix in binary files (re/im, row-major).
  static constexpr int stored_reals = 8;

  static Matrix identity() { return Matrix::Identity(); }
  static Matrix inverse(const Matrix& u) { return u.adjoint(); }
  static Matrix hat(const Vec3& x);
  static Vec3 vee(const Matrix& x);
  static Matrix exp(const Vec3& x);
  /// Rotation angle |log u|.
  static double angle(const Matrix& u);
  /// Throws LogBranchError (plaquette index unset) near the cut locus.
  static Vec3 log(const Matrix& u);
  static Rot3 ad_matrix(const Matrix& u);
  static Vec3 ad(const Matrix& u, const Vec3& x) { return ad_matrix(u) * x; }
  /// g in SU(2) maximizing Re tr(g K); identity when the projection vanishes.
  static Matrix maximize_re_tr(const Matrix& k);
  static double re_tr(const Matrix& u) { return u.trace().real(); }
  static double unitarity_defect(const Matrix& u);
  static Matrix haar(Rng& rng);

  static void to_reals(const Matrix& u, double* out);
  static Matrix from_reals(const double* in);
};

struct SO3 {
  using Matrix = Eigen::Matrix3d;
  static constexpr GroupId id = GroupId::SO3;
  static constexpr const char* name = "SO3";
  static constexpr double cut_locus = 3.14159265358979323846;
  static constexpr int stored_reals = 9;

  static Matrix identity() { return Matrix::Identity(); }
  static Matrix inverse(const Matrix& u) { return u.transpose(); }
  static Matrix hat(const Vec3& x);
  static Vec3 vee(const Matrix& x);
  static Matrix exp(const Vec3& x);
  static double angle(const Matrix& u);
  static Vec3 log(const Matrix& u);
  static Rot3 ad_matrix(const Matrix& u) { return u; }
  static Vec3 ad(const Matrix& u, const Vec3& x) { return u * x; }
  static Matrix maximize_re_tr(const Matrix& k);
  static double re_tr(const Matrix& u) { return u.trace(); }
  static double unitarity_defect(const Matrix& u);
  static Matrix haar(Rng& rng);

  static void to_reals(const Matrix& u, double* out);
  static Matrix from_reals(const double* in);
};

/// exp(scale * gaussian algebra element).
template <class G>
typename G::Matrix random_near_identity(Rng& rng, double scale) {
  return G::exp(random_algebra(rng, scale));
}

}  // namespace nlh::lie
