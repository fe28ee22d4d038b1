#include "nlh/lie.hpp"

#include "nlh/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace nlh::lie {
namespace {

using cd = std::complex<double>;
constexpr cd I{0.0, 1.0};
constexpr std::size_t kNoPlaquette = std::numeric_limits<std::size_t>::max();

[[noreturn]] void branch_error(const char* group, double angle, double limit) {
  std::ostringstream ss;
  ss << group << " log: holonomy angle " << angle << " is at the cut locus " << limit;
  throw LogBranchError(ss.str(), kNoPlaquette);
}

}  // namespace

Vec3 random_algebra(Rng& rng, double scale) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Vec3 x;
  for (int a = 0; a < 3; ++a) x[a] = scale * nd(rng);
  return x;
}

// ---- SU(2) ----

SU2::Matrix SU2::hat(const Vec3& x) {
  Matrix m;
  m << -0.5 * I * x[2], -0.5 * I * cd(x[0], -x[1]),
       -0.5 * I * cd(x[0], x[1]), 0.5 * I * x[2];
  return m;
}

Vec3 SU2::vee(const Matrix& x) {
  return {-2.0 * x(0, 1).imag(), -2.0 * x(0, 1).real(), -2.0 * x(0, 0).imag()};
}

SU2::Matrix SU2::exp(const Vec3& x) {
  const double th = x.norm();
  const double c = std::cos(0.5 * th);
  // sin(th/2)/th, expanded near zero
  const double s = th < 1e-6 ? 0.5 - th * th / 48.0 : std::sin(0.5 * th) / th;
  Matrix m;
  m << cd(c, -s * x[2]), cd(-s * x[1], -s * x[0]),
       cd(s * x[1], -s * x[0]), cd(c, s * x[2]);
  return m;
}

namespace {
// u = c I - i s (n . sigma); returns (c, s n).
void su2_quaternion(const SU2::Matrix& u, double& c, Vec3& sn) {
  c = 0.5 * (u(0, 0).real() + u(1, 1).real());
  sn = {-0.5 * (u(0, 1).imag() + u(1, 0).imag()), 0.5 * (u(1, 0).real() - u(0, 1).real()),
        0.5 * (u(1, 1).imag() - u(0, 0).imag())};
}
}  // namespace

double SU2::angle(const Matrix& u) {
  double c;
  Vec3 sn;
  su2_quaternion(u, c, sn);
  return 2.0 * std::atan2(sn.norm(), c);
}

Vec3 SU2::log(const Matrix& u) {
  double c;
  Vec3 sn;
  su2_quaternion(u, c, sn);
  const double s = sn.norm();
  const double th = 2.0 * std::atan2(s, c);
  if (th > cut_locus - kBranchMargin) branch_error(name, th, cut_locus);
  if (s == 0.0) return Vec3::Zero();
  return (th / s) * sn;
}

Rot3 SU2::ad_matrix(const Matrix& u) {
  Rot3 r;
  const Matrix ui = u.adjoint();
  for (int a = 0; a < 3; ++a) r.col(a) = vee(u * hat(Vec3::Unit(a)) * ui);
  return r;
}

SU2::Matrix SU2::maximize_re_tr(const Matrix& k) {
  // g = q0 I + i (q . sigma); Re tr(g K) is linear in the unit quaternion q.
  const Eigen::Vector4d coef(k(0, 0).real() + k(1, 1).real(),
                             -(k(1, 0).imag() + k(0, 1).imag()),
                             k(1, 0).real() - k(0, 1).real(),
                             -(k(0, 0).imag() - k(1, 1).imag()));
  const double norm = coef.norm();
  if (norm == 0.0) return identity();
  const Eigen::Vector4d q = coef / norm;
  Matrix g;
  g << cd(q[0], q[3]), cd(q[2], q[1]),
       cd(-q[2], q[1]), cd(q[0], -q[3]);
  return g;
}

double SU2::unitarity_defect(const Matrix& u) {
  return std::max((u.adjoint() * u - Matrix::Identity()).cwiseAbs().maxCoeff(),
                  std::abs(u.determinant() - 1.0));
}

SU2::Matrix SU2::haar(Rng& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Eigen::Vector4d q;
  do {
    for (int i = 0; i < 4; ++i) q[i] = nd(rng);
  } while (q.norm() < 1e-12);
  q.normalize();
  Matrix g;
  g << cd(q[0], q[3]), cd(q[2], q[1]),
       cd(-q[2], q[1]), cd(q[0], -q[3]);
  return g;
}

void SU2::to_reals(const Matrix& u, double* out) {
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      *out++ = u(r, c).real();
      *out++ = u(r, c).imag();
    }
}

SU2::Matrix SU2::from_reals(const double* in) {
  Matrix u;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c, in += 2) u(r, c) = cd(in[0], in[1]);
  return u;
}

// ---- SO(3) ----

SO3::Matrix SO3::hat(const Vec3& x) {
  Matrix m;
  m << 0.0, -x[2], x[1],
       x[2], 0.0, -x[0],
       -x[1], x[0], 0.0;
  return m;
}

Vec3 SO3::vee(const Matrix& x) { return {x(2, 1), x(0, 2), x(1, 0)}; }

SO3::Matrix SO3::exp(const Vec3& x) {
  const double th = x.norm();
  const Matrix k = hat(x);
  double a, b;
  if (th < 1e-4) {
    a = 1.0 - th * th / 6.0;
    b = 0.5 - th * th / 24.0;
  } else {
    a = std::sin(th) / th;
    b = (1.0 - std::cos(th)) / (th * th);
  }
  return Matrix::Identity() + a * k + b * k * k;
}

double SO3::angle(const Matrix& u) {
  const Vec3 v = 0.5 * vee(u - u.transpose());
  return std::atan2(v.norm(), 0.5 * (u.trace() - 1.0));
}

Vec3 SO3::log(const Matrix& u) {
  const Vec3 v = 0.5 * vee(u - u.transpose());  // sin(th) n
  const double s = v.norm();
  const double c = 0.5 * (u.trace() - 1.0);
  const double th = std::atan2(s, c);
  if (th > cut_locus - kBranchMargin) branch_error(name, th, cut_locus);
  if (s == 0.0) return Vec3::Zero();
  if (c > -0.9) return (th / s) * v;
  // Near pi the antisymmetric part is small; read the axis from the
  // symmetric part nn^T = (sym(u) - c I) / (1 - c).
  const Matrix nn = (0.5 * (u + u.transpose()) - c * Matrix::Identity()) / (1.0 - c);
  int j = 0;
  nn.diagonal().maxCoeff(&j);
  Vec3 n = nn.col(j) / std::sqrt(nn(j, j));
  if (n.dot(v) < 0.0) n = -n;
  return th * n;
}

SO3::Matrix SO3::maximize_re_tr(const Matrix& k) {
  Eigen::JacobiSVD<Matrix> svd(k, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Matrix& U = svd.matrixU();
  const Matrix& V = svd.matrixV();
  Matrix d = Matrix::Identity();
  d(2, 2) = (V * U.transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  return V * d * U.transpose();
}

double SO3::unitarity_defect(const Matrix& u) {
  return std::max((u.transpose() * u - Matrix::Identity()).cwiseAbs().maxCoeff(),
                  std::abs(u.determinant() - 1.0));
}

SO3::Matrix SO3::haar(Rng& rng) { return SU2::ad_matrix(SU2::haar(rng)); }

void SO3::to_reals(const Matrix& u, double* out) {
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) *out++ = u(r, c);
}

SO3::Matrix SO3::from_reals(const double* in) {
  Matrix u;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) u(r, c) = *in++;
  return u;
}

}  // namespace nlh::lie
