#include "hexcone/lattice.hpp"

#include <cmath>
#include <limits>

namespace hexcone {

namespace {

LatticeBasis make_basis() {
  const double s = std::sqrt(3.0) / 2.0;
  LatticeBasis L;
  L.a1 = {s, 0.5};
  L.a2 = {s, -0.5};
  L.A.col(0) = L.a1;
  L.A.col(1) = L.a2;
  L.B = L.A.inverse().transpose();
  L.b1 = L.B.col(0);
  L.b2 = L.B.col(1);
  return L;
}

}  // namespace

const LatticeBasis& hexagonal_basis() {
  static const LatticeBasis basis = make_basis();
  return basis;
}

RealVec2 k_to_kappa(const Quasimomentum& k) { return hexagonal_basis().B * k.vec(); }

Quasimomentum kappa_to_k(const RealVec2& kappa) {
  // B^{-1} = A^T
  return Quasimomentum::from(hexagonal_basis().A.transpose() * kappa);
}

double reduce_angle(double x) {
  double r = x - kTwoPi * std::floor((x + kPi) / kTwoPi);
  if (r >= kPi - 1e-9) r -= kTwoPi;
  if (r < -kPi + 1e-9) r = -kPi;
  return r;
}

Quasimomentum reduce(const Quasimomentum& k) { return {reduce_angle(k.k1), reduce_angle(k.k2)}; }

double distance_mod_2pi(const Quasimomentum& a, const Quasimomentum& b) {
  const double d1 = std::remainder(a.k1 - b.k1, kTwoPi);
  const double d2 = std::remainder(a.k2 - b.k2, kTwoPi);
  return std::hypot(d1, d2);
}

bool same_mod_2pi(const Quasimomentum& a, const Quasimomentum& b, double tol) {
  return distance_mod_2pi(a, b) < tol;
}

Quasimomentum kstar() { return {kTwoPi / 3.0, -kTwoPi / 3.0}; }

std::vector<Quasimomentum> fixed_points_of_rotation() {
  const Quasimomentum ks = kstar();
  return {ks, -ks, {0.0, 0.0}};
}

Mat2 point_symmetry_matrix(PointSymmetry s) {
  const double h = std::sqrt(3.0) / 2.0;
  Mat2 M;
  switch (s) {
    case PointSymmetry::R:
      M << -0.5, h, -h, -0.5;  // clockwise by 2pi/3
      break;
    case PointSymmetry::V:
      M = -Mat2::Identity();
      break;
    case PointSymmetry::F:
      M << -1.0, 0.0, 0.0, 1.0;
      break;
    case PointSymmetry::F_V:
      M << 1.0, 0.0, 0.0, -1.0;
      break;
  }
  return M;
}

Mat2 lattice_form(const Mat2& point_matrix) {
  const Mat2& A = hexagonal_basis().A;
  return A.inverse() * point_matrix * A;
}

bool preserves_lattice(const Mat2& point_matrix, double tol) {
  const Mat2 L = lattice_form(point_matrix);
  return (L - L.array().round().matrix()).cwiseAbs().maxCoeff() < tol &&
         std::abs(std::abs(L.determinant()) - 1.0) < tol;
}

DualSymmetryMatrix dual_from_point(const Mat2& point_matrix, Frame frame) {
  Mat2 S = lattice_form(point_matrix).transpose();
  // integer entries in k-coordinates
  const Mat2 Sr = S.array().round().matrix();
  if ((S - Sr).cwiseAbs().maxCoeff() < 1e-9) S = Sr;
  return to_frame({S, Frame::k_coords}, frame);
}

DualSymmetryMatrix dual_symmetry_matrix(PointSymmetry s, Frame frame) {
  return dual_from_point(point_symmetry_matrix(s), frame);
}

DualSymmetryMatrix to_frame(const DualSymmetryMatrix& m, Frame frame) {
  if (m.frame == frame) return m;
  const Mat2& B = hexagonal_basis().B;
  if (frame == Frame::kappa_coords) return {B * m.M * B.inverse(), frame};
  return {B.inverse() * m.M * B, frame};
}

Quasimomentum apply_dual_symmetry(const DualSymmetryMatrix& m, const Quasimomentum& k, bool reduce_result) {
  const DualSymmetryMatrix mk = to_frame(m, Frame::k_coords);
  Quasimomentum out = Quasimomentum::from(mk.M * k.vec());
  return reduce_result ? reduce(out) : out;
}

RealVec2 fold_to_hexagonal_zone(const RealVec2& kappa) {
  const Mat2 G = kTwoPi * hexagonal_basis().B;
  const RealVec2 c = G.inverse() * kappa;
  RealVec2 best = kappa;
  double best_norm = std::numeric_limits<double>::infinity();
  const double c1 = std::round(c(0)), c2 = std::round(c(1));
  for (int i = -2; i <= 2; ++i) {
    for (int j = -2; j <= 2; ++j) {
      const RealVec2 cand = kappa - G * RealVec2(c1 + i, c2 + j);
      if (cand.norm() < best_norm - 1e-12) {
        best_norm = cand.norm();
        best = cand;
      }
    }
  }
  return best;
}

}  // namespace hexcone
