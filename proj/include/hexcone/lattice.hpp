#pragma once

#include "hexcone/core.hpp"

#include <vector>

namespace hexcone {

// Quasimomentum in dual-basis coordinates (radians).
struct Quasimomentum {
  double k1 = 0.0;
  double k2 = 0.0;

  RealVec2 vec() const { return {k1, k2}; }
  static Quasimomentum from(const RealVec2& v) { return {v(0), v(1)}; }
  Quasimomentum operator+(const Quasimomentum& o) const { return {k1 + o.k1, k2 + o.k2}; }
  Quasimomentum operator-(const Quasimomentum& o) const { return {k1 - o.k1, k2 - o.k2}; }
  Quasimomentum operator-() const { return {-k1, -k2}; }
  Quasimomentum operator*(double s) const { return {s * k1, s * k2}; }
};

struct LatticeBasis {
  RealVec2 a1, a2;
  RealVec2 b1, b2;
  Mat2 A;  // columns a1, a2
  Mat2 B;  // columns b1, b2, B = A^{-T}
};

enum class Frame { k_coords, kappa_coords };
enum class PointSymmetry { R, V, F, F_V };

struct DualSymmetryMatrix {
  Mat2 M = Mat2::Identity();
  Frame frame = Frame::k_coords;
};

const LatticeBasis& hexagonal_basis();

RealVec2 k_to_kappa(const Quasimomentum& k);
Quasimomentum kappa_to_k(const RealVec2& kappa);

// reduce to [-pi, pi) with boundary snap
double reduce_angle(double x);
Quasimomentum reduce(const Quasimomentum& k);
// componentwise distance modulo 2 pi
double distance_mod_2pi(const Quasimomentum& a, const Quasimomentum& b);
bool same_mod_2pi(const Quasimomentum& a, const Quasimomentum& b, double tol = 1e-9);

Quasimomentum kstar();
std::vector<Quasimomentum> fixed_points_of_rotation();

Mat2 point_symmetry_matrix(PointSymmetry s);

// lattice-coordinate form A^{-1} M A of a point map; integral for lattice symmetries
Mat2 lattice_form(const Mat2& point_matrix);
bool preserves_lattice(const Mat2& point_matrix, double tol = 1e-9);

// dual action S = (A^{-1} M A)^T on k
DualSymmetryMatrix dual_from_point(const Mat2& point_matrix, Frame frame = Frame::k_coords);
DualSymmetryMatrix dual_symmetry_matrix(PointSymmetry s, Frame frame = Frame::k_coords);
DualSymmetryMatrix to_frame(const DualSymmetryMatrix& m, Frame frame);

Quasimomentum apply_dual_symmetry(const DualSymmetryMatrix& m, const Quasimomentum& k, bool reduce_result);

// Cartesian dual point folded into the hexagonal first Brillouin zone (plot export only)
RealVec2 fold_to_hexagonal_zone(const RealVec2& kappa);

}  // namespace hexcone
