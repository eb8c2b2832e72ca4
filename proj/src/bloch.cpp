#include "hexcone/bloch.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace hexcone {

namespace {

cplx phase(const Shift& n, const Quasimomentum& k) {
  // arguments reduced first so that k and k + 2 pi e_j give the same phases
  const double k1 = std::remainder(k.k1, kTwoPi);
  const double k2 = std::remainder(k.k2, kTwoPi);
  return std::polar(1.0, n.n1 * k1 + n.n2 * k2);
}

double norm_bound(const CMat& H) {
  if (H.size() == 0) return 1.0;
  return std::max(1.0, H.cwiseAbs().rowwise().sum().maxCoeff());
}

}  // namespace

CMat BlochOperator::evaluate(const Quasimomentum& k) const {
  CMat H = CMat::Zero(dim_, dim_);
  for (const auto& [n, c] : monomials_) H += phase(n, k) * c;
  return H;
}

CMat BlochOperator::derivative(const Quasimomentum& k, int j) const {
  CMat D = CMat::Zero(dim_, dim_);
  for (const auto& [n, c] : monomials_) {
    const int nj = (j == 0) ? n.n1 : n.n2;
    if (nj != 0) D += (cplx(0.0, nj) * phase(n, k)) * c;
  }
  return D;
}

void BlochOperator::add(const Shift& n, const CMat& c) {
  if (c.rows() != dim_ || c.cols() != dim_) throw Error(ErrorCode::InvalidArgument, "monomial has wrong size");
  auto it = monomials_.find(n);
  if (it == monomials_.end()) monomials_.emplace(n, c);
  else it->second += c;
}

BlochOperator BlochOperator::operator+(const BlochOperator& o) const {
  if (o.dim_ != dim_) throw Error(ErrorCode::InvalidArgument, "adding operators of different dimension");
  BlochOperator out = *this;
  for (const auto& [n, c] : o.monomials_) out.add(n, c);
  return out;
}

BlochOperator BlochOperator::scaled(double s) const {
  BlochOperator out(dim_);
  for (const auto& [n, c] : monomials_) out.monomials_.emplace(n, s * c);
  return out;
}

double BlochOperator::hermiticity_defect() const {
  double d = 0.0;
  for (const auto& [n, c] : monomials_) {
    auto it = monomials_.find(-n);
    const double r = (it == monomials_.end()) ? c.norm() : (it->second - c.adjoint()).norm();
    d = std::max(d, r);
  }
  return d;
}

double BlochOperator::lipschitz_bound() const {
  double L = 0.0;
  for (const auto& [n, c] : monomials_) {
    // spectral norm bounded by the Frobenius norm
    L += c.norm() * std::hypot(static_cast<double>(n.n1), static_cast<double>(n.n2));
  }
  return L;
}

BlochOperator assemble(const PeriodicGraph& g) {
  const int n = g.size();
  BlochOperator H(n);
  CMat c0 = CMat::Zero(n, n);
  for (const Vertex& v : g.vertices) c0(v.id, v.id) += v.potential;
  for (const Edge& e : g.edges) {
    c0(e.v, e.v) += e.weight;
    c0(e.u, e.u) += e.weight;
  }
  H.add({0, 0}, c0);
  for (const Edge& e : g.edges) {
    CMat c = CMat::Zero(n, n);
    c(e.v, e.u) = -e.weight;
    H.add(e.shift, c);
    CMat ct = CMat::Zero(n, n);
    ct(e.u, e.v) = -e.weight;
    H.add(-e.shift, ct);
  }
  return H;
}

Eigensystem eigensystem(const CMat& H) {
  if (H.rows() == 0) return {RVec(0), CMat(0, 0)};
  Eigen::SelfAdjointEigenSolver<CMat> es(H);
  return {es.eigenvalues(), es.eigenvectors()};
}

RVec spectrum(const BlochFamily& H, const Quasimomentum& k) {
  const CMat M = H.evaluate(k);
  if (M.rows() == 0) return RVec(0);
  Eigen::SelfAdjointEigenSolver<CMat> es(M, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double matrix_scale(const CMat& H) {
  if (H.rows() == 0) return 1.0;
  Eigen::SelfAdjointEigenSolver<CMat> es(H, Eigen::EigenvaluesOnly);
  return std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
}

double cluster_tolerance(const CMat& H) { return 1e-8 * matrix_scale(H); }

std::vector<Cluster> cluster_eigenvalues(const RVec& w, double tol) {
  std::vector<Cluster> out;
  int i = 0;
  const int n = static_cast<int>(w.size());
  while (i < n) {
    int j = i + 1;
    while (j < n && w(j) - w(j - 1) <= tol) ++j;
    out.push_back({w.segment(i, j - i).mean(), i, j - i});
    i = j;
  }
  return out;
}

std::vector<Cluster> clusters_at(const BlochFamily& H, const Quasimomentum& k) {
  const RVec w = spectrum(H, k);
  const double scale = w.size() ? std::max(1.0, w.cwiseAbs().maxCoeff()) : 1.0;
  return cluster_eigenvalues(w, 1e-8 * scale);
}

GridSpec GridSpec::uniform_grid(int n) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "grid size must be at least 2");
  GridSpec g;
  g.kind = Kind::uniform;
  g.n = n;
  return g;
}

GridSpec GridSpec::polyline(std::vector<Quasimomentum> corners, int pps) {
  if (corners.size() < 2 || pps < 1) throw Error(ErrorCode::InvalidArgument, "path needs two corners and a positive density");
  GridSpec g;
  g.kind = Kind::path;
  g.vertices = std::move(corners);
  g.points_per_segment = pps;
  return g;
}

std::vector<Quasimomentum> GridSpec::points() const {
  std::vector<Quasimomentum> pts;
  if (kind == Kind::uniform) {
    pts.reserve(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) pts.push_back({-kPi + kTwoPi * i / n, -kPi + kTwoPi * j / n});
    return pts;
  }
  for (std::size_t s = 0; s + 1 < vertices.size(); ++s) {
    const Quasimomentum a = vertices[s], b = vertices[s + 1];
    for (int i = 0; i < points_per_segment; ++i) {
      const double t = static_cast<double>(i) / points_per_segment;
      pts.push_back(a + (b - a) * t);
    }
  }
  pts.push_back(vertices.back());
  return pts;
}

BandStructure sweep_points_serial(const BlochFamily& H, const std::vector<Quasimomentum>& pts) {
  BandStructure bs;
  bs.grid = pts;
  bs.bands.resize(static_cast<Eigen::Index>(pts.size()), H.dim());
  for (std::size_t i = 0; i < pts.size(); ++i) bs.bands.row(static_cast<Eigen::Index>(i)) = spectrum(H, pts[i]).transpose();
  return bs;
}

BandStructure sweep_points(const BlochFamily& H, const std::vector<Quasimomentum>& pts) {
  BandStructure bs;
  bs.grid = pts;
  bs.bands.resize(static_cast<Eigen::Index>(pts.size()), H.dim());
  const long np = static_cast<long>(pts.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (long i = 0; i < np; ++i) bs.bands.row(i) = spectrum(H, pts[i]).transpose();
  return bs;
}

BandStructure sweep(const BlochFamily& H, const GridSpec& spec) { return sweep_points(H, spec.points()); }

BandStructure sweep_serial(const BlochFamily& H, const GridSpec& spec) {
  return sweep_points_serial(H, spec.points());
}

CVec BlochSymmetry::apply(const CVec& f) const { return antiunitary ? CVec(matrix * f.conjugate()) : CVec(matrix * f); }

CMat BlochSymmetry::apply(const CMat& f) const { return antiunitary ? CMat(matrix * f.conjugate()) : CMat(matrix * f); }

Quasimomentum image_k(const SymmetryAction& s, const Quasimomentum& k) {
  const DualSymmetryMatrix S = dual_from_point(s.point_matrix);
  return apply_dual_symmetry(S, s.antiunitary ? -k : k, false);
}

CMat action_matrix(const SymmetryAction& s, const Quasimomentum& k) {
  const int n = s.size();
  const Quasimomentum ke = s.antiunitary ? -k : k;
  CMat U = CMat::Zero(n, n);
  for (int v = 0; v < n; ++v) U(v, s.permutation[v]) = phase(s.shifts[v], ke);
  return U;
}

double conjugation_residual(const BlochFamily& H, const CMat& U, bool anti, const Quasimomentum& k_from,
                            const Quasimomentum& k_to) {
  const CMat Hk = H.evaluate(k_from);
  const CMat lhs = anti ? CMat(U * Hk.conjugate() * U.adjoint()) : CMat(U * Hk * U.adjoint());
  return (lhs - H.evaluate(k_to)).cwiseAbs().maxCoeff();
}

BlochSymmetry realize(const BlochFamily& H, const SymmetryAction& s, const Quasimomentum& k) {
  if (s.size() != H.dim()) throw Error(ErrorCode::MalformedAction, "action size does not match operator dimension");
  BlochSymmetry b;
  b.name = s.name;
  b.antiunitary = s.antiunitary;
  b.k_from = k;
  b.k_to = reduce(image_k(s, k));
  b.matrix = action_matrix(s, k);
  b.unitarity_defect =
      (b.matrix * b.matrix.adjoint() - CMat::Identity(H.dim(), H.dim())).cwiseAbs().maxCoeff();
  b.residual = conjugation_residual(H, b.matrix, b.antiunitary, k, b.k_to);
  return b;
}

BlochSymmetry symmetry_at_k(const BlochFamily& H, const SymmetryAction& s, const Quasimomentum& k, double tol) {
  BlochSymmetry b = realize(H, s, k);
  const double scale = norm_bound(H.evaluate(k));
  if (b.residual > tol * scale || b.unitarity_defect > 1e-10)
    throw Error(ErrorCode::ConjugationMismatch,
                "action '" + s.name + "' does not conjugate H(k) onto H(Sk): residual " + std::to_string(b.residual));
  return b;
}

double symmetry_defect(const BlochFamily& H, const SymmetryAction& s, const std::vector<Quasimomentum>& samples) {
  double d = 0.0;
  for (const Quasimomentum& k : samples) d = std::max(d, realize(H, s, k).residual);
  return d;
}

DispersionSymmetryReport dispersion_symmetry_check(const BlochFamily& H, const SymmetryAction& s,
                                                   const std::vector<Quasimomentum>& grid) {
  const long np = static_cast<long>(grid.size());
  std::vector<double> dev(grid.size(), 0.0);
#pragma omp parallel for schedule(dynamic, 8)
  for (long i = 0; i < np; ++i) {
    const RVec a = spectrum(H, grid[i]);
    const RVec b = spectrum(H, image_k(s, grid[i]));
    dev[i] = a.size() ? (a - b).cwiseAbs().maxCoeff() : 0.0;
  }
  DispersionSymmetryReport rep;
  rep.points = static_cast<int>(np);
  for (long i = 0; i < np; ++i) {
    if (i == 0 || dev[i] > rep.max_deviation) {
      rep.max_deviation = dev[i];
      rep.worst = grid[i];
    }
  }
  return rep;
}

}  // namespace hexcone
