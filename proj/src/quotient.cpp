#include "hexcone/quotient.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hexcone {

namespace {

CMat range_basis(const CMat& P) {
  const Eigen::Index n = P.rows();
  if (n == 0) return CMat(0, 0);
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (P + P.adjoint()));
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < n; ++i)
    if (es.eigenvalues()(i) > 0.5) keep.push_back(i);
  CMat B(n, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) B.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(keep[c]);
  return B;
}

RVec hermitian_spectrum(const CMat& Q) {
  if (Q.rows() == 0) return RVec(0);
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (Q + Q.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double max_abs(const CMat& M) { return M.size() ? M.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

RVec RotationDecomposition::block_spectrum(int j) const { return hermitian_spectrum(blocks[j]); }

LabelConvention labels_for(const Quasimomentum& k0) {
  return same_mod_2pi(k0, -kstar()) ? LabelConvention::conjugated : LabelConvention::direct;
}

RotationDecomposition decompose_matrix(const CMat& H0, const CMat& Uraw, const Quasimomentum& k0,
                                       LabelConvention labels) {
  const Eigen::Index n = H0.rows();
  if (Uraw.rows() != n || Uraw.cols() != n) throw Error(ErrorCode::InvalidArgument, "rotation matrix has wrong size");
  RotationDecomposition d;
  d.k0 = k0;
  d.H0 = H0;
  d.labels = labels;
  d.scale = matrix_scale(H0);
  const CMat I = CMat::Identity(n, n);

  // U^3 = zeta I for a rotation of order three; divide out a cube root of zeta
  const CMat U3 = Uraw * Uraw * Uraw;
  d.zeta = n ? U3.trace() / static_cast<double>(n) : cplx(1.0, 0.0);
  if (n && (max_abs(U3 - d.zeta * I) > 1e-8 || std::abs(std::abs(d.zeta) - 1.0) > 1e-8))
    throw Error(ErrorCode::MalformedAction, "rotation matrix does not cube to a multiple of the identity");
  const cplx root = std::polar(1.0, std::arg(d.zeta) / 3.0);
  d.U = Uraw / root;

  d.commutation_residual = max_abs(d.U * H0 - H0 * d.U);
  if (d.commutation_residual > 1e-8 * d.scale)
    throw Error(ErrorCode::NonCommuting,
                "rotation does not commute with H(k0): residual " + std::to_string(d.commutation_residual));

  const CMat U2 = d.U * d.U;
  for (int j = 0; j < 3; ++j) {
    const cplx mu = (labels == LabelConvention::direct) ? std::pow(std::conj(tau()), j) : std::pow(tau(), j);
    d.eigenphases[j] = mu;
    const CMat P = (I + std::conj(mu) * d.U + std::conj(mu * mu) * U2) / 3.0;
    d.bases[j] = range_basis(P);
    d.blocks[j] = d.bases[j].adjoint() * H0 * d.bases[j];
  }

  CMat sum = CMat::Zero(n, n);
  for (int j = 0; j < 3; ++j) {
    sum += d.bases[j] * d.bases[j].adjoint();
    d.projector_residual = std::max(d.projector_residual, max_abs(d.bases[j].adjoint() * d.bases[j] -
                                                                  CMat::Identity(d.dim(j), d.dim(j))));
    d.projector_residual =
        std::max(d.projector_residual, max_abs(d.U * d.bases[j] - d.eigenphases[j] * d.bases[j]));
    for (int m = 0; m < 3; ++m) {
      if (m == j) continue;
      d.block_residual = std::max(d.block_residual, max_abs(d.bases[j].adjoint() * H0 * d.bases[m]));
      d.projector_residual = std::max(d.projector_residual, max_abs(d.bases[j].adjoint() * d.bases[m]));
    }
  }
  d.projector_residual = std::max(d.projector_residual, max_abs(sum - I));
  return d;
}

RotationDecomposition decompose(const BlochFamily& H, const SymmetryAction& s_R, const Quasimomentum& k0) {
  const DualSymmetryMatrix S = dual_from_point(s_R.point_matrix);
  if (!same_mod_2pi(apply_dual_symmetry(S, k0, false), k0))
    throw Error(ErrorCode::NotAFixedPoint, "k0 is not fixed by the rotation");
  const BlochSymmetry b = realize(H, s_R, k0);
  if (b.residual > 1e-10 * matrix_scale(H.evaluate(k0)))
    throw Error(ErrorCode::NonCommuting, "rotation does not conjugate H(k0) to itself: residual " +
                                             std::to_string(b.residual));
  return decompose_matrix(H.evaluate(k0), b.matrix, k0, labels_for(k0));
}

CMat quotient_matrix_closed_form(double q1, double q2, double r, const Quasimomentum& k0) {
  const cplx t = tau();
  const cplx tb = std::conj(t);
  CMat Q(2, 2);
  if (same_mod_2pi(k0, kstar()) || same_mod_2pi(k0, -kstar())) {
    Q << q1, -1.0 - tb - r * tb, -1.0 - t - r * t, q2;
    if (same_mod_2pi(k0, -kstar())) Q = Q.conjugate().eval();
    return Q;
  }
  if (same_mod_2pi(k0, Quasimomentum{0.0, 0.0})) {
    Q << q1, -1.0 - tb - r * t, -1.0 - t - r * tb, q2;
    return Q;
  }
  throw Error(ErrorCode::NotAFixedPoint, "closed form exists only at the rotation fixed points");
}

IsospectralityReport block_spectra(const RotationDecomposition& d) {
  IsospectralityReport rep;
  for (int j = 0; j < 3; ++j) rep.spectra[j] = d.block_spectrum(j);
  if (rep.spectra[1].size() == rep.spectra[2].size()) {
    rep.max_pairing_error =
        rep.spectra[1].size() ? (rep.spectra[1] - rep.spectra[2]).cwiseAbs().maxCoeff() : 0.0;
  } else {
    rep.max_pairing_error = std::numeric_limits<double>::infinity();
  }
  return rep;
}

IsospectralityReport check_isospectrality(const RotationDecomposition& d, const BlochSymmetry& extra) {
  if (!same_mod_2pi(extra.k_to, d.k0))
    throw Error(ErrorCode::InvalidArgument, "extra symmetry '" + extra.name + "' does not fix k0");
  IsospectralityReport rep = block_spectra(d);
  const CMat& B1 = d.bases[1];
  const CMat& B2 = d.bases[2];
  if (B1.cols() == 0 && B2.cols() == 0) {
    rep.matched = true;
    rep.intertwiner_kind = extra.antiunitary ? IntertwinerKind::antiunitary_Vbar : IntertwinerKind::unitary_F;
    return rep;
  }
  const CMat S1 = extra.apply(B1);
  const CMat S2 = extra.apply(B2);
  rep.swap_residual = std::max(max_abs(S1 - B2 * (B2.adjoint() * S1)), max_abs(S2 - B1 * (B1.adjoint() * S2)));
  rep.fix_residual = std::max(max_abs(S1 - B1 * (B1.adjoint() * S1)), max_abs(S2 - B2 * (B2.adjoint() * S2)));
  const double tol = 1e-8;
  if (rep.swap_residual > tol && rep.fix_residual <= tol)
    throw Error(ErrorCode::WrongSymmetryKind,
                "'" + extra.name + "' preserves each rotation eigenspace instead of exchanging them");
  if (rep.swap_residual > tol || B1.cols() != B2.cols()) {
    rep.intertwiner_kind = IntertwinerKind::none;
    rep.matched = false;
    return rep;
  }
  rep.intertwiner_kind = extra.antiunitary ? IntertwinerKind::antiunitary_Vbar : IntertwinerKind::unitary_F;
  rep.matched = rep.max_pairing_error <= 1e-9 * d.scale;
  return rep;
}

IsospectralityReport check_isospectrality(const RotationDecomposition& d, const BlochFamily& H,
                                          const SymmetryAction& s_extra) {
  return check_isospectrality(d, symmetry_at_k(H, s_extra, d.k0));
}

std::vector<CensusEntry> multiplicity_census(const RotationDecomposition& d) {
  std::vector<std::pair<double, int>> all;
  for (int j = 0; j < 3; ++j) {
    const RVec w = d.block_spectrum(j);
    for (Eigen::Index i = 0; i < w.size(); ++i) all.push_back({w(i), j});
  }
  std::sort(all.begin(), all.end());
  const double tol = 1e-8 * d.scale;
  std::vector<CensusEntry> out;
  std::size_t i = 0;
  while (i < all.size()) {
    CensusEntry e;
    double sum = 0.0;
    std::size_t j = i;
    do {
      sum += all[j].first;
      e.block_counts[all[j].second]++;
      ++j;
    } while (j < all.size() && all[j].first - all[j - 1].first <= tol);
    e.multiplicity = static_cast<int>(j - i);
    e.lambda = sum / e.multiplicity;
    out.push_back(e);
    i = j;
  }
  return out;
}

std::vector<CensusEntry> multiplicity_census(const BlochFamily& H, const Quasimomentum& k0, const SymmetryAction& s_R,
                                             const SymmetryAction* s_extra, IsospectralityReport* report) {
  const RotationDecomposition d = decompose(H, s_R, k0);
  if (s_extra) {
    const IsospectralityReport rep = check_isospectrality(d, H, *s_extra);
    if (report) *report = rep;
  } else if (report) {
    *report = block_spectra(d);
  }
  return multiplicity_census(d);
}

bool suppression_check(const RotationDecomposition& d, std::optional<int> center) {
  if (!center) throw Error(ErrorCode::NoCenterVertex, "no vertex sits at the rotation centre");
  const Eigensystem es = eigensystem(d.H0);
  const std::vector<Cluster> clusters = cluster_eigenvalues(es.values, 1e-8 * d.scale);
  for (const Cluster& c : clusters) {
    const CMat V = es.vectors.middleCols(c.first, c.multiplicity);
    // weight of the cluster inside Q0; skip clusters that touch it
    const double in_q0 = d.dim(0) ? (d.bases[0].adjoint() * V).norm() : 0.0;
    if (in_q0 > 1e-6) continue;
    if (V.row(*center).cwiseAbs().maxCoeff() > 1e-9) return false;
  }
  return true;
}

}  // namespace hexcone
