#include "hexcone/dirac.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace hexcone {

namespace {

// unit-modulus normalization of an order-p unitary: U^p = zeta I
CMat normalize_order(const CMat& U, int p) {
  CMat Up = CMat::Identity(U.rows(), U.cols());
  for (int i = 0; i < p; ++i) Up = Up * U;
  const cplx zeta = Up.trace() / static_cast<double>(std::max<Eigen::Index>(1, U.rows()));
  if ((Up - zeta * CMat::Identity(U.rows(), U.cols())).cwiseAbs().maxCoeff() > 1e-8)
    throw Error(ErrorCode::MalformedAction, "symmetry matrix has the wrong order");
  return U / std::polar(1.0, std::arg(zeta) / p);
}

// unit vector of span(E) lying in the range of the projector P, if any
bool vector_in_range(const CMat& E, const CMat& P, CVec& out) {
  const CMat M = E.adjoint() * P * E;
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (M + M.adjoint()));
  const Eigen::Index top = es.eigenvalues().size() - 1;
  if (es.eigenvalues()(top) < 1.0 - 1e-6) return false;
  out = E * es.eigenvectors().col(top);
  out.normalize();
  return true;
}

Mat2c hermitize(const Mat2c& h) { return 0.5 * (h + h.adjoint()); }

}  // namespace

const char* to_string(ConeClass c) {
  switch (c) {
    case ConeClass::nondegenerate_conical: return "nondegenerate_conical";
    case ConeClass::fully_degenerate_flat: return "fully_degenerate_flat";
    case ConeClass::indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

HMatrices derivative_matrices(const BlochFamily& H, const Quasimomentum& k0, const CVec& f1, const CVec& f2) {
  HMatrices h;
  const CMat D1 = H.derivative(k0, 0);
  const CMat D2 = H.derivative(k0, 1);
  const std::array<const CVec*, 2> f{&f1, &f2};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      h.h1(a, b) = f[a]->dot(D1 * *f[b]);
      h.h2(a, b) = f[a]->dot(D2 * *f[b]);
    }
  h.h1 = hermitize(h.h1);
  h.h2 = hermitize(h.h2);
  return h;
}

CMat eigenspace_at(const BlochFamily& H, const Quasimomentum& k0, double lambda0) {
  const CMat M = H.evaluate(k0);
  const Eigensystem es = eigensystem(M);
  const double scale = es.values.size() ? std::max(1.0, es.values.cwiseAbs().maxCoeff()) : 1.0;
  const std::vector<Cluster> cl = cluster_eigenvalues(es.values, 1e-8 * scale);
  if (cl.empty()) return CMat(0, 0);
  const Cluster* best = &cl.front();
  for (const Cluster& c : cl)
    if (std::abs(c.lambda - lambda0) < std::abs(best->lambda - lambda0)) best = &c;
  return es.vectors.middleCols(best->first, best->multiplicity);
}

DegenerateEigenpair rotation_adapted_basis(const BlochFamily& H, const Quasimomentum& k0, const BlochSymmetry& R,
                                           double lambda0) {
  if (R.antiunitary) throw Error(ErrorCode::InvalidArgument, "rotation must be unitary");
  if (!same_mod_2pi(R.k_to, k0)) throw Error(ErrorCode::NotAFixedPoint, "k0 is not fixed by the rotation");
  const CMat E = eigenspace_at(H, k0, lambda0);
  if (E.cols() != 2)
    throw Error(ErrorCode::MultiplicityMismatch,
                "eigenvalue cluster has multiplicity " + std::to_string(E.cols()) + ", expected 2");
  const CMat U = normalize_order(R.matrix, 3);
  const Eigen::Index n = U.rows();
  const CMat I = CMat::Identity(n, n);
  const CMat U2 = U * U;
  const cplx t = tau();
  // projector onto U = mu: (I + conj(mu) U + conj(mu)^2 U^2) / 3
  const CMat P_tau = (I + std::conj(t) * U + std::conj(t * t) * U2) / 3.0;
  const CMat P_taubar = (I + t * U + t * t * U2) / 3.0;
  DegenerateEigenpair d;
  d.k0 = k0;
  d.lambda0 = lambda0;
  d.basis_kind = BasisKind::rotation_adapted;
  if (!vector_in_range(E, P_tau, d.f1) || !vector_in_range(E, P_taubar, d.f2))
    throw Error(ErrorCode::RotationFixesEigenspace, "degenerate eigenspace does not split into tau and conj(tau) parts");
  return d;
}

DegenerateEigenpair rotation_adapted_basis(const BlochFamily& H, const Quasimomentum& k0, const SymmetryAction& s_R,
                                           double lambda0) {
  return rotation_adapted_basis(H, k0, symmetry_at_k(H, s_R, k0), lambda0);
}

DegenerateEigenpair parity_adapted_basis(const BlochFamily& H, const Quasimomentum& k0, const BlochSymmetry& F,
                                         double lambda0) {
  if (F.antiunitary) throw Error(ErrorCode::InvalidArgument, "reflection must be unitary");
  if (!same_mod_2pi(F.k_to, k0)) throw Error(ErrorCode::NotAFixedPoint, "k0 is not on the reflection line");
  const CMat E = eigenspace_at(H, k0, lambda0);
  if (E.cols() != 2)
    throw Error(ErrorCode::MultiplicityMismatch,
                "eigenvalue cluster has multiplicity " + std::to_string(E.cols()) + ", expected 2");
  const CMat U = normalize_order(F.matrix, 2);
  const CMat I = CMat::Identity(U.rows(), U.cols());
  DegenerateEigenpair d;
  d.k0 = k0;
  d.lambda0 = lambda0;
  d.basis_kind = BasisKind::parity_adapted;
  if (!vector_in_range(E, 0.5 * (I + U), d.f1) || !vector_in_range(E, 0.5 * (I - U), d.f2))
    throw Error(ErrorCode::RotationFixesEigenspace, "degenerate eigenspace does not split into even and odd parts");
  return d;
}

HStructure verify_h_structure(const Mat2c& h1, const Mat2c& h2, BasisKind) {
  HStructure s;
  s.alpha = h1(0, 1);
  const cplx t = tau();
  Mat2c t1, t2;
  t1 << 0.0, s.alpha, std::conj(s.alpha), 0.0;
  t2 << 0.0, t * s.alpha, std::conj(t * s.alpha), 0.0;
  s.residual = (h1 - t1).norm() + (h2 - t2).norm();
  return s;
}

ParityStructure parity_structure(const Mat2c& h_e, const Mat2c& h_o) {
  ParityStructure p;
  p.a = h_e(0, 0).real();
  p.c = h_e(1, 1).real();
  p.b = h_o(0, 1);
  p.residual = std::abs(h_e(0, 1)) + std::abs(h_e(1, 0)) + std::abs(h_o(0, 0)) + std::abs(h_o(1, 1));
  p.trace_odd = std::abs(h_o.trace());
  return p;
}

ParityStructure parity_structure(const HMatrices& h) { return parity_structure(h.h1 - h.h2, h.h1 + h.h2); }

ConeReport classify(const BlochFamily& H, const Quasimomentum& k0, const BlochSymmetry& R, double lambda0) {
  ConeReport rep;
  rep.k0 = k0;
  const CMat M = H.evaluate(k0);
  rep.scale = matrix_scale(M);
  const CMat E = eigenspace_at(H, k0, lambda0);
  rep.multiplicity = static_cast<int>(E.cols());
  rep.lambda0 = E.cols() ? (E.adjoint() * M * E).trace().real() / static_cast<double>(E.cols()) : lambda0;
  if (rep.multiplicity != 2) {
    rep.classification = ConeClass::indeterminate;
    rep.note = "multiplicity " + std::to_string(rep.multiplicity);
    return rep;
  }
  DegenerateEigenpair pair;
  try {
    pair = rotation_adapted_basis(H, k0, R, lambda0);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::RotationFixesEigenspace) throw;
    rep.classification = ConeClass::indeterminate;
    rep.note = e.what();
    return rep;
  }
  const HMatrices h = derivative_matrices(H, k0, pair.f1, pair.f2);
  rep.h1 = h.h1;
  rep.h2 = h.h2;
  const HStructure st = verify_h_structure(h.h1, h.h2);
  rep.alpha = st.alpha;
  rep.structure_residual = st.residual;
  // d/dkappa_1 = A_11 d/dk_1 + A_12 d/dk_2
  const Mat2& A = hexagonal_basis().A;
  rep.alpha_kappa = A(0, 0) * h.h1(0, 1) + A(0, 1) * h.h2(0, 1);
  rep.tilt = {0.5 * h.h1.trace().real(), 0.5 * h.h2.trace().real()};
  const double tol_flat = 1e-8 * rep.scale;
  if (std::abs(rep.alpha) > 1e-6 * rep.scale && rep.structure_residual < 1e-8 * rep.scale) {
    rep.classification = ConeClass::nondegenerate_conical;
  } else if (h.h1.norm() < tol_flat && h.h2.norm() < tol_flat) {
    rep.classification = ConeClass::fully_degenerate_flat;
  } else {
    rep.classification = ConeClass::indeterminate;
    rep.note = "first-order structure outside both thresholds";
  }
  return rep;
}

ConeReport classify(const BlochFamily& H, const Quasimomentum& k0, const SymmetryAction& s_R, double lambda0) {
  return classify(H, k0, symmetry_at_k(H, s_R, k0), lambda0);
}

namespace {

ConeFit finish_fit(const std::vector<double>& radii, std::vector<std::vector<double>> slopes, const ConeReport* cone) {
  ConeFit fit;
  fit.radii = radii;
  fit.slopes = std::move(slopes);
  const std::size_t nr = radii.size();
  const std::size_t nd = nr ? fit.slopes[0].size() : 0;
  for (std::size_t r = 0; r < nr; ++r) {
    const auto& s = fit.slopes[r];
    double sum = 0.0;
    for (double x : s) sum += x;
    fit.mean_slope.push_back(sum / static_cast<double>(nd));
    const auto [mn, mx] = std::minmax_element(s.begin(), s.end());
    fit.anisotropy.push_back(*mn > 0.0 ? *mx / *mn : std::numeric_limits<double>::infinity());
  }
  // per direction: s(r) = a + b r, keep a
  std::vector<double> extrap(nd, 0.0);
  for (std::size_t d = 0; d < nd; ++d) {
    if (nr == 1) {
      extrap[d] = fit.slopes[0][d];
      continue;
    }
    double sr = 0, ss = 0, srr = 0, srs = 0;
    for (std::size_t r = 0; r < nr; ++r) {
      sr += radii[r];
      ss += fit.slopes[r][d];
      srr += radii[r] * radii[r];
      srs += radii[r] * fit.slopes[r][d];
    }
    const double n = static_cast<double>(nr);
    const double b = (n * srs - sr * ss) / (n * srr - sr * sr);
    extrap[d] = (ss - b * sr) / n;
  }
  if (nd) {
    double sum = 0.0;
    for (double x : extrap) sum += x;
    fit.slope = sum / static_cast<double>(nd);
    const auto [mn, mx] = std::minmax_element(extrap.begin(), extrap.end());
    fit.anisotropy_extrapolated = *mn > 0.0 ? *mx / *mn : std::numeric_limits<double>::infinity();
  }
  if (cone && std::abs(cone->alpha) > 0.0) {
    const double ak = std::abs(cone->alpha_kappa);
    const double a = std::abs(cone->alpha);
    fit.ratio_unit = fit.slope / ak;
    fit.ratio_two_over_sqrt3 = fit.slope / (2.0 * ak / std::sqrt(3.0));
    fit.ratio_k_unit = fit.slope / a;
    fit.ratio_k_two_over_sqrt3 = fit.slope / (2.0 * a / std::sqrt(3.0));
    fit.ratio_k_sqrt3_over_two = fit.slope / (std::sqrt(3.0) * a / 2.0);
  }
  return fit;
}

std::vector<Quasimomentum> ring_points(const Quasimomentum& k0, const std::vector<double>& radii, int nd) {
  std::vector<Quasimomentum> pts;
  for (double r : radii)
    for (int d = 0; d < nd; ++d) {
      const double th = kTwoPi * d / nd;
      pts.push_back(k0 + kappa_to_k(RealVec2(r * std::cos(th), r * std::sin(th))));
    }
  return pts;
}

// pick the two eigenpairs continuing the degenerate pair around each ring
std::vector<std::vector<double>> ring_slopes(const std::vector<Eigensystem>& es, const CMat& E0, double lambda0,
                                             const std::vector<double>& radii, int nd) {
  std::vector<std::vector<double>> slopes(radii.size(), std::vector<double>(nd, 0.0));
  for (std::size_t r = 0; r < radii.size(); ++r) {
    CMat prev = E0;
    for (int d = 0; d < nd; ++d) {
      const Eigensystem& e = es[r * nd + d];
      const Eigen::Index n = e.values.size();
      std::vector<std::pair<double, Eigen::Index>> ov;
      for (Eigen::Index i = 0; i < n; ++i) ov.push_back({(prev.adjoint() * e.vectors.col(i)).squaredNorm(), i});
      std::partial_sort(ov.begin(), ov.begin() + 2, ov.end(),
                        [](const auto& x, const auto& y) { return x.first > y.first || (x.first == y.first && x.second < y.second); });
      Eigen::Index ia = std::min(ov[0].second, ov[1].second);
      Eigen::Index ib = std::max(ov[0].second, ov[1].second);
      const double sp = std::abs(e.values(ib) - lambda0) / radii[r];
      const double sm = std::abs(e.values(ia) - lambda0) / radii[r];
      slopes[r][d] = 0.5 * (sp + sm);
      prev.resize(n, 2);
      prev.col(0) = e.vectors.col(ia);
      prev.col(1) = e.vectors.col(ib);
    }
  }
  return slopes;
}

}  // namespace

ConeFit cone_fit(const BlochFamily& H, const Quasimomentum& k0, double lambda0, const ConeFitOptions& opt,
                 const ConeReport* cone) {
  const CMat E0 = eigenspace_at(H, k0, lambda0);
  if (E0.cols() < 2) throw Error(ErrorCode::MultiplicityMismatch, "no degenerate pair at k0");
  const std::vector<Quasimomentum> pts = ring_points(k0, opt.radii, opt.directions);
  std::vector<Eigensystem> es(pts.size());
  const long np = static_cast<long>(pts.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (long i = 0; i < np; ++i) es[i] = eigensystem(H.evaluate(pts[i]));
  return finish_fit(opt.radii, ring_slopes(es, E0.leftCols(2), lambda0, opt.radii, opt.directions), cone);
}

ConeFit cone_fit_serial(const BlochFamily& H, const Quasimomentum& k0, double lambda0, const ConeFitOptions& opt,
                        const ConeReport* cone) {
  const CMat E0 = eigenspace_at(H, k0, lambda0);
  if (E0.cols() < 2) throw Error(ErrorCode::MultiplicityMismatch, "no degenerate pair at k0");
  const std::vector<Quasimomentum> pts = ring_points(k0, opt.radii, opt.directions);
  std::vector<Eigensystem> es(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) es[i] = eigensystem(H.evaluate(pts[i]));
  return finish_fit(opt.radii, ring_slopes(es, E0.leftCols(2), lambda0, opt.radii, opt.directions), cone);
}

SearchRegion SearchRegion::around(const Quasimomentum& c, double h) { return {{c.k1 - h, c.k2 - h}, {c.k1 + h, c.k2 + h}}; }

double band_gap(const BlochFamily& H, const Quasimomentum& k, int band) {
  const RVec w = spectrum(H, k);
  if (band < 0 || band + 1 >= w.size()) throw Error(ErrorCode::InvalidArgument, "band pair out of range");
  return w(band + 1) - w(band);
}

namespace {

struct Refined {
  Quasimomentum k;
  double gap;
};

// Nelder-Mead on the squared gap, which is locally quadratic at a conical touching
Refined refine(const BlochFamily& H, int band, Quasimomentum start, double step, int max_it) {
  auto f = [&](const RealVec2& x) {
    const double g = band_gap(H, Quasimomentum::from(x), band);
    return g * g;
  };
  std::array<RealVec2, 3> p = {start.vec(), start.vec() + RealVec2(step, 0.0), start.vec() + RealVec2(0.0, step)};
  std::array<double, 3> v = {f(p[0]), f(p[1]), f(p[2])};
  for (int it = 0; it < max_it; ++it) {
    std::array<int, 3> o = {0, 1, 2};
    std::sort(o.begin(), o.end(), [&](int a, int b) { return v[a] < v[b]; });
    const RealVec2 best = p[o[0]], mid = p[o[1]], worst = p[o[2]];
    const double fb = v[o[0]], fm = v[o[1]], fw = v[o[2]];
    if ((mid - best).norm() < 1e-13 && (worst - best).norm() < 1e-13) break;
    if (fb == 0.0) break;
    const RealVec2 c = 0.5 * (best + mid);
    const RealVec2 xr = c + (c - worst);
    const double fr = f(xr);
    if (fr < fb) {
      const RealVec2 xe = c + 2.0 * (c - worst);
      const double fe = f(xe);
      if (fe < fr) {
        p[o[2]] = xe;
        v[o[2]] = fe;
      } else {
        p[o[2]] = xr;
        v[o[2]] = fr;
      }
    } else if (fr < fm) {
      p[o[2]] = xr;
      v[o[2]] = fr;
    } else {
      const RealVec2 xc = (fr < fw) ? RealVec2(c + 0.5 * (xr - c)) : RealVec2(c + 0.5 * (worst - c));
      const double fc = f(xc);
      if (fc < std::min(fr, fw)) {
        p[o[2]] = xc;
        v[o[2]] = fc;
      } else {
        for (int i : {o[1], o[2]}) {
          p[i] = best + 0.5 * (p[i] - best);
          v[i] = f(p[i]);
        }
      }
    }
  }
  int ib = 0;
  for (int i = 1; i < 3; ++i)
    if (v[i] < v[ib]) ib = i;
  return {Quasimomentum::from(p[ib]), std::sqrt(v[ib])};
}

std::vector<Quasimomentum> coarse_points(const SearchRegion& R, int n) {
  std::vector<Quasimomentum> pts;
  const double h1 = (R.hi.k1 - R.lo.k1) / n, h2 = (R.hi.k2 - R.lo.k2) / n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) pts.push_back({R.lo.k1 + (i + 0.5) * h1, R.lo.k2 + (j + 0.5) * h2});
  return pts;
}

std::vector<Quasimomentum> candidates(const std::vector<double>& gaps, const std::vector<Quasimomentum>& pts, int n,
                                      const std::vector<Quasimomentum>& seeds) {
  std::vector<std::pair<double, int>> minima;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double g = gaps[i * n + j];
      bool local = true;
      for (int di = -1; di <= 1 && local; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          if (!di && !dj) continue;
          const int a = i + di, b = j + dj;
          if (a < 0 || b < 0 || a >= n || b >= n) continue;
          if (gaps[a * n + b] < g) {
            local = false;
            break;
          }
        }
      if (local) minima.push_back({g, i * n + j});
    }
  std::sort(minima.begin(), minima.end());
  if (minima.size() > 32) minima.resize(32);
  std::vector<Quasimomentum> out = seeds;
  for (const auto& m : minima) out.push_back(pts[m.second]);
  return out;
}

SearchResult collect(const std::vector<Refined>& refined, const SearchRegion& R, double margin, double tol) {
  SearchResult res;
  res.best_gap = std::numeric_limits<double>::infinity();
  std::vector<Refined> kept;
  for (const Refined& r : refined) {
    if (r.gap < res.best_gap) {
      res.best_gap = r.gap;
      res.best = r.k;
    }
    if (!(r.gap < tol)) continue;
    const bool full_zone = (R.hi.k1 - R.lo.k1) >= kTwoPi - 1e-12 && (R.hi.k2 - R.lo.k2) >= kTwoPi - 1e-12;
    Quasimomentum k = r.k;
    if (full_zone) {
      k = reduce(k);
    } else if (k.k1 < R.lo.k1 - margin || k.k1 > R.hi.k1 + margin || k.k2 < R.lo.k2 - margin ||
               k.k2 > R.hi.k2 + margin) {
      continue;
    }
    bool dup = false;
    for (Refined& q : kept)
      if (distance_mod_2pi(q.k, k) < 1e-6) {
        dup = true;
        if (r.gap < q.gap) q = {k, r.gap};
      }
    if (!dup) kept.push_back({k, r.gap});
  }
  std::sort(kept.begin(), kept.end(), [](const Refined& a, const Refined& b) {
    return a.k.k1 < b.k.k1 || (a.k.k1 == b.k.k1 && a.k.k2 < b.k.k2);
  });
  for (const Refined& r : kept) res.points.push_back(r.k);
  return res;
}

}  // namespace

SearchResult degeneracy_search_ex(const BlochFamily& H, const SearchRegion& R, int band, double tol,
                                  const SearchOptions& opt) {
  const int n = opt.coarse;
  const std::vector<Quasimomentum> pts = coarse_points(R, n);
  std::vector<double> gaps(pts.size());
  const long np = static_cast<long>(pts.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (long i = 0; i < np; ++i) gaps[i] = band_gap(H, pts[i], band);
  const std::vector<Quasimomentum> cand = candidates(gaps, pts, n, opt.seeds);
  const double step = std::max((R.hi.k1 - R.lo.k1), (R.hi.k2 - R.lo.k2)) / n;
  std::vector<Refined> refined(cand.size());
  const long nc = static_cast<long>(cand.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < nc; ++i) refined[i] = refine(H, band, cand[i], step, opt.max_iterations);
  return collect(refined, R, step, tol);
}

SearchResult degeneracy_search_serial(const BlochFamily& H, const SearchRegion& R, int band, double tol,
                                      const SearchOptions& opt) {
  const int n = opt.coarse;
  const std::vector<Quasimomentum> pts = coarse_points(R, n);
  std::vector<double> gaps(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) gaps[i] = band_gap(H, pts[i], band);
  const std::vector<Quasimomentum> cand = candidates(gaps, pts, n, opt.seeds);
  const double step = std::max((R.hi.k1 - R.lo.k1), (R.hi.k2 - R.lo.k2)) / n;
  std::vector<Refined> refined(cand.size());
  for (std::size_t i = 0; i < cand.size(); ++i) refined[i] = refine(H, band, cand[i], step, opt.max_iterations);
  return collect(refined, R, step, tol);
}

std::vector<Quasimomentum> degeneracy_search(const BlochFamily& H, const SearchRegion& R, int band, double tol,
                                             const SearchOptions& opt) {
  return degeneracy_search_ex(H, R, band, tol, opt).points;
}

}  // namespace hexcone
