#include "hexcone/berry.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

namespace hexcone {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

CVec band_vector(const BlochFamily& H, const Quasimomentum& k, int band, double guard) {
  const Eigensystem es = eigensystem(H.evaluate(k));
  const Eigen::Index n = es.values.size();
  if (band < 0 || band >= n) throw Error(ErrorCode::InvalidArgument, "band index out of range");
  const double scale = std::max(1.0, es.values.cwiseAbs().maxCoeff());
  double gap = std::numeric_limits<double>::infinity();
  if (band > 0) gap = std::min(gap, es.values(band) - es.values(band - 1));
  if (band + 1 < n) gap = std::min(gap, es.values(band + 1) - es.values(band));
  if (gap < guard * scale)
    throw Error(ErrorCode::DegenerateOnContour, "band " + std::to_string(band) + " is degenerate on the contour (gap " +
                                                    std::to_string(gap) + ")");
  return es.vectors.col(band);
}

}  // namespace

const char* to_string(Quantization q) {
  switch (q) {
    case Quantization::zero: return "zero";
    case Quantization::pi: return "pi";
    case Quantization::unquantized: return "unquantized";
  }
  return "unquantized";
}

const char* to_string(Gauge g) { return g == Gauge::overlap_product ? "overlap_product" : "vbar_fixed"; }

const char* to_string(KeptSymmetry k) {
  switch (k) {
    case KeptSymmetry::F: return "F";
    case KeptSymmetry::Vbar: return "Vbar";
    case KeptSymmetry::none: return "none";
  }
  return "none";
}

Contour circle_contour(const Quasimomentum& center, double radius, int points, int band) {
  if (points < 8) throw Error(ErrorCode::InvalidArgument, "contour needs at least 8 points");
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "contour radius must be positive");
  Contour c;
  c.band = band;
  for (int i = 0; i < points; ++i) {
    const double t = kTwoPi * i / points;
    c.points.push_back(center + kappa_to_k(RealVec2(radius * std::cos(t), radius * std::sin(t))));
  }
  return c;
}

Contour reversed(const Contour& c) {
  Contour r = c;
  std::reverse(r.points.begin(), r.points.end());
  return r;
}

double wrap_phase(double x) {
  double y = std::remainder(x, kTwoPi);
  if (y <= -kPi) y += kTwoPi;
  return y;
}

Quantization quantize(double phase, double window) {
  const double a = std::abs(wrap_phase(phase));
  if (a < window) return Quantization::zero;
  if (kPi - a < window) return Quantization::pi;
  return Quantization::unquantized;
}

std::vector<CVec> contour_eigenvectors(const BlochFamily& H, const Contour& c, const BerryOptions& opt) {
  if (c.points.size() < 8) throw Error(ErrorCode::InvalidArgument, "contour needs at least 8 points");
  std::vector<CVec> psi(c.points.size());
  std::exception_ptr err;
  const long n = static_cast<long>(c.points.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (long i = 0; i < n; ++i) {
    try {
      psi[i] = band_vector(H, c.points[i], c.band, opt.gap_guard);
    } catch (...) {
#pragma omp critical(hexcone_contour_error)
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  return psi;
}

std::vector<CVec> contour_eigenvectors_serial(const BlochFamily& H, const Contour& c, const BerryOptions& opt) {
  if (c.points.size() < 8) throw Error(ErrorCode::InvalidArgument, "contour needs at least 8 points");
  std::vector<CVec> psi;
  psi.reserve(c.points.size());
  for (const Quasimomentum& k : c.points) psi.push_back(band_vector(H, k, c.band, opt.gap_guard));
  return psi;
}

BerryResult berry_phase_from_vectors(const std::vector<CVec>& psi, double min_overlap) {
  BerryResult r;
  r.points = static_cast<int>(psi.size());
  cplx prod(1.0, 0.0);
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const cplx o = psi[i].dot(psi[(i + 1) % psi.size()]);
    r.min_overlap = std::min(r.min_overlap, std::abs(o));
    prod *= o / std::abs(o);
  }
  if (r.min_overlap < min_overlap)
    throw Error(ErrorCode::LowOverlap, "neighbouring overlap " + std::to_string(r.min_overlap) + " is too small");
  r.phase = wrap_phase(-std::arg(prod));
  r.quantized = quantize(r.phase);
  return r;
}

BerryResult berry_phase(const BlochFamily& H, const Contour& c, const BerryOptions& opt) {
  return berry_phase_from_vectors(contour_eigenvectors(H, c, opt), opt.min_overlap);
}

BerryResult berry_phase_serial(const BlochFamily& H, const Contour& c, const BerryOptions& opt) {
  return berry_phase_from_vectors(contour_eigenvectors_serial(H, c, opt), opt.min_overlap);
}

CVec vbar_gauge_fix(const CVec& psi, const CMat& U, double tol) {
  const CVec img = U * psi.conjugate();
  const cplx c = psi.dot(img);
  if ((img - c * psi).norm() > tol * std::max(1.0, psi.norm()) || std::abs(c) < 0.5)
    throw Error(ErrorCode::NotEigenvectorOfInvolution, "vector is not mapped onto a multiple of itself");
  return std::polar(1.0, 0.5 * std::arg(c)) * psi;
}

namespace {

std::vector<CVec> fixed_vectors(const BlochFamily& H, const Contour& c, const SymmetryAction& vbar,
                                const BerryOptions& opt) {
  if (!vbar.antiunitary) throw Error(ErrorCode::InvalidArgument, "'" + vbar.name + "' is not antiunitary");
  std::vector<CVec> psi = contour_eigenvectors(H, c, opt);
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const BlochSymmetry s = symmetry_at_k(H, vbar, c.points[i]);
    if (!same_mod_2pi(s.k_to, c.points[i]))
      throw Error(ErrorCode::NotAFixedPoint, "'" + vbar.name + "' does not fix the contour point");
    psi[i] = vbar_gauge_fix(psi[i], s.matrix);
  }
  return psi;
}

}  // namespace

BerryResult berry_phase_vbar(const BlochFamily& H, const Contour& c, const SymmetryAction& vbar,
                             const BerryOptions& opt) {
  BerryResult r = berry_phase_from_vectors(fixed_vectors(H, c, vbar, opt), opt.min_overlap);
  r.gauge = Gauge::vbar_fixed;
  return r;
}

double vbar_holonomy(const BlochFamily& H, const Contour& c, const SymmetryAction& vbar, const BerryOptions& opt) {
  const std::vector<CVec> phi = fixed_vectors(H, c, vbar, opt);
  CVec v = phi[0];
  for (std::size_t i = 1; i < phi.size(); ++i) v = (v.dot(phi[i]).real() < 0.0 ? -1.0 : 1.0) * phi[i];
  return phi[0].dot(v).real() < 0.0 ? -1.0 : 1.0;
}

ConicFit conic_fit(const BlochFamily& H, const Quasimomentum& k0, int band, double radius, int directions) {
  ConicFit f;
  f.k0 = k0;
  std::vector<RealVec2> ds;
  for (double r : {radius, 0.5 * radius})
    for (int i = 0; i < directions; ++i) {
      const double t = kTwoPi * (i + 0.25) / directions;
      ds.push_back(RealVec2(r * std::cos(t), r * std::sin(t)));
    }
  const Eigen::Index m = static_cast<Eigen::Index>(ds.size());
  Eigen::MatrixXd Am(m, 3), Aq(m, 4);
  RVec ym(m), yq(m), h(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const RVec w = spectrum(H, k0 + Quasimomentum::from(ds[i]));
    if (band < 0 || band + 1 >= w.size()) throw Error(ErrorCode::InvalidArgument, "band pair out of range");
    const RealVec2& d = ds[i];
    Am.row(i) << 1.0, d(0), d(1);
    ym(i) = 0.5 * (w(band) + w(band + 1));
    h(i) = 0.5 * (w(band + 1) - w(band));
    Aq.row(i) << 1.0, d(0) * d(0), 2.0 * d(0) * d(1), d(1) * d(1);
    yq(i) = h(i) * h(i);
  }
  const RVec cm = Am.colPivHouseholderQr().solve(ym);
  const RVec cq = Aq.colPivHouseholderQr().solve(yq);
  f.lambda0 = cm(0);
  f.tilt = RealVec2(cm(1), cm(2));
  f.gap0 = 2.0 * std::sqrt(std::max(0.0, cq(0)));
  f.Q << cq(1), cq(2), cq(2), cq(3);
  double mis = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double model = std::sqrt(std::max(0.0, cq(0) + ds[i].dot(f.Q * ds[i])));
    mis += (model - h(i)) * (model - h(i));
  }
  const double mean_h = h.mean();
  f.residual = mean_h > 0.0 ? std::sqrt(mis / m) / mean_h : 0.0;
  Eigen::SelfAdjointEigenSolver<Mat2> es(f.Q);
  f.positive_definite = es.eigenvalues()(0) > 1e-3 * std::max(es.eigenvalues()(1), 1e-300) && f.residual < 1e-2;
  return f;
}

double distance_to_F_line(const Quasimomentum& k) { return std::abs(reduce_angle(k.k1 + k.k2)) / std::sqrt(2.0); }

PersistenceTrace persistence_scan(const BlochOperator& H, const BlochOperator& W, const std::vector<double>& eps,
                                  const Quasimomentum& k_seed, int band, KeptSymmetry kept,
                                  const SymmetryAction* s_kept, const SymmetryAction& s_R,
                                  const PersistenceOptions& opt) {
  if (H.dim() != W.dim()) throw Error(ErrorCode::InvalidArgument, "perturbation has the wrong dimension");
  std::vector<Quasimomentum> samples;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) samples.push_back({-kPi + kTwoPi * (i + 0.37) / 5, -kPi + kTwoPi * (j + 0.61) / 5});
  PersistenceTrace tr;
  const double wscale = std::max(1.0, W.lipschitz_bound());
  if (kept != KeptSymmetry::none) {
    if (!s_kept) throw Error(ErrorCode::InvalidArgument, "kept symmetry action missing");
    tr.kept_residual = symmetry_defect(W, *s_kept, samples);
    if (tr.kept_residual > 1e-10 * wscale)
      throw Error(ErrorCode::SymmetryValidationError,
                  "perturbation is not invariant under '" + s_kept->name + "'");
  }
  tr.rotation_residual = symmetry_defect(W, s_R, samples);
  if (tr.rotation_residual < 1e-8 * wscale)
    throw Error(ErrorCode::InvalidArgument, "perturbation does not break the rotation");

  Quasimomentum prev = k_seed;
  for (double e : eps) {
    const BlochOperator He = H + W.scaled(e);
    SearchOptions so;
    so.coarse = opt.coarse;
    so.seeds = {prev};
    const SearchResult sr =
        degeneracy_search_ex(He, SearchRegion::around(prev, opt.search_half_width), band, opt.tol, so);
    tr.epsilons.push_back(e);
    if (sr.points.empty()) {
      // cone lost: record the smallest gap seen and keep going
      tr.locations.push_back(sr.best);
      tr.gaps.push_back(sr.best_gap);
      tr.on_line_residuals.push_back(kept == KeptSymmetry::F ? distance_to_F_line(sr.best) : kNaN);
      tr.phases.push_back(kNaN);
      tr.found.push_back(false);
      tr.certified.push_back(false);
      continue;
    }
    Quasimomentum loc = sr.points.front();
    for (const Quasimomentum& p : sr.points)
      if (distance_mod_2pi(p, prev) < distance_mod_2pi(loc, prev)) loc = p;
    tr.locations.push_back(loc);
    tr.gaps.push_back(band_gap(He, loc, band));
    tr.on_line_residuals.push_back(kept == KeptSymmetry::F ? distance_to_F_line(loc) : kNaN);
    double phase = kNaN;
    try {
      phase = berry_phase(He, circle_contour(loc, opt.berry_radius, opt.berry_points, band)).phase;
    } catch (const Error&) {
    }
    tr.phases.push_back(phase);
    tr.found.push_back(true);
    tr.certified.push_back(conic_fit(He, loc, band).positive_definite);
    prev = loc;
  }
  return tr;
}

namespace {

struct SectorData {
  RVec even, odd;
  CMat even_vecs, odd_vecs;  // full-space columns
  double parity_residual = 0.0;
};

CMat range_of(const CMat& P) {
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (P + P.adjoint()));
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < P.rows(); ++i)
    if (es.eigenvalues()(i) > 0.5) keep.push_back(i);
  CMat B(P.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) B.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(keep[c]);
  return B;
}

SectorData sectors(const BlochFamily& H, const SymmetryAction& s_F, double t) {
  const Quasimomentum k{t, -t};
  const BlochSymmetry F = symmetry_at_k(H, s_F, k);
  if (F.antiunitary || !same_mod_2pi(F.k_to, k))
    throw Error(ErrorCode::NotAFixedPoint, "'" + s_F.name + "' does not fix the line k2 = -k1");
  const CMat U2 = F.matrix * F.matrix;
  const cplx zeta = U2.trace() / static_cast<double>(U2.rows());
  const CMat U = F.matrix / std::polar(1.0, 0.5 * std::arg(zeta));
  const CMat I = CMat::Identity(U.rows(), U.cols());
  const CMat Hk = H.evaluate(k);
  SectorData s;
  const CMat Be = range_of(0.5 * (I + U));
  const CMat Bo = range_of(0.5 * (I - U));
  const Eigensystem ee = eigensystem(Be.adjoint() * Hk * Be);
  const Eigensystem eo = eigensystem(Bo.adjoint() * Hk * Bo);
  s.even = ee.values;
  s.odd = eo.values;
  s.even_vecs = Be * ee.vectors;
  s.odd_vecs = Bo * eo.vectors;
  if (s.even_vecs.cols()) s.parity_residual = (U * s.even_vecs - s.even_vecs).cwiseAbs().maxCoeff();
  if (s.odd_vecs.cols())
    s.parity_residual = std::max(s.parity_residual, (U * s.odd_vecs + s.odd_vecs).cwiseAbs().maxCoeff());
  return s;
}

}  // namespace

CrossingReport parity_crossing(const BlochFamily& H, const SymmetryAction& s_F, int samples, double t0, double t1,
                               int band_lo, int band_hi) {
  if (samples < 2) throw Error(ErrorCode::InvalidArgument, "need at least two samples on the line");
  CrossingReport rep;
  std::vector<SectorData> data(samples);
  for (int i = 0; i < samples; ++i) rep.ts.push_back(t0 + (t1 - t0) * i / (samples - 1));
  std::exception_ptr err;
#pragma omp parallel for schedule(dynamic, 4)
  for (int i = 0; i < samples; ++i) {
    try {
      data[i] = sectors(H, s_F, rep.ts[i]);
    } catch (...) {
#pragma omp critical(hexcone_parity_error)
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  const Eigen::Index ne = data[0].even.size(), no = data[0].odd.size();
  rep.even.resize(samples, ne);
  rep.odd.resize(samples, no);
  for (int i = 0; i < samples; ++i) {
    rep.even.row(i) = data[i].even.transpose();
    rep.odd.row(i) = data[i].odd.transpose();
    rep.max_parity_residual = std::max(rep.max_parity_residual, data[i].parity_residual);
  }
  for (Eigen::Index a = 0; a < ne; ++a)
    for (Eigen::Index b = 0; b < no; ++b) {
      for (int i = 0; i + 1 < samples; ++i) {
        const double d0 = rep.even(i, a) - rep.odd(i, b);
        const double d1 = rep.even(i + 1, a) - rep.odd(i + 1, b);
        if (!(d0 * d1 < 0.0) && !(d0 == 0.0 && i > 0)) continue;
        double lo = rep.ts[i], hi = rep.ts[i + 1], flo = d0;
        if (d0 == 0.0) hi = lo;
        for (int it = 0; it < 80 && hi - lo > 1e-15; ++it) {
          const double mid = 0.5 * (lo + hi);
          const SectorData s = sectors(H, s_F, mid);
          const double fm = s.even(a) - s.odd(b);
          if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
          } else {
            hi = mid;
          }
        }
        Crossing c;
        c.t = 0.5 * (lo + hi);
        c.even_index = static_cast<int>(a);
        c.odd_index = static_cast<int>(b);
        const SectorData s = sectors(H, s_F, c.t);
        c.lambda = 0.5 * (s.even(a) + s.odd(b));
        const Quasimomentum k{c.t, -c.t};
        const RVec w = spectrum(H, k);
        const double scale = std::max(1.0, w.cwiseAbs().maxCoeff());
        c.lower_band = static_cast<int>((w.array() < c.lambda - 1e-7 * scale).count());
        if (c.lower_band < band_lo || c.lower_band > band_hi) continue;
        const CMat D = H.derivative(k, 0) - H.derivative(k, 1);
        const CVec u = s.even_vecs.col(a), v = s.odd_vecs.col(b);
        c.slope_difference = u.dot(D * u).real() - v.dot(D * v).real();
        rep.crossings.push_back(c);
      }
    }
  std::sort(rep.crossings.begin(), rep.crossings.end(), [](const Crossing& x, const Crossing& y) { return x.t < y.t; });
  return rep;
}

}  // namespace hexcone
