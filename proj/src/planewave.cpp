#include "hexcone/planewave.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <set>
#include <sstream>

namespace hexcone {

namespace {

using IMat = Eigen::Matrix2i;

IMat integer_dual(const Mat2& point_matrix) {
  const Mat2 S = dual_from_point(point_matrix).M;
  IMat out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out(i, j) = static_cast<int>(std::lround(S(i, j)));
  return out;
}

DualIndex act(const IMat& S, const DualIndex& g) {
  return {S(0, 0) * g.n1 + S(0, 1) * g.n2, S(1, 0) * g.n1 + S(1, 1) * g.n2};
}

std::vector<IMat> group_from_flags(unsigned flags) {
  std::vector<IMat> gens;
  if (flags & kFlagR) gens.push_back(integer_dual(point_symmetry_matrix(PointSymmetry::R)));
  if (flags & kFlagV) gens.push_back(-IMat::Identity());
  if (flags & kFlagF) gens.push_back(integer_dual(point_symmetry_matrix(PointSymmetry::F)));
  if (flags & kFlagFV) gens.push_back(integer_dual(point_symmetry_matrix(PointSymmetry::F_V)));
  std::vector<IMat> group{IMat::Identity()};
  for (std::size_t i = 0; i < group.size(); ++i)
    for (const IMat& g : gens) {
      const IMat h = g * group[i];
      if (std::none_of(group.begin(), group.end(), [&](const IMat& x) { return x == h; })) group.push_back(h);
    }
  return group;
}

cplx lookup(const std::map<DualIndex, cplx>& c, const DualIndex& g) {
  auto it = c.find(g);
  return it == c.end() ? cplx(0.0, 0.0) : it->second;
}

bool invariant_under(const std::map<DualIndex, cplx>& c, const IMat& S, double tol) {
  for (const auto& [g, v] : c)
    if (std::abs(lookup(c, act(S, g)) - v) > tol) return false;
  return true;
}

bool is_real(const std::map<DualIndex, cplx>& c, double tol) {
  for (const auto& [g, v] : c)
    if (std::abs(lookup(c, -g) - std::conj(v)) > tol) return false;
  return true;
}

}  // namespace

std::string flags_to_string(unsigned flags) {
  std::string s;
  auto add = [&](unsigned f, const char* name) {
    if (!(flags & f)) return;
    if (!s.empty()) s += ',';
    s += name;
  };
  add(kFlagR, "R");
  add(kFlagV, "V");
  add(kFlagF, "F");
  add(kFlagFV, "FV");
  add(kFlagReal, "real");
  return s;
}

unsigned flags_from_string(const std::string& s) {
  unsigned flags = 0;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    if (tok == "R") flags |= kFlagR;
    else if (tok == "V") flags |= kFlagV;
    else if (tok == "F") flags |= kFlagF;
    else if (tok == "FV") flags |= kFlagFV;
    else if (tok == "real") flags |= kFlagReal;
    else throw Error(ErrorCode::ParseError, "unknown potential flag '" + tok + "'");
  }
  return flags;
}

FourierPotential::FourierPotential(std::map<DualIndex, cplx> coefficients, unsigned flags, double tol)
    : coeffs_(std::move(coefficients)), flags_(flags) {
  const unsigned have = detect_flags(coeffs_, tol);
  const unsigned missing = flags & ~have;
  if (missing)
    throw Error(ErrorCode::SymmetryValidationError, "potential does not have declared symmetry " +
                                                        flags_to_string(missing));
}

cplx FourierPotential::operator()(const DualIndex& g) const { return lookup(coeffs_, g); }

unsigned FourierPotential::detect_flags(const std::map<DualIndex, cplx>& c, double tol) {
  unsigned f = 0;
  if (invariant_under(c, integer_dual(point_symmetry_matrix(PointSymmetry::R)), tol)) f |= kFlagR;
  if (invariant_under(c, -IMat::Identity(), tol)) f |= kFlagV;
  if (invariant_under(c, integer_dual(point_symmetry_matrix(PointSymmetry::F)), tol)) f |= kFlagF;
  if (invariant_under(c, integer_dual(point_symmetry_matrix(PointSymmetry::F_V)), tol)) f |= kFlagFV;
  if (is_real(c, tol)) f |= kFlagReal;
  return f;
}

FourierPotential FourierPotential::symmetrized(const std::map<DualIndex, cplx>& seed, unsigned flags) {
  const std::vector<IMat> G = group_from_flags(flags);
  std::set<DualIndex> support;
  for (const auto& [g, v] : seed)
    for (const IMat& S : G) {
      support.insert(act(S, g));
      support.insert(-act(S, g));
    }
  std::map<DualIndex, cplx> avg;
  for (const DualIndex& g : support) {
    cplx s = 0.0;
    for (const IMat& S : G) s += lookup(seed, act(S, g));
    avg[g] = s / static_cast<double>(G.size());
  }
  std::map<DualIndex, cplx> out;
  for (const auto& [g, v] : avg) {
    const cplx w = (flags & kFlagReal) ? 0.5 * (v + std::conj(lookup(avg, -g))) : v;
    if (std::abs(w) > 0.0) out[g] = w;
  }
  return FourierPotential(std::move(out), flags);
}

FourierPotential FourierPotential::from_rows(const std::vector<std::array<double, 4>>& rows, unsigned flags) {
  std::map<DualIndex, cplx> c;
  for (const auto& r : rows) {
    const DualIndex g{static_cast<int>(std::lround(r[0])), static_cast<int>(std::lround(r[1]))};
    if (c.count(g)) throw Error(ErrorCode::ParseError, "duplicate Fourier index");
    c[g] = cplx(r[2], r[3]);
  }
  return FourierPotential(std::move(c), flags);
}

std::vector<std::array<double, 4>> parse_potential_rows(const std::string& text) {
  std::vector<std::array<double, 4>> rows;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto p = line.find('#'); p != std::string::npos) line.erase(p);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    std::vector<double> v;
    std::string tok;
    while (ls >> tok) {
      try {
        std::size_t used = 0;
        v.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": bad number '" + tok + "'");
      }
    }
    if (v.empty()) continue;
    if (v.size() != 4)
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected g1 g2 re im");
    if (v[0] != std::round(v[0]) || v[1] != std::round(v[1]))
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": index must be an integer");
    rows.push_back({v[0], v[1], v[2], v[3]});
  }
  return rows;
}

FourierPotential shell_potential(double q0, double s1, double s2, double s3) {
  std::map<DualIndex, cplx> c;
  if (q0 != 0.0) c[{0, 0}] = q0;
  const std::array<std::pair<DualIndex, double>, 9> reps = {{{{1, 0}, s1},
                                                               {{0, 1}, s1},
                                                               {{1, 1}, s1},
                                                               {{1, -1}, s2},
                                                               {{2, 1}, s2},
                                                               {{1, 2}, s2},
                                                               {{2, 0}, s3},
                                                               {{0, 2}, s3},
                                                               {{2, 2}, s3}}};
  for (const auto& [g, v] : reps) {
    if (v == 0.0) continue;
    c[g] = v;
    c[-g] = v;
  }
  return FourierPotential(std::move(c), kFlagR | kFlagV | kFlagF | kFlagFV | kFlagReal);
}

double hex_index_norm(const RealVec2& m) {
  return std::max({std::abs(m(0)), std::abs(m(1)), std::abs(m(0) - m(1))});
}

PlanewaveOperator::PlanewaveOperator(FourierPotential q, double epsilon, int cutoff, const Quasimomentum& k_ref)
    : q_(std::move(q)), eps_(epsilon), cutoff_(cutoff), k_ref_(k_ref) {
  if (cutoff < 0) throw Error(ErrorCode::InvalidArgument, "cutoff must be non-negative");
  if (!is_real(q_.coefficients(), 1e-12)) throw Error(ErrorCode::InvalidArgument, "potential must be real");
  const RealVec2 shift = k_ref.vec() / kTwoPi;
  const int R = cutoff + 2;
  for (int g1 = -R; g1 <= R; ++g1)
    for (int g2 = -R; g2 <= R; ++g2)
      if (hex_index_norm(RealVec2(g1, g2) + shift) <= cutoff + 1e-9) {
        index_[{g1, g2}] = static_cast<int>(basis_.size());
        basis_.push_back({g1, g2});
      }
  const int n = dim();
  V_ = CMat::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) V_(a, b) = eps_ * q_(basis_[a] - basis_[b]);
}

int PlanewaveOperator::index_of(const DualIndex& g) const {
  auto it = index_.find(g);
  return it == index_.end() ? -1 : it->second;
}

CMat PlanewaveOperator::free_matrix(const Quasimomentum& k) const {
  const Mat2& B = hexagonal_basis().B;
  CMat D = CMat::Zero(dim(), dim());
  for (int a = 0; a < dim(); ++a) {
    const RealVec2 kap = B * (k.vec() + kTwoPi * RealVec2(basis_[a].n1, basis_[a].n2));
    D(a, a) = kap.squaredNorm();
  }
  return D;
}

CMat PlanewaveOperator::evaluate(const Quasimomentum& k) const { return free_matrix(k) + V_; }

CMat PlanewaveOperator::derivative(const Quasimomentum& k, int j) const {
  const Mat2& B = hexagonal_basis().B;
  const RealVec2 bj = B.col(j);
  CMat D = CMat::Zero(dim(), dim());
  for (int a = 0; a < dim(); ++a) {
    const RealVec2 kap = B * (k.vec() + kTwoPi * RealVec2(basis_[a].n1, basis_[a].n2));
    D(a, a) = 2.0 * bj.dot(kap);
  }
  return D;
}

BlochSymmetry PlanewaveOperator::symmetry_at(const std::vector<std::string>& kind, const Quasimomentum& k0) const {
  Mat2 M = Mat2::Identity();
  bool anti = false;
  std::string name;
  for (const std::string& f : kind) {
    Mat2 Mf;
    bool af = false;
    kind_factor(f, Mf, af);
    M = M * Mf;
    anti = anti != af;
    name += f;
  }
  const IMat S = integer_dual(M);
  const int sign = anti ? -1 : 1;
  const RealVec2 img = sign * (S.cast<double>() * k0.vec());
  const RealVec2 nd = (img - k0.vec()) / kTwoPi;
  const DualIndex n{static_cast<int>(std::lround(nd(0))), static_cast<int>(std::lround(nd(1)))};
  if (std::abs(nd(0) - n.n1) > 1e-9 || std::abs(nd(1) - n.n2) > 1e-9)
    throw Error(ErrorCode::NotAFixedPoint, "'" + name + "' does not fix the quasimomentum");
  BlochSymmetry b;
  b.name = name;
  b.antiunitary = anti;
  b.k_from = k0;
  b.k_to = reduce(Quasimomentum::from(img));
  b.matrix = CMat::Zero(dim(), dim());
  for (int a = 0; a < dim(); ++a) {
    const DualIndex g = act(S, basis_[a]);
    const int t = index_of(anti ? DualIndex{-g.n1 + n.n1, -g.n2 + n.n2} : g + n);
    if (t < 0) throw Error(ErrorCode::NotAFixedPoint, "plane-wave basis is not invariant under '" + name + "'");
    b.matrix(t, a) = 1.0;
  }
  b.unitarity_defect = (b.matrix * b.matrix.adjoint() - CMat::Identity(dim(), dim())).cwiseAbs().maxCoeff();
  b.residual = conjugation_residual(*this, b.matrix, anti, k0, k0);
  return b;
}

std::vector<FreeCluster> free_spectrum_at(const Quasimomentum& k0, int cutoff) {
  if (cutoff < 2) throw Error(ErrorCode::InvalidArgument, "cutoff must be at least 2");
  const PlanewaveOperator op(FourierPotential{}, 0.0, cutoff, k0);
  const CMat D = op.free_matrix(k0);
  std::vector<double> w(op.dim());
  for (int a = 0; a < op.dim(); ++a) w[a] = D(a, a).real();
  std::sort(w.begin(), w.end());
  std::vector<FreeCluster> out;
  for (double x : w) {
    if (!out.empty() && x - out.back().lambda <= 1e-9) {
      out.back().multiplicity++;
    } else {
      out.push_back({x, 1});
    }
  }
  return out;
}

double cell_area() { return std::abs(hexagonal_basis().A.determinant()); }

cplx separation_integral(const FourierPotential& q) { return cell_area() * q({1, 1}); }

cplx rotated_overlap(const FourierPotential& q, int cutoff) {
  const PlanewaveOperator op(q, 1.0, std::max(cutoff, 2), kstar());
  const CMat U = op.symmetry_at({"R"}, kstar()).matrix;
  CVec phi = CVec::Zero(op.dim());
  phi(op.index_of({0, 0})) = 1.0;
  const CVec Rphi = U * phi;
  return cell_area() * Rphi.dot(op.potential_matrix() * phi);
}

PureLaplacianAlpha alpha_pure_laplacian(int cutoff) {
  if (cutoff < 2) throw Error(ErrorCode::InvalidArgument, "cutoff must be at least 2");
  const Quasimomentum ks = kstar();
  const PlanewaveOperator op(FourierPotential{}, 0.0, cutoff, ks);
  PureLaplacianAlpha r;
  r.triple_multiplicity = free_spectrum_at(ks, cutoff).front().multiplicity;
  const CMat U = op.symmetry_at({"R"}, ks).matrix;
  const Eigen::Index n = op.dim();
  const CMat I = CMat::Identity(n, n);
  const CMat U2 = U * U;
  const cplx t = tau();
  CVec phi = CVec::Zero(n);
  phi(op.index_of({0, 0})) = 1.0;
  // P_j phi = (phi + tau^j R phi + conj(tau)^j R^2 phi) / 3
  r.psi1 = ((I + t * U + std::conj(t) * U2) * phi).normalized();
  r.psi2 = ((I + t * t * U + std::conj(t * t) * U2) * phi).normalized();
  const CMat D1 = op.derivative(ks, 0), D2 = op.derivative(ks, 1);
  const Mat2& A = hexagonal_basis().A;
  r.alpha_k = r.psi1.dot(D1 * r.psi2);
  r.alpha_kappa = r.psi1.dot((A(0, 0) * D1 + A(0, 1) * D2) * r.psi2);
  return r;
}

namespace {

EpsilonReport sweep_one(const FourierPotential& q, double e, int cutoff) {
  EpsilonReport r;
  r.epsilon = e;
  const Quasimomentum ks = kstar();
  const PlanewaveOperator op(q, e, cutoff, ks);
  const BlochSymmetry R = op.symmetry_at({"R"}, ks);
  const RotationDecomposition d = decompose_matrix(op.evaluate(ks), R.matrix, ks, LabelConvention::direct);
  const RVec w1 = d.block_spectrum(1);
  const RVec w0 = d.block_spectrum(0);
  r.lambda0 = w1(0);
  r.q1_gap = w1.size() > 1 ? w1(1) - w1(0) : std::numeric_limits<double>::infinity();
  r.q0_distance = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < w0.size(); ++i) r.q0_distance = std::min(r.q0_distance, std::abs(w0(i) - r.lambda0));
  r.cond_simple = r.q1_gap > 1e-8;
  r.cond_not_in_q0 = r.q0_distance > 1e-8;
  if (r.cond_simple && r.cond_not_in_q0) {
    const ConeReport c = classify(op, ks, R, r.lambda0);
    r.alpha = c.alpha;
    r.alpha_kappa = c.alpha_kappa;
    r.classification = c.classification;
    r.cond_alpha = c.classification == ConeClass::nondegenerate_conical;
  } else {
    r.alpha = r.alpha_kappa = cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
  }
  auto fail = [&](bool ok, const char* name) {
    if (ok) return;
    if (!r.failures.empty()) r.failures += ',';
    r.failures += name;
  };
  fail(r.cond_simple, "simple");
  fail(r.cond_not_in_q0, "not_in_q0");
  fail(r.cond_alpha, "alpha");
  return r;
}

void check_sweep_flags(const FourierPotential& q) {
  const unsigned f = q.flags();
  if (!(f & kFlagR) || !(f & (kFlagV | kFlagF)))
    throw Error(ErrorCode::InvalidArgument, "epsilon sweep needs a potential with R and V or F symmetry");
}

}  // namespace

std::vector<EpsilonReport> epsilon_sweep(const FourierPotential& q, const std::vector<double>& eps, int cutoff) {
  check_sweep_flags(q);
  std::vector<EpsilonReport> out(eps.size());
  std::exception_ptr err;
  const long n = static_cast<long>(eps.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    try {
      out[i] = sweep_one(q, eps[i], cutoff);
    } catch (...) {
#pragma omp critical(hexcone_sweep_error)
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  return out;
}

std::vector<EpsilonReport> epsilon_sweep_serial(const FourierPotential& q, const std::vector<double>& eps,
                                                int cutoff) {
  check_sweep_flags(q);
  std::vector<EpsilonReport> out;
  for (double e : eps) out.push_back(sweep_one(q, e, cutoff));
  return out;
}

SixfoldReport sixfold_splitting(const FourierPotential& q, double eps, int cutoff) {
  const unsigned need = kFlagR | kFlagV | kFlagF | kFlagReal;
  if ((q.flags() & need) != need)
    throw Error(ErrorCode::InvalidArgument, "six-fold splitting needs a potential with R, V, F and real flags");
  const Quasimomentum k0{0.0, 0.0};
  const PlanewaveOperator op(q, eps, std::max(cutoff, 2), k0);
  SixfoldReport r;
  r.lambda_free = std::pow(4.0 * kPi / std::sqrt(3.0), 2);
  const CMat F = op.free_matrix(k0);
  std::vector<int> shell;
  for (int a = 0; a < op.dim(); ++a)
    if (std::abs(F(a, a).real() - r.lambda_free) < 1e-9 * r.lambda_free) shell.push_back(a);
  if (shell.size() != 6) throw Error(ErrorCode::MultiplicityMismatch, "free cluster at k = 0 is not six-fold");
  CMat Phi = CMat::Zero(op.dim(), 6);
  for (int c = 0; c < 6; ++c) Phi(shell[c], c) = 1.0;

  const Eigensystem es = eigensystem(op.evaluate(k0));
  std::vector<std::pair<double, Eigen::Index>> weight;
  for (Eigen::Index i = 0; i < es.values.size(); ++i)
    weight.push_back({(Phi.adjoint() * es.vectors.col(i)).squaredNorm(), i});
  std::partial_sort(weight.begin(), weight.begin() + 6, weight.end(),
                    [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
  for (int i = 0; i < 6; ++i) r.eigenvalues.push_back(es.values(weight[i].second));
  std::sort(r.eigenvalues.begin(), r.eigenvalues.end());

  const CMat M = Phi.adjoint() * op.potential_matrix() * Phi;
  const RVec mu = eigensystem(0.5 * (M + M.adjoint())).values;
  for (int i = 0; i < 6; ++i) {
    r.first_order.push_back(r.lambda_free + mu(i));
    r.first_order_error = std::max(r.first_order_error, std::abs(r.first_order[i] - r.eigenvalues[i]));
  }
  const double scale = std::max(1.0, es.values.cwiseAbs().maxCoeff());
  const RVec w = Eigen::Map<const RVec>(r.eigenvalues.data(), 6);
  for (const Cluster& c : cluster_eigenvalues(w, 1e-8 * scale)) r.pattern.push_back(c.multiplicity);
  return r;
}

}  // namespace hexcone
