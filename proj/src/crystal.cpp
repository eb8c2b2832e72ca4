#include "hexcone/crystal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

namespace hexcone {

namespace {

using EdgeKey = std::tuple<int, int, int, int>;

EdgeKey canonical(int u, int v, Shift n) {
  EdgeKey a{u, v, n.n1, n.n2};
  EdgeKey b{v, u, -n.n1, -n.n2};
  return std::min(a, b);
}

Shift apply_cell_map(const Eigen::Matrix2i& L, Shift n) {
  return {L(0, 0) * n.n1 + L(0, 1) * n.n2, L(1, 0) * n.n1 + L(1, 1) * n.n2};
}

bool is_permutation(const std::vector<int>& p) {
  std::vector<char> seen(p.size(), 0);
  for (int x : p) {
    if (x < 0 || x >= static_cast<int>(p.size()) || seen[x]) return false;
    seen[x] = 1;
  }
  return true;
}

double param(const PresetParams& p, const std::string& key) {
  auto it = p.find(key);
  if (it == p.end()) throw Error(ErrorCode::InvalidArgument, "preset parameter '" + key + "' missing");
  return it->second;
}

void add_action(Model& m, const Mat2& M, bool anti, const std::string& name, std::vector<std::string> kind) {
  SymmetryAction s = action_from_point_map(m.graph, M, anti, name);
  s.kind = std::move(kind);
  const ValidationReport rep = validate_symmetry(m.graph, s);
  if (!rep.passed()) throw ValidationFailure(rep);
  m.actions.push_back(std::move(s));
}

}  // namespace

double PeriodicGraph::weighted_degree(int v) const {
  double d = 0.0;
  for (const Edge& e : edges) {
    if (e.u == v) d += e.weight;
    if (e.v == v) d += e.weight;
  }
  return d;
}

bool PeriodicGraph::connected() const {
  const int n = size();
  if (n == 0) return true;
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const Edge& e : edges) parent[find(e.u)] = find(e.v);
  const int root = find(0);
  for (int v = 1; v < n; ++v)
    if (find(v) != root) return false;
  return true;
}

Eigen::Matrix2i SymmetryAction::cell_map() const {
  return lattice_form(point_matrix).array().round().cast<int>().matrix();
}

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const ValidationCheck& c) { return c.passed; });
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  os << "action '" << action << "': " << (passed() ? "valid" : "invalid");
  for (const ValidationCheck& c : checks) {
    os << "; " << c.name << (c.passed ? " ok" : " FAILED") << " (residual " << c.residual << ")";
    if (!c.detail.empty()) os << " " << c.detail;
  }
  return os.str();
}

const SymmetryAction* Model::find(std::string_view name) const {
  for (const SymmetryAction& s : actions)
    if (s.name == name) return &s;
  return nullptr;
}

const SymmetryAction& Model::require(std::string_view name) const {
  const SymmetryAction* s = find(name);
  if (!s) throw Error(ErrorCode::InvalidArgument, "model declares no action named '" + std::string(name) + "'");
  return *s;
}

ValidationReport validate_symmetry(const PeriodicGraph& g, const SymmetryAction& s, double tol) {
  const int n = g.size();
  if (s.size() != n || static_cast<int>(s.shifts.size()) != n)
    throw Error(ErrorCode::MalformedAction, "action '" + s.name + "' has wrong permutation/shift length");
  if (!is_permutation(s.permutation))
    throw Error(ErrorCode::MalformedAction, "action '" + s.name + "' permutation is not a bijection");

  ValidationReport rep;
  rep.action = s.name;

  {
    ValidationCheck c{"lattice", true, 0.0, ""};
    const Mat2 L = lattice_form(s.point_matrix);
    c.residual = (L - L.array().round().matrix()).cwiseAbs().maxCoeff();
    c.passed = preserves_lattice(s.point_matrix, tol);
    rep.checks.push_back(c);
    if (!c.passed) return rep;
  }

  const Mat2 L = lattice_form(s.point_matrix);
  const Eigen::Matrix2i Li = s.cell_map();

  {
    ValidationCheck c{"geometry", true, 0.0, ""};
    for (int v = 0; v < n; ++v) {
      const int p = s.permutation[v];
      const RealVec2 d = L * g.vertices[v].xi - g.vertices[p].xi -
                         RealVec2(s.shifts[v].n1, s.shifts[v].n2);
      const double r = d.cwiseAbs().maxCoeff();
      if (r > c.residual) c.residual = r;
      if (r > tol && c.detail.empty()) c.detail = "vertex " + std::to_string(v);
    }
    c.passed = c.residual <= tol;
    rep.checks.push_back(c);
  }

  {
    ValidationCheck c{"edges", true, 0.0, ""};
    std::map<EdgeKey, double> weights;
    for (const Edge& e : g.edges) weights[canonical(e.u, e.v, e.shift)] = e.weight;
    std::set<EdgeKey> images;
    for (const Edge& e : g.edges) {
      // v at cell 0 -> (perm v, shift v); u at cell n -> (perm u, L n + shift u)
      const int u2 = s.permutation[e.u];
      const int v2 = s.permutation[e.v];
      const Shift n2 = apply_cell_map(Li, e.shift) + s.shifts[e.u] - s.shifts[e.v];
      const EdgeKey key = canonical(u2, v2, n2);
      images.insert(key);
      auto it = weights.find(key);
      double r = 0.0;
      if (it == weights.end()) {
        r = e.weight;
        if (c.detail.empty()) c.detail = "image of edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ") missing";
      } else {
        r = std::abs(it->second - e.weight);
        if (r > tol && c.detail.empty()) c.detail = "weight mismatch on edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ")";
      }
      c.residual = std::max(c.residual, r);
    }
    c.passed = c.residual <= tol && images.size() == weights.size();
    rep.checks.push_back(c);
  }

  {
    ValidationCheck c{"potential", true, 0.0, ""};
    for (int v = 0; v < n; ++v) {
      const double r = std::abs(g.vertices[s.permutation[v]].potential - g.vertices[v].potential);
      if (r > c.residual) c.residual = r;
      if (r > tol && c.detail.empty()) c.detail = "vertex " + std::to_string(v);
    }
    c.passed = c.residual <= tol;
    rep.checks.push_back(c);
  }
  return rep;
}

void kind_factor(const std::string& f, Mat2& M, bool& anti) {
  anti = false;
  if (f == "R") M = point_symmetry_matrix(PointSymmetry::R);
  else if (f == "V") M = point_symmetry_matrix(PointSymmetry::V);
  else if (f == "F") M = point_symmetry_matrix(PointSymmetry::F);
  else if (f == "FV") M = point_symmetry_matrix(PointSymmetry::F_V);
  else if (f == "C") {
    M = Mat2::Identity();
    anti = true;
  } else {
    throw Error(ErrorCode::ParseError, "unknown symmetry kind '" + f + "'");
  }
}

SymmetryAction identity_action(int n) {
  SymmetryAction s;
  s.name = "identity";
  s.permutation.resize(n);
  std::iota(s.permutation.begin(), s.permutation.end(), 0);
  s.shifts.assign(n, Shift{});
  return s;
}

SymmetryAction conjugation_action(int n) {
  SymmetryAction s = identity_action(n);
  s.name = "C";
  s.antiunitary = true;
  s.kind = {"C"};
  return s;
}

SymmetryAction compose_actions(const SymmetryAction& s1, const SymmetryAction& s2) {
  const int n = s2.size();
  if (s1.size() != n) throw Error(ErrorCode::MalformedAction, "composing actions of different sizes");
  SymmetryAction out;
  out.name = s1.name + "*" + s2.name;
  out.point_matrix = s1.point_matrix * s2.point_matrix;
  out.antiunitary = s1.antiunitary != s2.antiunitary;
  out.kind = s1.kind;
  out.kind.insert(out.kind.end(), s2.kind.begin(), s2.kind.end());
  out.permutation.resize(n);
  out.shifts.resize(n);
  const Eigen::Matrix2i L1 = s1.cell_map();
  for (int v = 0; v < n; ++v) {
    const int w = s2.permutation[v];
    out.permutation[v] = s1.permutation[w];
    out.shifts[v] = apply_cell_map(L1, s2.shifts[v]) + s1.shifts[w];
  }
  return out;
}

SymmetryAction inverse_action(const SymmetryAction& s) {
  const int n = s.size();
  SymmetryAction out;
  out.name = s.name + "^-1";
  out.point_matrix = s.point_matrix.inverse();
  out.antiunitary = s.antiunitary;
  for (auto it = s.kind.rbegin(); it != s.kind.rend(); ++it) {
    out.kind.push_back(*it);
    if (*it == "R") out.kind.push_back("R");
  }
  out.permutation.resize(n);
  out.shifts.resize(n);
  const Eigen::Matrix2i Linv = out.cell_map();
  for (int v = 0; v < n; ++v) {
    const int w = s.permutation[v];
    out.permutation[w] = v;
    out.shifts[w] = -apply_cell_map(Linv, s.shifts[v]);
  }
  return out;
}

SymmetryAction action_from_point_map(const PeriodicGraph& g, const Mat2& M, bool anti, std::string name, double tol) {
  if (!preserves_lattice(M, tol))
    throw Error(ErrorCode::MalformedAction, "point map of '" + name + "' does not preserve the lattice");
  const Mat2 L = lattice_form(M);
  const int n = g.size();
  SymmetryAction s;
  s.name = std::move(name);
  s.point_matrix = M;
  s.antiunitary = anti;
  s.permutation.assign(n, -1);
  s.shifts.resize(n);
  for (int v = 0; v < n; ++v) {
    const RealVec2 y = L * g.vertices[v].xi;
    for (int u = 0; u < n; ++u) {
      const RealVec2 d = y - g.vertices[u].xi;
      const RealVec2 r = d.array().round().matrix();
      if ((d - r).cwiseAbs().maxCoeff() < tol) {
        s.permutation[v] = u;
        s.shifts[v] = {static_cast<int>(r(0)), static_cast<int>(r(1))};
        break;
      }
    }
    if (s.permutation[v] < 0)
      throw Error(ErrorCode::MalformedAction,
                  "point map of '" + s.name + "' sends vertex " + std::to_string(v) + " off the vertex set");
  }
  if (!is_permutation(s.permutation))
    throw Error(ErrorCode::MalformedAction, "point map of '" + s.name + "' is not injective on vertices");
  return s;
}

std::optional<int> rotation_center_vertex(const SymmetryAction& s_R) {
  for (int v = 0; v < s_R.size(); ++v)
    if (s_R.permutation[v] == v && s_R.shifts[v].is_zero()) return v;
  return std::nullopt;
}

PeriodicGraph edge_perturbation(const PeriodicGraph& g, const std::vector<Edge>& edges) {
  PeriodicGraph w = g;
  for (Vertex& v : w.vertices) v.potential = 0.0;
  w.edges = edges;
  return w;
}

bool same_structure(const PeriodicGraph& a, const PeriodicGraph& b, double tol) {
  if (a.size() != b.size() || a.edges.size() != b.edges.size()) return false;
  for (int v = 0; v < a.size(); ++v) {
    const Vertex &x = a.vertices[v], &y = b.vertices[v];
    if (x.id != y.id || (x.xi - y.xi).cwiseAbs().maxCoeff() > tol || std::abs(x.potential - y.potential) > tol)
      return false;
  }
  std::map<EdgeKey, double> wa;
  for (const Edge& e : a.edges) wa[canonical(e.u, e.v, e.shift)] = e.weight;
  for (const Edge& e : b.edges) {
    auto it = wa.find(canonical(e.u, e.v, e.shift));
    if (it == wa.end() || std::abs(it->second - e.weight) > tol) return false;
  }
  return true;
}

Model build_preset(const std::string& name, const PresetParams& params) {
  Model m;
  PeriodicGraph& g = m.graph;
  if (name == "honeycomb_2atom" || name == "honeycomb") {
    const double q = param(params, "q");
    // hexagon centre at the origin, atoms at the two triangle centres
    g.vertices = {{0, {2.0 / 3.0, 2.0 / 3.0}, 0.0}, {1, {1.0 / 3.0, 1.0 / 3.0}, 0.0}};
    g.edges = {{1, 0, {0, 0}, 1.0}, {1, 0, {1, 0}, 1.0}, {1, 0, {0, 1}, 1.0}};
    // stored potential absorbs the degree term so that the diagonal of H equals q
    for (Vertex& v : g.vertices) v.potential = q - g.weighted_degree(v.id);
    add_action(m, point_symmetry_matrix(PointSymmetry::R), false, "R", {"R"});
    add_action(m, point_symmetry_matrix(PointSymmetry::F), false, "F", {"F"});
    add_action(m, point_symmetry_matrix(PointSymmetry::V), false, "V", {"V"});
    add_action(m, Mat2::Identity(), true, "C", {"C"});
    add_action(m, point_symmetry_matrix(PointSymmetry::V), true, "Vbar", {"C", "V"});
    return m;
  }
  if (name == "sixcell") {
    const double q1 = param(params, "q1");
    const double q2 = param(params, "q2");
    const double r = param(params, "r");
    const double rho = params.count("rho") ? params.at("rho") : 0.4;
    if (!(rho > 0.0 && rho < 0.5)) throw Error(ErrorCode::InvalidArgument, "sixcell rho must lie in (0, 0.5)");
    if (!(r > 0.0)) throw Error(ErrorCode::InvalidArgument, "sixcell r must be positive");
    // hexagon of radius rho about the origin, vertices at -90, -30, 30, 90, 150, 210 degrees
    const std::vector<RealVec2> xi = {{-rho, rho}, {0.0, rho}, {rho, 0.0}, {rho, -rho}, {0.0, -rho}, {-rho, 0.0}};
    for (int v = 0; v < 6; ++v) g.vertices.push_back({v, xi[v], (v % 2 == 0) ? q1 : q2});
    for (int v = 0; v < 6; ++v) g.edges.push_back({(v + 1) % 6, v, {0, 0}, 1.0});
    g.edges.push_back({4, 1, {0, 1}, r});
    g.edges.push_back({5, 2, {1, 0}, r});
    g.edges.push_back({3, 0, {-1, 1}, r});
    for (Vertex& v : g.vertices) v.potential -= g.weighted_degree(v.id);
    add_action(m, point_symmetry_matrix(PointSymmetry::R), false, "R", {"R"});
    add_action(m, point_symmetry_matrix(PointSymmetry::F), false, "F", {"F"});
    add_action(m, Mat2::Identity(), true, "C", {"C"});
    if (std::abs(q1 - q2) < 1e-12) {
      add_action(m, point_symmetry_matrix(PointSymmetry::V), false, "V", {"V"});
      add_action(m, point_symmetry_matrix(PointSymmetry::V), true, "Vbar", {"C", "V"});
    }
    return m;
  }
  throw Error(ErrorCode::UnknownPreset, "unknown preset '" + name + "'");
}

}  // namespace hexcone
