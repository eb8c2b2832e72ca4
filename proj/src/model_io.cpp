#include "hexcone/crystal.hpp"
#include "hexcone/report.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <set>

namespace hexcone {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& locus, const std::string& msg) {
  throw Error(ErrorCode::ParseError, locus + ": " + msg);
}

void only_fields(const json& j, const std::string& locus, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(locus, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return it.key() == a; });
    if (!ok) fail(locus + "." + it.key(), "unknown field");
  }
}

const json& field(const json& j, const std::string& locus, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) fail(locus + "." + key, "missing field");
  return *it;
}

double number(const json& j, const std::string& locus, const char* key) {
  const json& v = field(j, locus, key);
  if (!v.is_number()) fail(locus + "." + key, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(locus + "." + key, "not finite");
  return x;
}

int integer(const json& j, const std::string& locus, const char* key) {
  const json& v = field(j, locus, key);
  if (!v.is_number_integer()) fail(locus + "." + key, "expected an integer");
  return v.get<int>();
}

std::string where(const std::string& text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + " column " + std::to_string(col);
}

}  // namespace

Model load_model(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, where(text, e.byte) + ": " + e.what());
  }
  only_fields(doc, "model", {"basis", "vertices", "edges", "symmetries"});

  Model m;
  PeriodicGraph& g = m.graph;

  if (doc.contains("basis")) {
    const json& b = doc["basis"];
    only_fields(b, "basis", {"a1", "a2"});
    const LatticeBasis& hex = hexagonal_basis();
    const RealVec2* ref[2] = {&hex.a1, &hex.a2};
    const char* names[2] = {"a1", "a2"};
    for (int i = 0; i < 2; ++i) {
      const json& a = field(b, "basis", names[i]);
      if (!a.is_array() || a.size() != 2 || !a[0].is_number() || !a[1].is_number())
        fail(std::string("basis.") + names[i], "expected two numbers");
      const RealVec2 v(a[0].get<double>(), a[1].get<double>());
      if ((v - *ref[i]).norm() > 1e-9) fail(std::string("basis.") + names[i], "only the hexagonal basis is supported");
    }
  }

  const json& verts = field(doc, "model", "vertices");
  if (!verts.is_array()) fail("vertices", "expected a list");
  std::vector<Vertex> vs;
  for (std::size_t i = 0; i < verts.size(); ++i) {
    const std::string loc = "vertices[" + std::to_string(i) + "]";
    only_fields(verts[i], loc, {"id", "xi1", "xi2", "q"});
    Vertex v;
    v.id = integer(verts[i], loc, "id");
    v.xi = {number(verts[i], loc, "xi1"), number(verts[i], loc, "xi2")};
    v.potential = number(verts[i], loc, "q");
    vs.push_back(v);
  }
  std::sort(vs.begin(), vs.end(), [](const Vertex& a, const Vertex& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < vs.size(); ++i)
    if (vs[i].id != static_cast<int>(i)) fail("vertices", "ids must be dense 0..n-1");
  for (std::size_t i = 0; i < vs.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) {
      const RealVec2 d = vs[i].xi - vs[j].xi;
      if ((d - d.array().round().matrix()).cwiseAbs().maxCoeff() < 1e-9)
        fail("vertices[" + std::to_string(i) + "]", "position coincides with another vertex modulo the lattice");
    }
  g.vertices = vs;
  const int n = g.size();

  if (doc.contains("edges")) {
    const json& edges = doc["edges"];
    if (!edges.is_array()) fail("edges", "expected a list");
    std::set<std::tuple<int, int, int, int>> seen;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const std::string loc = "edges[" + std::to_string(i) + "]";
      only_fields(edges[i], loc, {"u", "v", "n1", "n2", "m"});
      Edge e;
      e.u = integer(edges[i], loc, "u");
      e.v = integer(edges[i], loc, "v");
      e.shift = {integer(edges[i], loc, "n1"), integer(edges[i], loc, "n2")};
      e.weight = number(edges[i], loc, "m");
      if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n) fail(loc, "vertex id out of range");
      if (!(e.weight > 0.0)) fail(loc + ".m", "weight must be positive");
      if (e.u == e.v && e.shift.is_zero()) fail(loc, "self-loop without lattice shift");
      std::tuple<int, int, int, int> a{e.u, e.v, e.shift.n1, e.shift.n2};
      std::tuple<int, int, int, int> b{e.v, e.u, -e.shift.n1, -e.shift.n2};
      if (!seen.insert(std::min(a, b)).second) fail(loc, "duplicate edge");
      g.edges.push_back(e);
    }
  }

  if (doc.contains("symmetries")) {
    const json& syms = doc["symmetries"];
    if (!syms.is_array()) fail("symmetries", "expected a list");
    for (std::size_t i = 0; i < syms.size(); ++i) {
      const std::string loc = "symmetries[" + std::to_string(i) + "]";
      const json& sj = syms[i];
      only_fields(sj, loc, {"name", "kind", "permutation", "shifts"});
      SymmetryAction s;
      const json& name = field(sj, loc, "name");
      if (!name.is_string()) fail(loc + ".name", "expected a string");
      s.name = name.get<std::string>();
      const json& kind = field(sj, loc, "kind");
      if (kind.is_string()) {
        s.kind = {kind.get<std::string>()};
      } else if (kind.is_array()) {
        for (const json& f : kind) {
          if (!f.is_string()) fail(loc + ".kind", "expected strings");
          s.kind.push_back(f.get<std::string>());
        }
      } else {
        fail(loc + ".kind", "expected a string or a list of strings");
      }
      s.point_matrix = Mat2::Identity();
      s.antiunitary = false;
      for (const std::string& f : s.kind) {
        Mat2 M;
        bool anti = false;
        try {
          kind_factor(f, M, anti);
        } catch (const Error& e) {
          fail(loc + ".kind", e.what());
        }
        s.point_matrix = s.point_matrix * M;
        s.antiunitary = s.antiunitary != anti;
      }
      const json& perm = field(sj, loc, "permutation");
      if (!perm.is_array()) fail(loc + ".permutation", "expected a list");
      for (const json& p : perm) {
        if (!p.is_number_integer()) fail(loc + ".permutation", "expected integers");
        s.permutation.push_back(p.get<int>());
      }
      const json& shifts = field(sj, loc, "shifts");
      if (!shifts.is_array()) fail(loc + ".shifts", "expected a list");
      for (const json& sh : shifts) {
        if (!sh.is_array() || sh.size() != 2 || !sh[0].is_number_integer() || !sh[1].is_number_integer())
          fail(loc + ".shifts", "expected [n1, n2] integer pairs");
        s.shifts.push_back({sh[0].get<int>(), sh[1].get<int>()});
      }
      if (s.size() != n || static_cast<int>(s.shifts.size()) != n)
        fail(loc, "permutation and shifts must list every vertex");
      const ValidationReport rep = validate_symmetry(g, s);
      if (!rep.passed()) throw ValidationFailure(rep);
      m.actions.push_back(std::move(s));
    }
  }
  return m;
}

std::string save_model(const Model& m) {
  using ojson = nlohmann::ordered_json;
  ojson doc;
  const LatticeBasis& b = m.graph.basis;
  doc["basis"] = {{"a1", {b.a1(0), b.a1(1)}}, {"a2", {b.a2(0), b.a2(1)}}};
  doc["vertices"] = ojson::array();
  for (const Vertex& v : m.graph.vertices)
    doc["vertices"].push_back({{"id", v.id}, {"xi1", v.xi(0)}, {"xi2", v.xi(1)}, {"q", v.potential}});
  doc["edges"] = ojson::array();
  for (const Edge& e : m.graph.edges)
    doc["edges"].push_back({{"u", e.u}, {"v", e.v}, {"n1", e.shift.n1}, {"n2", e.shift.n2}, {"m", e.weight}});
  doc["symmetries"] = ojson::array();
  for (const SymmetryAction& s : m.actions) {
    ojson sj;
    sj["name"] = s.name;
    sj["kind"] = s.kind;
    sj["permutation"] = s.permutation;
    ojson sh = ojson::array();
    for (const Shift& x : s.shifts) sh.push_back({x.n1, x.n2});
    sj["shifts"] = sh;
    doc["symmetries"].push_back(sj);
  }
  return dump_json(doc) + "\n";
}

}  // namespace hexcone
