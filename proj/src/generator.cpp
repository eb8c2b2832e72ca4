#include "hexcone/generator.hpp"

#include <cmath>
#include <map>
#include <set>
#include <tuple>

namespace hexcone {

namespace {

std::vector<Mat2> group_closure(const std::vector<Mat2>& gens) {
  std::vector<Mat2> out = {Mat2::Identity()};
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (const Mat2& g : gens) {
      const Mat2 p = g * out[i];
      bool known = false;
      for (const Mat2& q : out)
        if ((p - q).cwiseAbs().maxCoeff() < 1e-9) known = true;
      if (!known) out.push_back(p);
    }
  }
  return out;
}

RealVec2 wrap01(const RealVec2& x) {
  RealVec2 y = x - x.array().floor().matrix();
  for (int i = 0; i < 2; ++i)
    if (y(i) > 1.0 - 1e-12) y(i) = 0.0;
  return y;
}

}  // namespace

Model random_symmetric_model(SymmetryGroup group, std::mt19937_64& rng, const GeneratorOptions& opt) {
  const Mat2 MR = point_symmetry_matrix(PointSymmetry::R);
  Mat2 Mx;
  std::string xname;
  switch (group) {
    case SymmetryGroup::R_F:
      Mx = point_symmetry_matrix(PointSymmetry::F);
      xname = "F";
      break;
    case SymmetryGroup::R_V:
      Mx = point_symmetry_matrix(PointSymmetry::V);
      xname = "V";
      break;
    case SymmetryGroup::R_FV:
      Mx = point_symmetry_matrix(PointSymmetry::F_V);
      xname = "FV";
      break;
  }
  const std::vector<Mat2> G = group_closure({MR, Mx});

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Model m;
  PeriodicGraph& g = m.graph;
  std::vector<int> orbit_of;

  auto add_orbit = [&](const RealVec2& p) {
    const int orbit = orbit_of.empty() ? 0 : orbit_of.back() + 1;
    std::vector<RealVec2> pts;
    for (const Mat2& M : G) {
      const RealVec2 y = wrap01(lattice_form(M) * p);
      bool known = false;
      for (const RealVec2& z : pts) {
        const RealVec2 d = y - z;
        if ((d - d.array().round().matrix()).cwiseAbs().maxCoeff() < 1e-9) known = true;
      }
      if (!known) pts.push_back(y);
    }
    for (const RealVec2& y : pts) {
      g.vertices.push_back({g.size(), y, 0.0});
      orbit_of.push_back(orbit);
    }
  };

  if (opt.center_vertex) add_orbit(RealVec2::Zero());
  for (int i = 0; i < opt.generic_orbits; ++i) {
    // stay clear of mirror lines and special points so the orbit has 6 members
    for (;;) {
      const RealVec2 p(unit(rng), unit(rng));
      const std::size_t before = g.vertices.size();
      add_orbit(p);
      if (g.vertices.size() - before == G.size()) {
        bool far = true;
        for (std::size_t a = before; a < g.vertices.size() && far; ++a)
          for (std::size_t b = 0; b < a && far; ++b) {
            const RealVec2 d = g.vertices[a].xi - g.vertices[b].xi;
            if ((d - d.array().round().matrix()).norm() < 0.05) far = false;
          }
        if (far) break;
      }
      g.vertices.resize(before);
      orbit_of.resize(before);
    }
  }

  const int norbits = orbit_of.empty() ? 0 : orbit_of.back() + 1;
  std::vector<double> orbit_q(norbits);
  std::uniform_real_distribution<double> qd(-opt.potential_range, opt.potential_range);
  for (double& q : orbit_q) q = qd(rng);
  for (int v = 0; v < g.size(); ++v) g.vertices[v].potential = orbit_q[orbit_of[v]];

  std::vector<SymmetryAction> elems;
  for (const Mat2& M : G) elems.push_back(action_from_point_map(g, M, false, "g"));

  using Key = std::tuple<int, int, int, int>;
  auto canonical = [](int u, int v, Shift n) {
    return std::min(Key{u, v, n.n1, n.n2}, Key{v, u, -n.n1, -n.n2});
  };
  std::set<Key> used;
  std::uniform_int_distribution<int> vd(0, g.size() - 1);
  std::uniform_int_distribution<int> sd(-1, 1);
  std::uniform_real_distribution<double> wd(opt.weight_min, opt.weight_max);
  int made = 0, attempts = 0;
  while (made < opt.edge_seeds && attempts < 1000) {
    ++attempts;
    const int u = vd(rng), v = vd(rng);
    const Shift n{sd(rng), sd(rng)};
    if (u == v && n.is_zero()) continue;
    std::set<Key> orbit;
    for (const SymmetryAction& s : elems) {
      const Eigen::Matrix2i L = s.cell_map();
      const Shift Ln{L(0, 0) * n.n1 + L(0, 1) * n.n2, L(1, 0) * n.n1 + L(1, 1) * n.n2};
      orbit.insert(canonical(s.permutation[u], s.permutation[v], Ln + s.shifts[u] - s.shifts[v]));
    }
    bool clash = false;
    for (const Key& k : orbit)
      if (used.count(k)) clash = true;
    if (clash) continue;
    const double w = wd(rng);
    for (const Key& k : orbit) {
      used.insert(k);
      g.edges.push_back({std::get<0>(k), std::get<1>(k), {std::get<2>(k), std::get<3>(k)}, w});
    }
    ++made;
  }

  auto declare = [&](const Mat2& M, bool anti, const std::string& name, std::vector<std::string> kind) {
    SymmetryAction s = action_from_point_map(g, M, anti, name);
    s.kind = std::move(kind);
    const ValidationReport rep = validate_symmetry(g, s);
    if (!rep.passed()) throw ValidationFailure(rep);
    m.actions.push_back(std::move(s));
  };
  declare(MR, false, "R", {"R"});
  declare(Mx, false, xname, {xname});
  declare(Mat2::Identity(), true, "C", {"C"});
  if (group == SymmetryGroup::R_V) declare(Mx, true, "Vbar", {"C", "V"});
  if (group == SymmetryGroup::R_FV) declare(Mx, true, "FVbar", {"C", "FV"});
  return m;
}

}  // namespace hexcone
