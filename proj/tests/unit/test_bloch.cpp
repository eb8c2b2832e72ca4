#include "hexcone/bloch.hpp"
#include "hexcone/generator.hpp"

#include <doctest.h>

#include <random>

using namespace hexcone;

namespace {

Model sixcell() { return build_preset("sixcell", {{"q1", std::sqrt(3.0)}, {"q2", 0.0}, {"r", std::sqrt(7.0)}}); }

std::vector<Quasimomentum> random_points(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  std::vector<Quasimomentum> p;
  for (int i = 0; i < n; ++i) p.push_back({u(rng), u(rng)});
  return p;
}

}  // namespace

TEST_SUITE("bloch") {

TEST_CASE("honeycomb bands match the closed form") {
  const BlochOperator H = assemble(build_preset("honeycomb", {{"q", 0.0}}).graph);
  for (const Quasimomentum& k : GridSpec::uniform_grid(4).points()) {
    const double f = std::abs(1.0 + std::polar(1.0, k.k1) + std::polar(1.0, k.k2));
    const RVec w = spectrum(H, k);
    CHECK(w(0) == doctest::Approx(-f).epsilon(1e-12));
    CHECK(w(1) == doctest::Approx(f).epsilon(1e-12));
  }
}

TEST_CASE("assembled operator is Hermitian and periodic") {
  const BlochOperator H = assemble(sixcell().graph);
  CHECK(H.hermiticity_defect() == 0.0);
  for (const Quasimomentum& k : random_points(10, 3)) {
    const CMat M = H.evaluate(k);
    CHECK((M - M.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((H.evaluate(k + Quasimomentum{kTwoPi, 0.0}) - M).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((H.evaluate(k + Quasimomentum{0.0, -kTwoPi}) - M).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("sixcell diagonal is the vertex potential") {
  const Model m = build_preset("sixcell", {{"q1", 0.75}, {"q2", -0.25}, {"r", 2.0}});
  const CMat H0 = assemble(m.graph).evaluate({0.3, -1.1});
  for (int v = 0; v < 6; ++v) CHECK(H0(v, v).real() == doctest::Approx(v % 2 == 0 ? 0.75 : -0.25));
  // hopping between ring neighbours is -1
  CHECK(H0(1, 0).real() == doctest::Approx(-1.0));
}

TEST_CASE("derivative matches finite differences") {
  const BlochOperator H = assemble(sixcell().graph);
  const double h = 1e-6;
  for (const Quasimomentum& k : random_points(5, 5))
    for (int j = 0; j < 2; ++j) {
      const Quasimomentum dk = j == 0 ? Quasimomentum{h, 0.0} : Quasimomentum{0.0, h};
      const CMat fd = (H.evaluate(k + dk) - H.evaluate(k - dk)) / (2 * h);
      CHECK((fd - H.derivative(k, j)).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("declared actions conjugate H(k) onto H(Sk)") {
  std::mt19937_64 rng(21);
  std::vector<Model> models = {sixcell(), build_preset("honeycomb", {{"q", 0.3}})};
  for (SymmetryGroup g : {SymmetryGroup::R_F, SymmetryGroup::R_V, SymmetryGroup::R_FV})
    models.push_back(random_symmetric_model(g, rng));
  for (const Model& m : models) {
    const BlochOperator H = assemble(m.graph);
    for (const SymmetryAction& s : m.actions)
      for (const Quasimomentum& k : random_points(6, 9)) {
        const BlochSymmetry b = symmetry_at_k(H, s, k);
        CHECK(b.residual < 1e-12);
        CHECK(b.unitarity_defect < 1e-14);
      }
  }
}

TEST_CASE("a foreign action fails certification") {
  const Model m = sixcell();
  Model other = build_preset("sixcell", {{"q1", 0.0}, {"q2", 0.0}, {"r", 1.0}});
  other.graph.edges[6].weight = 0.5;
  const BlochOperator H = assemble(other.graph);
  try {
    symmetry_at_k(H, m.require("R"), {0.3, 0.2});
    FAIL("expected ConjugationMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConjugationMismatch);
  }
}

TEST_CASE("dispersion symmetry") {
  const Model m = sixcell();
  const BlochOperator H = assemble(m.graph);
  const auto grid = GridSpec::uniform_grid(12).points();
  for (const SymmetryAction& s : m.actions) CHECK(dispersion_symmetry_check(H, s, grid).max_deviation < 1e-12);
}

TEST_CASE("parallel and serial sweeps agree bitwise") {
  const BlochOperator H = assemble(sixcell().graph);
  const BandStructure a = sweep(H, GridSpec::uniform_grid(16));
  const BandStructure b = sweep_serial(H, GridSpec::uniform_grid(16));
  CHECK((a.bands - b.bands).cwiseAbs().maxCoeff() == 0.0);
  const GridSpec path = GridSpec::polyline({{0.0, 0.0}, kstar(), -kstar()}, 10);
  CHECK(path.points().size() == 21);
}

TEST_CASE("eigenvalue clusters") {
  RVec w(5);
  w << -1.0, -1.0 + 1e-12, 0.5, 2.0, 2.0;
  const auto c = cluster_eigenvalues(w, 1e-9);
  REQUIRE(c.size() == 3);
  CHECK(c[0].multiplicity == 2);
  CHECK(c[1].first == 2);
  CHECK(c[2].multiplicity == 2);
  CHECK_THROWS_AS(GridSpec::uniform_grid(1), Error);
}

TEST_CASE("lipschitz bound dominates band slopes") {
  const BlochOperator H = assemble(sixcell().graph);
  const double L = H.lipschitz_bound();
  for (const Quasimomentum& k : random_points(5, 13)) {
    const Quasimomentum k2 = k + Quasimomentum{1e-3, -2e-3};
    const double d = (spectrum(H, k) - spectrum(H, k2)).cwiseAbs().maxCoeff();
    CHECK(d <= L * std::hypot(1e-3, 2e-3) + 1e-12);
  }
}

}
