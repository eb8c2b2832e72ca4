#include "hexcone/berry.hpp"

#include <doctest.h>

#include <random>

using namespace hexcone;

namespace {

Model sixcell(double q1 = std::sqrt(3.0), double q2 = 0.0, double r = std::sqrt(7.0)) {
  return build_preset("sixcell", {{"q1", q1}, {"q2", q2}, {"r", r}});
}

double phase_distance(double a, double b) { return std::abs(wrap_phase(a - b)); }

}  // namespace

TEST_SUITE("berry") {

TEST_CASE("sixcell valleys carry phase pi") {
  const BlochOperator H = assemble(sixcell().graph);
  for (const Quasimomentum& k0 : {kstar(), -kstar()}) {
    const BerryResult r = berry_phase(H, circle_contour(k0, 0.3, 64, 0));
    CHECK(r.quantized == Quantization::pi);
    CHECK(phase_distance(r.phase, kPi) < 0.02);
    CHECK(r.min_overlap > 0.5);
  }
}

TEST_CASE("contractible loop away from degeneracies") {
  const BlochOperator H = assemble(sixcell().graph);
  const BerryResult r = berry_phase(H, circle_contour({1.0, 1.0}, 0.25, 64, 0));
  CHECK(r.quantized == Quantization::zero);
  CHECK(std::abs(r.phase) < 0.02);
}

TEST_CASE("refinement and orientation") {
  const BlochOperator H = assemble(sixcell().graph);
  const Contour c = circle_contour({0.5, -1.2}, 0.25, 64, 1);
  const BerryResult a = berry_phase(H, c);
  const BerryResult b = berry_phase(H, circle_contour({0.5, -1.2}, 0.25, 128, 1));
  CHECK(phase_distance(a.phase, b.phase) < 1e-3);
  const BerryResult rev = berry_phase(H, reversed(c));
  CHECK(phase_distance(rev.phase, -a.phase) < 1e-12);
}

TEST_CASE("overlap product is gauge invariant") {
  const BlochOperator H = assemble(sixcell().graph);
  const Contour c = circle_contour(kstar(), 0.25, 64, 0);
  std::vector<CVec> psi = contour_eigenvectors(H, c);
  const BerryResult a = berry_phase_from_vectors(psi);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  for (CVec& v : psi) v *= std::polar(1.0, u(rng));
  const BerryResult b = berry_phase_from_vectors(psi);
  CHECK(phase_distance(a.phase, b.phase) < 1e-12);
  CHECK(contour_eigenvectors_serial(H, c).size() == psi.size());
  CHECK(berry_phase_serial(H, c).phase == a.phase);
}

TEST_CASE("valleys of the honeycomb cancel") {
  const Model m = build_preset("honeycomb", {{"q", 0.0}});
  const BlochOperator H = assemble(m.graph);
  const double p1 = berry_phase(H, circle_contour(kstar(), 0.25, 64, 0)).phase;
  const double p2 = berry_phase(H, circle_contour(-kstar(), 0.25, 64, 0)).phase;
  CHECK(phase_distance(p1 + p2, 0.0) < 0.05);
  CHECK(phase_distance(p1, kPi) < 0.02);
}

TEST_CASE("Vbar gauge fixing") {
  const Model m = build_preset("honeycomb", {{"q", 0.0}});
  const BlochOperator H = assemble(m.graph);
  const Quasimomentum k{0.4, -1.3};
  const CMat U = symmetry_at_k(H, m.require("Vbar"), k).matrix;
  const CVec psi = eigensystem(H.evaluate(k)).vectors.col(0);
  const CVec f = vbar_gauge_fix(psi, U);
  CHECK((U * f.conjugate() - f).norm() < 1e-9);
  const CVec g = vbar_gauge_fix(f, U);
  CHECK(std::min((g - f).norm(), (g + f).norm()) < 1e-12);
  CVec bad = CVec::Zero(2);
  bad << 1.0, cplx(0.0, 2.0);
  bad.normalize();
  CMat swapU = CMat::Zero(2, 2);
  swapU(0, 1) = swapU(1, 0) = 1.0;
  try {
    vbar_gauge_fix(bad, swapU);
    FAIL("expected NotEigenvectorOfInvolution");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotEigenvectorOfInvolution);
  }
}

TEST_CASE("Vbar-fixed phase and holonomy") {
  const Model m = build_preset("honeycomb", {{"q", 0.0}});
  const BlochOperator H = assemble(m.graph);
  const SymmetryAction& vb = m.require("Vbar");
  const BerryResult r = berry_phase_vbar(H, circle_contour(kstar(), 0.25, 64, 0), vb);
  CHECK(r.gauge == Gauge::vbar_fixed);
  CHECK(r.quantized == Quantization::pi);
  CHECK(vbar_holonomy(H, circle_contour(kstar(), 0.25, 64, 0), vb) == -1.0);
  CHECK(vbar_holonomy(H, circle_contour({1.0, 1.0}, 0.25, 64, 0), vb) == 1.0);
  // with Vbar on every contour point the phase is always quantized
  const BerryResult z = berry_phase(H, circle_contour({0.3, 2.0}, 0.5, 64, 0));
  CHECK(z.quantized != Quantization::unquantized);
}

TEST_CASE("contour through a degeneracy") {
  const BlochOperator H = assemble(sixcell().graph);
  Contour c = circle_contour(kstar(), 0.25, 64, 0);
  c.points[5] = kstar();
  try {
    berry_phase(H, c);
    FAIL("expected DegenerateOnContour");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateOnContour);
  }
}

TEST_CASE("coarse contour is rejected") {
  std::vector<CVec> psi(8, CVec::Zero(2));
  for (int i = 0; i < 8; ++i) psi[i](i % 2) = 1.0;
  try {
    berry_phase_from_vectors(psi);
    FAIL("expected LowOverlap");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LowOverlap);
  }
  CHECK_THROWS_AS(circle_contour(kstar(), 0.1, 4), Error);
}

TEST_CASE("conic fit recovers the cone") {
  const BlochOperator H = assemble(build_preset("honeycomb", {{"q", 0.0}}).graph);
  const ConicFit f = conic_fit(H, kstar(), 0);
  CHECK(f.positive_definite);
  CHECK(f.gap0 < 1e-6);
  CHECK(std::abs(f.lambda0) < 1e-9);
  const ConicFit g = conic_fit(H, {0.5, 0.5}, 0);
  CHECK(g.gap0 > 0.1);
}

TEST_CASE("persistence under an F-symmetric perturbation") {
  const Model m = sixcell();
  const BlochOperator H = assemble(m.graph);
  const BlochOperator W = assemble(edge_perturbation(m.graph, {{3, 0, {-1, 1}, 1.0}}));
  const PersistenceTrace t =
      persistence_scan(H, W, {0.0, 0.1, 0.2}, kstar(), 0, KeptSymmetry::F, &m.require("F"), m.require("R"));
  REQUIRE(t.epsilons.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(t.found[i]);
    CHECK(t.certified[i]);
    CHECK(t.on_line_residuals[i] < 1e-6);
    CHECK(phase_distance(t.phases[i], kPi) < 0.05);
  }
  CHECK(distance_mod_2pi(t.locations[2], kstar()) > 1e-4);
}

TEST_CASE("perturbation must break R and keep the declared symmetry") {
  const Model m = sixcell();
  const BlochOperator H = assemble(m.graph);
  CHECK_THROWS_AS(persistence_scan(H, H, {0.1}, kstar(), 0, KeptSymmetry::F, &m.require("F"), m.require("R")), Error);
  const BlochOperator W = assemble(edge_perturbation(m.graph, {{1, 0, {0, 0}, 1.0}}));
  try {
    persistence_scan(H, W, {0.1}, kstar(), 0, KeptSymmetry::F, &m.require("F"), m.require("R"));
    FAIL("expected SymmetryValidationError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SymmetryValidationError);
  }
}

TEST_CASE("parity crossing on the reflection line") {
  const Model m = sixcell();
  const BlochOperator H = assemble(m.graph);
  const CrossingReport r = parity_crossing(H, m.require("F"), 128, 0.0, kPi, 0, 0);
  CHECK(r.max_parity_residual < 1e-9);
  REQUIRE(r.crossings.size() == 1);
  CHECK(r.crossings[0].t == doctest::Approx(kTwoPi / 3.0).epsilon(1e-10));
  CHECK(std::abs(r.crossings[0].slope_difference) > 1e-3);
  // away from the crossing the lowest even and odd levels stay apart
  for (Eigen::Index i = 0; i < r.even.rows(); ++i) {
    if (std::abs(r.ts[i] - kTwoPi / 3.0) < 0.05) continue;
    CHECK(std::abs(r.even(i, 0) - r.odd(i, 0)) > 1e-6);
  }
  const BlochOperator W = assemble(edge_perturbation(m.graph, {{3, 0, {-1, 1}, 1.0}}));
  const CrossingReport p = parity_crossing(H + W.scaled(0.2), m.require("F"), 128, 0.0, kPi, 0, 0);
  REQUIRE(p.crossings.size() == 1);
  CHECK(std::abs(p.crossings[0].t - kTwoPi / 3.0) > 1e-4);
}

}
