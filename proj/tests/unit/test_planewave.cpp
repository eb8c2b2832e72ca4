#include "hexcone/planewave.hpp"

#include <doctest.h>

using namespace hexcone;

namespace {

FourierPotential generic() { return shell_potential(0.3, 1.0, 0.7, -0.45); }

}  // namespace

TEST_SUITE("planewave") {

TEST_CASE("free spectrum at kstar") {
  const auto c = free_spectrum_at(kstar(), 6);
  CHECK(c[0].multiplicity == 3);
  CHECK(c[0].lambda == doctest::Approx(std::pow(4.0 * kPi / 3.0, 2)).epsilon(1e-14));
}

TEST_CASE("free spectrum at zero") {
  const auto c = free_spectrum_at({0.0, 0.0}, 6);
  CHECK(c[0].multiplicity == 1);
  CHECK(std::abs(c[0].lambda) < 1e-15);
  CHECK(c[1].multiplicity == 6);
  CHECK(c[1].lambda == doctest::Approx(std::pow(4.0 * kPi / std::sqrt(3.0), 2)).epsilon(1e-14));
  CHECK_THROWS_AS(free_spectrum_at({0.0, 0.0}, 1), Error);
}

TEST_CASE("free spectrum at a generic point is simple") {
  const auto c = free_spectrum_at({0.37, -1.21}, 4);
  for (std::size_t i = 0; i < 20; ++i) CHECK(c[i].multiplicity == 1);
}

TEST_CASE("hexagonal truncation") {
  const PlanewaveOperator op(FourierPotential{}, 0.0, 6);
  CHECK(op.dim() == 127);
  CHECK(hex_index_norm(RealVec2(2.0, -1.0)) == 3.0);
  const PlanewaveOperator ks(FourierPotential{}, 0.0, 6, kstar());
  for (const char* f : {"R", "V", "F", "FV"}) {
    // -1 does not fix kstar, the rest do
    if (std::string(f) == "V" || std::string(f) == "FV") {
      CHECK_THROWS_AS(ks.symmetry_at({f}, kstar()), Error);
      continue;
    }
    const BlochSymmetry s = ks.symmetry_at({f}, kstar());
    CHECK(s.residual < 1e-10);
  }
}

TEST_CASE("symmetry matrices permute plane waves") {
  const PlanewaveOperator op(generic(), 0.4, 5, kstar());
  const BlochSymmetry R = op.symmetry_at({"R"}, kstar());
  CHECK(R.unitarity_defect == 0.0);
  CHECK(R.residual < 1e-10);
  CHECK(((R.matrix * R.matrix * R.matrix) - CMat::Identity(op.dim(), op.dim())).cwiseAbs().maxCoeff() == 0.0);
  const BlochSymmetry Vb = op.symmetry_at({"C", "V"}, kstar());
  CHECK(Vb.antiunitary);
  CHECK(Vb.residual < 1e-10);
  const PlanewaveOperator zero(generic(), 0.4, 5);
  for (const char* f : {"R", "V", "F", "FV"}) CHECK(zero.symmetry_at({f}, {0.0, 0.0}).residual < 1e-10);
}

TEST_CASE("potential flags are verified") {
  std::map<DualIndex, cplx> c{{{1, 0}, 1.0}, {{-1, 0}, 1.0}};
  CHECK_THROWS_AS(FourierPotential(c, kFlagR), Error);
  CHECK_NOTHROW(FourierPotential(c, kFlagReal | kFlagV));
  const FourierPotential s = FourierPotential::symmetrized({{{1, 0}, cplx(1.0, 0.5)}, {{2, 1}, 0.3}}, kFlagR | kFlagF | kFlagReal);
  CHECK((FourierPotential::detect_flags(s.coefficients()) & (kFlagR | kFlagF | kFlagReal)) == (kFlagR | kFlagF | kFlagReal));
  CHECK(flags_from_string("R,V,real") == (kFlagR | kFlagV | kFlagReal));
  CHECK(flags_to_string(kFlagF | kFlagReal) == "F,real");
  CHECK_THROWS_AS(flags_from_string("Q"), Error);
  CHECK_THROWS_AS(PlanewaveOperator(FourierPotential({{{1, 0}, 1.0}}, 0), 1.0, 3), Error);
}

TEST_CASE("potential rows") {
  const auto rows = parse_potential_rows("# g1 g2 re im\n1, 1, 0.5, 0\n-1 -1 0.5 0\n\n");
  REQUIRE(rows.size() == 2);
  CHECK(rows[1][0] == -1.0);
  CHECK_THROWS_AS(parse_potential_rows("1 1 0.5\n"), Error);
  CHECK_THROWS_AS(parse_potential_rows("1.5 1 0.5 0\n"), Error);
  CHECK_THROWS_AS(parse_potential_rows("1 1 x 0\n"), Error);
}

TEST_CASE("separation integral") {
  // the seed is averaged over the six images of (1,1)
  const FourierPotential q = FourierPotential::symmetrized({{{1, 1}, 6.0}}, kFlagR | kFlagReal);
  CHECK(std::abs(q({1, 1}) - 1.0) < 1e-15);
  CHECK(std::abs(q({-1, 0}) - 1.0) < 1e-15);
  CHECK(std::abs(separation_integral(q) - cplx(std::sqrt(3.0) / 2.0, 0.0)) < 1e-15);
  CHECK(std::abs(separation_integral(FourierPotential({{{0, 0}, 2.0}}, kFlagR | kFlagReal))) == 0.0);
}

TEST_CASE("separation integral matches quadrature") {
  const FourierPotential q = generic();
  // trapezoid over the cell in lattice coordinates, exact for these trigonometric sums
  const int n = 128;
  const Mat2& A = hexagonal_basis().A;
  const Mat2& B = hexagonal_basis().B;
  cplx sum = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const RealVec2 x = A * RealVec2(double(i) / n, double(j) / n);
      cplx qx = 0.0;
      for (const auto& [g, v] : q.coefficients())
        qx += v * std::polar(1.0, (kTwoPi * B * RealVec2(g.n1, g.n2)).dot(x));
      sum += std::polar(1.0, 4.0 * kPi * x(0) / std::sqrt(3.0)) * qx;
    }
  const cplx quad = sum * cell_area() / double(n * n);
  CHECK(std::abs(quad - separation_integral(q)) < 1e-10);
}

TEST_CASE("separation integral equals the rotated overlap") {
  for (const FourierPotential& q : {generic(), FourierPotential::symmetrized({{{1, 0}, 0.8}, {{2, 1}, -0.3}}, kFlagR | kFlagV | kFlagReal)})
    CHECK(std::abs(rotated_overlap(q) - separation_integral(q)) < 1e-12);
}

TEST_CASE("pure Laplacian cone coefficient") {
  const PureLaplacianAlpha a2 = alpha_pure_laplacian(2);
  const PureLaplacianAlpha a4 = alpha_pure_laplacian(4);
  CHECK(a2.triple_multiplicity == 3);
  CHECK(std::abs(a2.alpha_k - a4.alpha_k) < 1e-12);
  CHECK(std::abs(a2.alpha_kappa) == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-12));
  CHECK(std::abs(a2.alpha_k) == doctest::Approx(8.0 * std::sqrt(3.0) * kPi / 9.0).epsilon(1e-12));
}

TEST_CASE("cutoff stability of the low spectrum") {
  const FourierPotential q = generic();
  for (const Quasimomentum& k : {Quasimomentum{0.0, 0.0}, kstar()}) {
    const RVec a = spectrum(PlanewaveOperator(q, 0.5, 6, k), k);
    const RVec b = spectrum(PlanewaveOperator(q, 0.5, 7, k), k);
    CHECK((a.head(10) - b.head(10)).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("epsilon sweep") {
  const FourierPotential q = generic();
  const std::vector<double> eps{0.0, 0.02, 0.1};
  const auto par = epsilon_sweep(q, eps, 4);
  const auto ser = epsilon_sweep_serial(q, eps, 4);
  REQUIRE(par.size() == 3);
  CHECK_FALSE(par[0].cond_not_in_q0);
  CHECK(par[0].failures.find("not_in_q0") != std::string::npos);
  for (int i = 1; i < 3; ++i) {
    CHECK(par[i].failures.empty());
    CHECK(par[i].classification == ConeClass::nondegenerate_conical);
    CHECK(par[i].lambda0 == ser[i].lambda0);
  }
  // alpha tends to the free value
  const auto tiny = epsilon_sweep(q, {1e-3}, 4);
  CHECK(std::abs(std::abs(tiny[0].alpha) - std::abs(alpha_pure_laplacian(4).alpha_k)) < 1e-2);
  CHECK_THROWS_AS(epsilon_sweep(FourierPotential({{{0, 0}, 1.0}}, kFlagReal), eps, 4), Error);
}

TEST_CASE("six-fold cluster at zero") {
  const FourierPotential q = generic();
  CHECK(sixfold_splitting(q, 0.0).pattern == std::vector<int>{6});
  const SixfoldReport a = sixfold_splitting(q, 0.05);
  std::vector<int> p = a.pattern;
  std::sort(p.begin(), p.end());
  CHECK(p == std::vector<int>{1, 1, 2, 2});
  const SixfoldReport b = sixfold_splitting(q, 0.1);
  // first-order shifts double with epsilon
  for (int i = 0; i < 6; ++i) {
    const double sa = a.eigenvalues[i] - a.lambda_free, sb = b.eigenvalues[i] - b.lambda_free;
    CHECK(sb / sa == doctest::Approx(2.0).epsilon(0.05));
  }
}

}
