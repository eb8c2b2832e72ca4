#pragma once

#include "hexcone/quotient.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hexcone {

enum class BasisKind { rotation_adapted, parity_adapted, raw };

struct DegenerateEigenpair {
  Quasimomentum k0;
  double lambda0 = 0.0;
  CVec f1, f2;
  BasisKind basis_kind = BasisKind::raw;
};

struct HMatrices {
  Mat2c h1 = Mat2c::Zero();  // k_1 derivative
  Mat2c h2 = Mat2c::Zero();  // k_2 derivative
};

HMatrices derivative_matrices(const BlochFamily& H, const Quasimomentum& k0, const CVec& f1, const CVec& f2);

// orthonormal basis of the eigenspace of H(k0) at lambda0 (cluster tolerance)
CMat eigenspace_at(const BlochFamily& H, const Quasimomentum& k0, double lambda0);

// f1 in the tau eigenspace, f2 in the conj(tau) eigenspace of the normalized rotation
DegenerateEigenpair rotation_adapted_basis(const BlochFamily& H, const Quasimomentum& k0, const BlochSymmetry& R,
                                           double lambda0);
DegenerateEigenpair rotation_adapted_basis(const BlochFamily& H, const Quasimomentum& k0, const SymmetryAction& s_R,
                                           double lambda0);

// f1 even, f2 odd under the normalized reflection
DegenerateEigenpair parity_adapted_basis(const BlochFamily& H, const Quasimomentum& k0, const BlochSymmetry& F,
                                         double lambda0);

struct HStructure {
  cplx alpha{0.0, 0.0};
  double residual = 0.0;
};

HStructure verify_h_structure(const Mat2c& h1, const Mat2c& h2, BasisKind kind = BasisKind::rotation_adapted);

struct ParityStructure {
  double a = 0.0;        // diagonal of h along (1,-1)
  double c = 0.0;
  cplx b{0.0, 0.0};      // off-diagonal of h along (1,1)
  double residual = 0.0;
  double trace_odd = 0.0;
};

// h_e: derivative along k_e = (1,-1), h_o: along k_o = (1,1), both in a parity basis
ParityStructure parity_structure(const Mat2c& h_e, const Mat2c& h_o);
ParityStructure parity_structure(const HMatrices& h);

enum class ConeClass { nondegenerate_conical, fully_degenerate_flat, indeterminate };
const char* to_string(ConeClass c);

struct ConeReport {
  Quasimomentum k0;
  double lambda0 = 0.0;
  int multiplicity = 0;
  Mat2c h1 = Mat2c::Zero();
  Mat2c h2 = Mat2c::Zero();
  cplx alpha{0.0, 0.0};        // <f1, dH/dk1 f2>
  cplx alpha_kappa{0.0, 0.0};  // same with the Cartesian derivative d/dkappa_1
  double structure_residual = 0.0;
  ConeClass classification = ConeClass::indeterminate;
  RealVec2 tilt = RealVec2::Zero();  // k-coordinates
  double scale = 1.0;
  std::string note;
};

ConeReport classify(const BlochFamily& H, const Quasimomentum& k0, const BlochSymmetry& R, double lambda0);
ConeReport classify(const BlochFamily& H, const Quasimomentum& k0, const SymmetryAction& s_R, double lambda0);

struct ConeFitOptions {
  std::vector<double> radii{1e-2, 3e-3, 1e-3};
  int directions = 24;
};

struct ConeFit {
  std::vector<double> radii;
  std::vector<std::vector<double>> slopes;  // [radius][direction], kappa units
  std::vector<double> mean_slope;           // per radius
  std::vector<double> anisotropy;           // per radius
  double slope = 0.0;                       // mean slope extrapolated to r = 0
  double anisotropy_extrapolated = 1.0;
  // slope / |alpha_kappa| (cone law with unit constant) and slope / (2|alpha_kappa|/sqrt 3)
  std::optional<double> ratio_unit;
  std::optional<double> ratio_two_over_sqrt3;
  // same against the k-coordinate alpha
  std::optional<double> ratio_k_unit;
  std::optional<double> ratio_k_two_over_sqrt3;
  std::optional<double> ratio_k_sqrt3_over_two;
};

ConeFit cone_fit(const BlochFamily& H, const Quasimomentum& k0, double lambda0, const ConeFitOptions& opt = {},
                 const ConeReport* cone = nullptr);
ConeFit cone_fit_serial(const BlochFamily& H, const Quasimomentum& k0, double lambda0,
                        const ConeFitOptions& opt = {}, const ConeReport* cone = nullptr);

struct SearchRegion {
  Quasimomentum lo{-kPi, -kPi};
  Quasimomentum hi{kPi, kPi};
  static SearchRegion around(const Quasimomentum& c, double half_width);
};

struct SearchOptions {
  int coarse = 48;                          // grid per axis
  int max_iterations = 4000;
  std::vector<Quasimomentum> seeds;         // extra starting points
};

// gap(k) = lambda_{band+1}(k) - lambda_band(k), band 0-based
double band_gap(const BlochFamily& H, const Quasimomentum& k, int band);

struct SearchResult {
  std::vector<Quasimomentum> points;  // gap < tol, deduplicated
  Quasimomentum best;
  double best_gap = 0.0;
};

SearchResult degeneracy_search_ex(const BlochFamily& H, const SearchRegion& region, int band, double tol,
                                  const SearchOptions& opt = {});
std::vector<Quasimomentum> degeneracy_search(const BlochFamily& H, const SearchRegion& region, int band, double tol,
                                             const SearchOptions& opt = {});
SearchResult degeneracy_search_serial(const BlochFamily& H, const SearchRegion& region, int band, double tol,
                                      const SearchOptions& opt = {});

}  // namespace hexcone
