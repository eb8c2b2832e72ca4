#pragma once

#include "hexcone/bloch.hpp"

#include <array>
#include <optional>
#include <vector>

namespace hexcone {

// Block j carries rotation eigenvalue tau^{-j} (direct) or tau^{j} (conjugated, used at -k*).
enum class LabelConvention { direct, conjugated };

struct RotationDecomposition {
  Quasimomentum k0;
  CMat H0;
  CMat U;                 // normalized so that U^3 = I
  cplx zeta{1.0, 0.0};    // raw U^3 = zeta I
  LabelConvention labels = LabelConvention::direct;
  std::array<cplx, 3> eigenphases;
  std::array<CMat, 3> bases;   // orthonormal columns
  std::array<CMat, 3> blocks;  // B_j^* H0 B_j
  double block_residual = 0.0;
  double commutation_residual = 0.0;
  double projector_residual = 0.0;
  double scale = 1.0;

  int dim(int j) const { return static_cast<int>(bases[j].cols()); }
  RVec block_spectrum(int j) const;
};

RotationDecomposition decompose_matrix(const CMat& H0, const CMat& U, const Quasimomentum& k0,
                                       LabelConvention labels = LabelConvention::direct);
RotationDecomposition decompose(const BlochFamily& H, const SymmetryAction& s_R, const Quasimomentum& k0);

LabelConvention labels_for(const Quasimomentum& k0);

// 2x2 quotient matrix of the sixcell example at k*, -k* or 0
CMat quotient_matrix_closed_form(double q1, double q2, double r, const Quasimomentum& k0);

enum class IntertwinerKind { antiunitary_Vbar, unitary_F, none };

struct IsospectralityReport {
  std::array<RVec, 3> spectra;
  bool matched = false;
  IntertwinerKind intertwiner_kind = IntertwinerKind::none;
  double max_pairing_error = 0.0;
  double swap_residual = 0.0;
  double fix_residual = 0.0;
};

IsospectralityReport check_isospectrality(const RotationDecomposition& d, const BlochSymmetry& extra);
IsospectralityReport check_isospectrality(const RotationDecomposition& d, const BlochFamily& H,
                                          const SymmetryAction& s_extra);

// spectra of the three blocks without any symmetry check
IsospectralityReport block_spectra(const RotationDecomposition& d);

struct CensusEntry {
  double lambda = 0.0;
  int multiplicity = 0;
  std::array<int, 3> block_counts{0, 0, 0};
};

std::vector<CensusEntry> multiplicity_census(const RotationDecomposition& d);
std::vector<CensusEntry> multiplicity_census(const BlochFamily& H, const Quasimomentum& k0, const SymmetryAction& s_R,
                                             const SymmetryAction* s_extra,
                                             IsospectralityReport* report = nullptr);

// degenerate eigenvectors of H(k0) that come from Q1/Q2 only vanish at the centre vertex
bool suppression_check(const RotationDecomposition& d, std::optional<int> center_vertex);

}  // namespace hexcone
