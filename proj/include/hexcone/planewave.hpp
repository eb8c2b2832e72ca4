#pragma once

#include "hexcone/dirac.hpp"

#include <array>
#include <map>
#include <string>
#include <vector>

namespace hexcone {

// dual-lattice index g of G = 2 pi (g1 b1 + g2 b2)
using DualIndex = Shift;

enum PotentialFlag : unsigned {
  kFlagR = 1u,
  kFlagV = 2u,
  kFlagF = 4u,
  kFlagFV = 8u,
  kFlagReal = 16u,
};

std::string flags_to_string(unsigned flags);
unsigned flags_from_string(const std::string& s);  // e.g. "R,V,F,real"

// finite Fourier sum q(x) = sum_g qhat(g) e^{i G.x}
class FourierPotential {
 public:
  FourierPotential() = default;
  // throws SymmetryValidationError when a declared flag does not hold
  FourierPotential(std::map<DualIndex, cplx> coefficients, unsigned flags, double tol = 1e-12);

  cplx operator()(const DualIndex& g) const;
  const std::map<DualIndex, cplx>& coefficients() const { return coeffs_; }
  unsigned flags() const { return flags_; }

  static unsigned detect_flags(const std::map<DualIndex, cplx>& c, double tol = 1e-12);
  // average of the seed over the group generated by the flags
  static FourierPotential symmetrized(const std::map<DualIndex, cplx>& seed, unsigned flags);
  // rows (g1, g2, re, im)
  static FourierPotential from_rows(const std::vector<std::array<double, 4>>& rows, unsigned flags);

 private:
  std::map<DualIndex, cplx> coeffs_;
  unsigned flags_ = 0;
};

// text with one "g1 g2 re im" row per line (commas or blanks), '#' comments
std::vector<std::array<double, 4>> parse_potential_rows(const std::string& text);

// real potential with one value per shell: shells 1..3 of the dual lattice
FourierPotential shell_potential(double q0, double s1, double s2, double s3);

// max(|m1|, |m2|, |m1 - m2|): invariant under the dual rotation, reflections and -1
double hex_index_norm(const RealVec2& m);

// -Laplacian + eps q on the plane waves e^{i(kappa + G).x} with hex_index_norm(g + k_ref / 2 pi) <= cutoff
class PlanewaveOperator : public BlochFamily {
 public:
  PlanewaveOperator(FourierPotential q, double epsilon, int cutoff, const Quasimomentum& k_ref = {});

  int dim() const override { return static_cast<int>(basis_.size()); }
  CMat evaluate(const Quasimomentum& k) const override;
  CMat derivative(const Quasimomentum& k, int j) const override;

  // potential part eps * qhat(g - g'), k independent
  const CMat& potential_matrix() const { return V_; }
  CMat free_matrix(const Quasimomentum& k) const;
  const std::vector<DualIndex>& basis() const { return basis_; }
  int index_of(const DualIndex& g) const;  // -1 when absent
  const Quasimomentum& k_ref() const { return k_ref_; }
  int cutoff() const { return cutoff_; }
  double epsilon() const { return eps_; }

  // plane-wave realization of a point symmetry (factor list as in models, e.g. {"R"} or {"C","V"})
  // at a point it fixes; throws NotAFixedPoint
  BlochSymmetry symmetry_at(const std::vector<std::string>& kind, const Quasimomentum& k0) const;

 private:
  FourierPotential q_;
  double eps_;
  int cutoff_;
  Quasimomentum k_ref_;
  std::vector<DualIndex> basis_;
  std::map<DualIndex, int> index_;
  CMat V_;
};

struct FreeCluster {
  double lambda = 0.0;
  int multiplicity = 0;
};

std::vector<FreeCluster> free_spectrum_at(const Quasimomentum& k0, int cutoff);

// cell area |Omega| = sqrt(3)/2
double cell_area();

// |Omega| qhat(1,1)
cplx separation_integral(const FourierPotential& q);
// |Omega| <R phi, q phi> in the plane-wave basis, phi = e^{i kappa*.x}
cplx rotated_overlap(const FourierPotential& q, int cutoff = 2);

struct PureLaplacianAlpha {
  cplx alpha_k{0.0, 0.0};      // <psi1, dH/dk1 psi2>
  cplx alpha_kappa{0.0, 0.0};  // <psi1, dH/dkappa1 psi2>
  int triple_multiplicity = 0;
  CVec psi1, psi2;
};

// psi_j = P_j phi normalized, psi1 in the conj(tau) and psi2 in the tau rotation eigenspace
PureLaplacianAlpha alpha_pure_laplacian(int cutoff);

struct EpsilonReport {
  double epsilon = 0.0;
  double lambda0 = 0.0;           // lowest eigenvalue of Q1
  double q1_gap = 0.0;            // to the next eigenvalue of Q1
  double q0_distance = 0.0;       // from lambda0 to the spectrum of Q0
  cplx alpha{0.0, 0.0};
  cplx alpha_kappa{0.0, 0.0};
  bool cond_simple = false;
  bool cond_not_in_q0 = false;
  bool cond_alpha = false;
  ConeClass classification = ConeClass::indeterminate;
  std::string failures;
};

std::vector<EpsilonReport> epsilon_sweep(const FourierPotential& q, const std::vector<double>& eps, int cutoff = 6);
std::vector<EpsilonReport> epsilon_sweep_serial(const FourierPotential& q, const std::vector<double>& eps,
                                                int cutoff = 6);

struct SixfoldReport {
  double lambda_free = 0.0;              // (4 pi / sqrt 3)^2
  std::vector<double> eigenvalues;       // full matrix, the six continuing the cluster
  std::vector<double> first_order;       // lambda_free + eps * eig(Phi^* q Phi)
  std::vector<int> pattern;              // multiplicities in increasing energy
  double first_order_error = 0.0;        // max |full - first order|
};

SixfoldReport sixfold_splitting(const FourierPotential& q, double eps, int cutoff = 6);

}  // namespace hexcone
