#pragma once

#include "hexcone/crystal.hpp"

#include <map>
#include <vector>

namespace hexcone {

// Hermitian matrix family k -> H(k) with an analytic k-derivative.
class BlochFamily {
 public:
  virtual ~BlochFamily() = default;
  virtual int dim() const = 0;
  virtual CMat evaluate(const Quasimomentum& k) const = 0;
  // dH/dk_j, j in {0, 1}
  virtual CMat derivative(const Quasimomentum& k, int j) const = 0;
};

// H(k) = sum_n C_n e^{i n.k}
class BlochOperator : public BlochFamily {
 public:
  explicit BlochOperator(int dim = 0) : dim_(dim) {}

  int dim() const override { return dim_; }
  CMat evaluate(const Quasimomentum& k) const override;
  CMat derivative(const Quasimomentum& k, int j) const override;

  void add(const Shift& n, const CMat& c);
  const std::map<Shift, CMat>& monomials() const { return monomials_; }

  BlochOperator operator+(const BlochOperator& o) const;
  BlochOperator scaled(double s) const;

  // max_n |C_{-n} - C_n^*|
  double hermiticity_defect() const;
  // sum_n |C_n| |n|, bounds the k-Lipschitz constant of the bands
  double lipschitz_bound() const;

 private:
  int dim_;
  std::map<Shift, CMat> monomials_;
};

BlochOperator assemble(const PeriodicGraph& g);

struct Eigensystem {
  RVec values;   // ascending
  CMat vectors;  // columns
};

Eigensystem eigensystem(const CMat& H);
RVec spectrum(const BlochFamily& H, const Quasimomentum& k);

// spectral radius, floored at 1
double matrix_scale(const CMat& H);
double cluster_tolerance(const CMat& H);

struct Cluster {
  double lambda = 0.0;
  int first = 0;         // index of the lowest band in the cluster
  int multiplicity = 0;
};
std::vector<Cluster> cluster_eigenvalues(const RVec& sorted, double tol);
std::vector<Cluster> clusters_at(const BlochFamily& H, const Quasimomentum& k);

struct GridSpec {
  enum class Kind { uniform, path };
  Kind kind = Kind::uniform;
  int n = 16;                           // uniform: n x n over [-pi, pi)^2
  std::vector<Quasimomentum> vertices;  // path corners
  int points_per_segment = 32;

  static GridSpec uniform_grid(int n);
  static GridSpec polyline(std::vector<Quasimomentum> corners, int points_per_segment);
  std::vector<Quasimomentum> points() const;
};

struct BandStructure {
  std::vector<Quasimomentum> grid;
  Eigen::MatrixXd bands;  // grid point x band
};

BandStructure sweep(const BlochFamily& H, const GridSpec& spec);
BandStructure sweep_serial(const BlochFamily& H, const GridSpec& spec);
BandStructure sweep_points(const BlochFamily& H, const std::vector<Quasimomentum>& pts);
BandStructure sweep_points_serial(const BlochFamily& H, const std::vector<Quasimomentum>& pts);

struct BlochSymmetry {
  std::string name;
  bool antiunitary = false;
  Quasimomentum k_from;
  Quasimomentum k_to;  // reduced
  CMat matrix;
  double residual = 0.0;          // |U H(k) U^* - H(k_to)|, conj on the left when antiunitary
  double unitarity_defect = 0.0;

  CVec apply(const CVec& f) const;
  CMat apply(const CMat& f) const;
};

// image of k: S k, or S(-k) for antiunitary actions (unreduced)
Quasimomentum image_k(const SymmetryAction& s, const Quasimomentum& k);

// matrix of the pullback action: U_{v, perm v} = e^{i k_eff . shift v}, k_eff = -k when antiunitary
CMat action_matrix(const SymmetryAction& s, const Quasimomentum& k);

// conjugation residual of a (anti)unitary matrix against a family
double conjugation_residual(const BlochFamily& H, const CMat& U, bool antiunitary, const Quasimomentum& k_from,
                            const Quasimomentum& k_to);

// throws ConjugationMismatch when the residual exceeds tol * scale
BlochSymmetry symmetry_at_k(const BlochFamily& H, const SymmetryAction& s, const Quasimomentum& k, double tol = 1e-10);
// same without the check
BlochSymmetry realize(const BlochFamily& H, const SymmetryAction& s, const Quasimomentum& k);

// largest conjugation residual of an operator under s over sampled k
double symmetry_defect(const BlochFamily& H, const SymmetryAction& s, const std::vector<Quasimomentum>& samples);

struct DispersionSymmetryReport {
  double max_deviation = 0.0;
  Quasimomentum worst;
  int points = 0;
};
DispersionSymmetryReport dispersion_symmetry_check(const BlochFamily& H, const SymmetryAction& s,
                                                   const std::vector<Quasimomentum>& grid);

}  // namespace hexcone
