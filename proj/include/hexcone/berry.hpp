#pragma once

#include "hexcone/dirac.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hexcone {

// closed loop, the last point connects back to the first
struct Contour {
  std::vector<Quasimomentum> points;
  int band = 0;  // 0-based
};

// circle of the given radius in kappa coordinates, mapped to k
Contour circle_contour(const Quasimomentum& center, double radius, int points = 64, int band = 0);
Contour reversed(const Contour& c);

enum class Quantization { zero, pi, unquantized };
enum class Gauge { overlap_product, vbar_fixed };
const char* to_string(Quantization q);
const char* to_string(Gauge g);

struct BerryResult {
  double phase = 0.0;  // (-pi, pi]
  Quantization quantized = Quantization::unquantized;
  double min_overlap = 1.0;
  Gauge gauge = Gauge::overlap_product;
  int points = 0;
};

Quantization quantize(double phase, double window = 0.05);
double wrap_phase(double x);  // to (-pi, pi]

struct BerryOptions {
  double gap_guard = 1e-6;    // relative to the matrix scale
  double min_overlap = 0.5;
};

// normalized band eigenvectors along the contour; throws DegenerateOnContour
std::vector<CVec> contour_eigenvectors(const BlochFamily& H, const Contour& c, const BerryOptions& opt = {});
std::vector<CVec> contour_eigenvectors_serial(const BlochFamily& H, const Contour& c, const BerryOptions& opt = {});

// -arg prod <psi_i, psi_{i+1}>; throws LowOverlap
BerryResult berry_phase_from_vectors(const std::vector<CVec>& psi, double min_overlap = 0.5);
BerryResult berry_phase(const BlochFamily& H, const Contour& c, const BerryOptions& opt = {});
BerryResult berry_phase_serial(const BlochFamily& H, const Contour& c, const BerryOptions& opt = {});

// e^{i theta/2} psi with U conj(e^{i theta/2} psi) = e^{i theta/2} psi; throws
// NotEigenvectorOfInvolution when |U conj(psi) - c psi| > tol
CVec vbar_gauge_fix(const CVec& psi, const CMat& U_vbar, double tol = 1e-6);

// phase from V-bar fixed vectors; the overlaps are real so the result is 0 or pi
BerryResult berry_phase_vbar(const BlochFamily& H, const Contour& c, const SymmetryAction& vbar,
                             const BerryOptions& opt = {});

// fixed vector carried continuously around the loop, returned as <psi_start, psi_end> (+1 or -1)
double vbar_holonomy(const BlochFamily& H, const Contour& c, const SymmetryAction& vbar, const BerryOptions& opt = {});

// lambda_pm(k0 + d) = lambda0 + n.d +- sqrt(g0^2 + d^T Q d), d in k coordinates
struct ConicFit {
  Quasimomentum k0;
  double lambda0 = 0.0;
  RealVec2 tilt = RealVec2::Zero();
  Mat2 Q = Mat2::Zero();
  double gap0 = 0.0;
  double residual = 0.0;   // rms misfit relative to the mean splitting
  bool positive_definite = false;
};

ConicFit conic_fit(const BlochFamily& H, const Quasimomentum& k0, int band, double radius = 1e-3, int directions = 16);

enum class KeptSymmetry { F, Vbar, none };
const char* to_string(KeptSymmetry k);

struct PersistenceOptions {
  double search_half_width = 0.3;
  double tol = 1e-9;          // gap counted as a degeneracy
  int coarse = 24;
  double berry_radius = 0.05;
  int berry_points = 64;
};

struct PersistenceTrace {
  std::vector<double> epsilons;
  std::vector<Quasimomentum> locations;
  std::vector<double> gaps;
  std::vector<double> on_line_residuals;  // NaN unless F is kept
  std::vector<double> phases;             // NaN when the cone is lost
  std::vector<bool> found;
  std::vector<bool> certified;            // conic fit positive definite
  double kept_residual = 0.0;             // W against the kept symmetry
  double rotation_residual = 0.0;         // W against R
};

// distance in k coordinates from k to the line k2 = -k1 (mod 2 pi)
double distance_to_F_line(const Quasimomentum& k);

PersistenceTrace persistence_scan(const BlochOperator& H, const BlochOperator& W, const std::vector<double>& eps,
                                  const Quasimomentum& k_seed, int band, KeptSymmetry kept,
                                  const SymmetryAction* s_kept, const SymmetryAction& s_R,
                                  const PersistenceOptions& opt = {});

struct Crossing {
  double t = 0.0;  // k = (t, -t)
  double lambda = 0.0;
  int even_index = 0;
  int odd_index = 0;
  int lower_band = 0;  // global index of the lower of the two bands meeting
  double slope_difference = 0.0;  // d(even - odd)/dt
};

struct CrossingReport {
  std::vector<double> ts;
  Eigen::MatrixXd even;  // t x even sector
  Eigen::MatrixXd odd;   // t x odd sector
  std::vector<Crossing> crossings;
  double max_parity_residual = 0.0;
};

// F sectors along k = (t, -t), t in [t0, t1]; crossings restricted to lower bands in [band_lo, band_hi]
CrossingReport parity_crossing(const BlochFamily& H, const SymmetryAction& s_F, int samples = 256, double t0 = -kPi,
                               double t1 = kPi, int band_lo = 0, int band_hi = 1 << 20);

}  // namespace hexcone
