#pragma once

#include "hexcone/lattice.hpp"

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hexcone {

struct Shift {
  int n1 = 0;
  int n2 = 0;

  Shift operator-() const { return {-n1, -n2}; }
  Shift operator+(const Shift& o) const { return {n1 + o.n1, n2 + o.n2}; }
  Shift operator-(const Shift& o) const { return {n1 - o.n1, n2 - o.n2}; }
  bool is_zero() const { return n1 == 0 && n2 == 0; }
  auto operator<=>(const Shift&) const = default;
};

struct Vertex {
  int id = 0;
  RealVec2 xi = RealVec2::Zero();  // lattice coordinates
  double potential = 0.0;

  RealVec2 position() const { return hexagonal_basis().A * xi; }
};

// vertex v in cell 0 is joined to vertex u in cell `shift`
struct Edge {
  int u = 0;
  int v = 0;
  Shift shift;
  double weight = 1.0;
};

struct PeriodicGraph {
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
  LatticeBasis basis = hexagonal_basis();

  int size() const { return static_cast<int>(vertices.size()); }
  double weighted_degree(int v) const;
  bool connected() const;
};

struct SymmetryAction {
  std::string name;
  Mat2 point_matrix = Mat2::Identity();
  std::vector<int> permutation;
  std::vector<Shift> shifts;
  bool antiunitary = false;
  // factor list, outermost first: {"C","V"} is C after V; empty is the identity
  std::vector<std::string> kind;

  int size() const { return static_cast<int>(permutation.size()); }
  // integer matrix A^{-1} M A acting on cell indices
  Eigen::Matrix2i cell_map() const;
};

struct ValidationCheck {
  std::string name;
  bool passed = true;
  double residual = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::string action;
  std::vector<ValidationCheck> checks;

  bool passed() const;
  std::string summary() const;
};

class ValidationFailure : public Error {
 public:
  explicit ValidationFailure(ValidationReport r)
      : Error(ErrorCode::SymmetryValidationError, r.summary()), report_(std::move(r)) {}
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

struct Model {
  PeriodicGraph graph;
  std::vector<SymmetryAction> actions;

  const SymmetryAction* find(std::string_view name) const;
  const SymmetryAction& require(std::string_view name) const;
};

using PresetParams = std::map<std::string, double>;

ValidationReport validate_symmetry(const PeriodicGraph& g, const SymmetryAction& s, double tol = 1e-9);

Model build_preset(const std::string& name, const PresetParams& params);

SymmetryAction identity_action(int n);
SymmetryAction conjugation_action(int n);
SymmetryAction compose_actions(const SymmetryAction& s1, const SymmetryAction& s2);
SymmetryAction inverse_action(const SymmetryAction& s);

// point matrix and antiunitary flag of a factor name R, V, F, FV, C
void kind_factor(const std::string& factor, Mat2& point_matrix, bool& antiunitary);

// permutation and shifts read off from vertex positions: M xi_v = xi_perm(v) + shift(v)
SymmetryAction action_from_point_map(const PeriodicGraph& g, const Mat2& point_matrix, bool antiunitary,
                                     std::string name, double tol = 1e-9);

// vertex sitting at the rotation center (fixed with zero shift), if any
std::optional<int> rotation_center_vertex(const SymmetryAction& s_R);

// graph holding only the listed edges on the vertex set of g, with zero potentials
PeriodicGraph edge_perturbation(const PeriodicGraph& g, const std::vector<Edge>& edges);

// JSON model document
Model load_model(const std::string& text);
std::string save_model(const Model& m);

bool same_structure(const PeriodicGraph& a, const PeriodicGraph& b, double tol = 0.0);

}  // namespace hexcone
