#pragma once

#include "hexcone/crystal.hpp"

#include <random>

namespace hexcone {

// point group generated by R and one extra element
enum class SymmetryGroup { R_F, R_V, R_FV };

struct GeneratorOptions {
  int generic_orbits = 1;       // orbits of 6 vertices at random positions
  bool center_vertex = false;   // extra vertex at the rotation centre
  int edge_seeds = 4;           // edge orbits to draw
  double weight_min = 0.5;
  double weight_max = 2.0;
  double potential_range = 2.0;
};

// Random weighted graph invariant under the chosen group. Declared actions:
// R, the extra generator (F, V or FV), C, and Vbar / FVbar where they apply.
Model random_symmetric_model(SymmetryGroup group, std::mt19937_64& rng, const GeneratorOptions& opt = {});

}  // namespace hexcone
