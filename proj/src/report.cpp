#include "hexcone/report.hpp"

#include <cmath>
#include <cstdio>

namespace hexcone {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

void dump(const ojson& j, int indent, std::string& out) {
  const std::string pad(indent + 2, ' ');
  switch (j.type()) {
    case ojson::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + ojson(it.key()).dump() + ": ";
        dump(it.value(), indent + 2, out);
      }
      out += "\n" + std::string(indent, ' ') + "}";
      return;
    }
    case ojson::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // short arrays of scalars stay on one line
      bool flat = j.size() <= 8;
      for (const auto& e : j) flat = flat && !e.is_structured();
      if (flat) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          dump(j[i], indent, out);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        dump(j[i], indent + 2, out);
      }
      out += "\n" + std::string(indent, ' ') + "]";
      return;
    }
    case ojson::value_t::number_float: {
      const double x = j.get<double>();
      out += std::isfinite(x) ? format_double(x) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

ojson cplx_json(const cplx& z) { return ojson::array({z.real(), z.imag()}); }

ojson mat2c_json(const Mat2c& m) {
  ojson rows = ojson::array();
  for (int i = 0; i < 2; ++i) rows.push_back(ojson::array({cplx_json(m(i, 0)), cplx_json(m(i, 1))}));
  return rows;
}

ojson vec_json(const RVec& v) {
  ojson a = ojson::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

ojson cmat_json(const CMat& m) {
  ojson rows = ojson::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ojson r = ojson::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(cplx_json(m(i, j)));
    rows.push_back(r);
  }
  return rows;
}

const char* intertwiner_name(IntertwinerKind k) {
  switch (k) {
    case IntertwinerKind::antiunitary_Vbar: return "antiunitary_Vbar";
    case IntertwinerKind::unitary_F: return "unitary_F";
    case IntertwinerKind::none: return "none";
  }
  return "none";
}

}  // namespace

std::string dump_json(const ojson& j) {
  std::string out;
  dump(j, 0, out);
  return out;
}

ojson to_json(const Quasimomentum& k) { return ojson::array({k.k1, k.k2}); }

ojson to_json(const ValidationReport& r) {
  ojson j;
  j["action"] = r.action;
  j["passed"] = r.passed();
  j["checks"] = ojson::array();
  for (const ValidationCheck& c : r.checks)
    j["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"residual", c.residual}, {"detail", c.detail}});
  return j;
}

ojson to_json(const RotationDecomposition& d) {
  ojson j;
  j["k0"] = to_json(d.k0);
  j["labels"] = d.labels == LabelConvention::direct ? "direct" : "conjugated";
  j["zeta"] = cplx_json(d.zeta);
  j["scale"] = d.scale;
  j["commutation_residual"] = d.commutation_residual;
  j["block_residual"] = d.block_residual;
  j["projector_residual"] = d.projector_residual;
  j["blocks"] = ojson::array();
  for (int b = 0; b < 3; ++b) {
    ojson e;
    e["index"] = b;
    e["eigenphase"] = cplx_json(d.eigenphases[b]);
    e["dim"] = d.dim(b);
    e["matrix"] = cmat_json(d.blocks[b]);
    e["spectrum"] = vec_json(d.block_spectrum(b));
    j["blocks"].push_back(e);
  }
  return j;
}

ojson to_json(const IsospectralityReport& r) {
  ojson j;
  j["matched"] = r.matched;
  j["intertwiner"] = intertwiner_name(r.intertwiner_kind);
  j["max_pairing_error"] = r.max_pairing_error;
  j["swap_residual"] = r.swap_residual;
  j["fix_residual"] = r.fix_residual;
  return j;
}

ojson to_json(const std::vector<CensusEntry>& census) {
  ojson a = ojson::array();
  for (const CensusEntry& e : census)
    a.push_back({{"lambda", e.lambda},
                 {"multiplicity", e.multiplicity},
                 {"blocks", ojson::array({e.block_counts[0], e.block_counts[1], e.block_counts[2]})}});
  return a;
}

ojson to_json(const ConeReport& c) {
  ojson j;
  j["k0"] = to_json(c.k0);
  j["lambda0"] = c.lambda0;
  j["multiplicity"] = c.multiplicity;
  j["classification"] = to_string(c.classification);
  j["alpha"] = cplx_json(c.alpha);
  j["abs_alpha"] = std::abs(c.alpha);
  j["alpha_kappa"] = cplx_json(c.alpha_kappa);
  j["abs_alpha_kappa"] = std::abs(c.alpha_kappa);
  j["h1"] = mat2c_json(c.h1);
  j["h2"] = mat2c_json(c.h2);
  j["structure_residual"] = c.structure_residual;
  j["tilt"] = ojson::array({c.tilt(0), c.tilt(1)});
  j["scale"] = c.scale;
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

ojson to_json(const ConeFit& f) {
  ojson j;
  j["radii"] = f.radii;
  j["mean_slope"] = f.mean_slope;
  j["anisotropy"] = f.anisotropy;
  j["slope"] = f.slope;
  j["anisotropy_extrapolated"] = f.anisotropy_extrapolated;
  auto opt = [&](const char* key, const std::optional<double>& v) {
    if (v) j[key] = *v;
  };
  opt("ratio_unit", f.ratio_unit);
  opt("ratio_two_over_sqrt3", f.ratio_two_over_sqrt3);
  opt("ratio_k_unit", f.ratio_k_unit);
  opt("ratio_k_two_over_sqrt3", f.ratio_k_two_over_sqrt3);
  opt("ratio_k_sqrt3_over_two", f.ratio_k_sqrt3_over_two);
  return j;
}

ojson to_json(const BerryResult& b) {
  ojson j;
  j["phase"] = b.phase;
  j["quantized"] = to_string(b.quantized);
  j["min_overlap"] = b.min_overlap;
  j["gauge"] = to_string(b.gauge);
  j["points"] = b.points;
  return j;
}

ojson to_json(const CrossingReport& r) {
  ojson j;
  j["samples"] = r.ts.size();
  j["even_dim"] = r.even.cols();
  j["odd_dim"] = r.odd.cols();
  j["max_parity_residual"] = r.max_parity_residual;
  j["crossings"] = ojson::array();
  for (const Crossing& c : r.crossings)
    j["crossings"].push_back({{"t", c.t},
                              {"k", ojson::array({c.t, -c.t})},
                              {"lambda", c.lambda},
                              {"even_index", c.even_index},
                              {"odd_index", c.odd_index},
                              {"lower_band", c.lower_band},
                              {"slope_difference", c.slope_difference}});
  return j;
}

ojson to_json(const EpsilonReport& r) {
  ojson j;
  j["epsilon"] = r.epsilon;
  j["lambda0"] = r.lambda0;
  j["q1_gap"] = r.q1_gap;
  j["q0_distance"] = r.q0_distance;
  j["alpha"] = cplx_json(r.alpha);
  j["alpha_kappa"] = cplx_json(r.alpha_kappa);
  j["classification"] = to_string(r.classification);
  j["conditions"] = {{"simple", r.cond_simple}, {"not_in_q0", r.cond_not_in_q0}, {"alpha", r.cond_alpha}};
  j["failures"] = r.failures;
  return j;
}

ojson to_json(const SixfoldReport& r) {
  ojson j;
  j["lambda_free"] = r.lambda_free;
  j["eigenvalues"] = r.eigenvalues;
  j["first_order"] = r.first_order;
  j["pattern"] = r.pattern;
  j["first_order_error"] = r.first_order_error;
  return j;
}

std::string bands_csv(const BandStructure& bs, const ojson& config) {
  std::string out = "# config " + config.dump() + "\n";
  out += "k1,k2";
  for (Eigen::Index b = 0; b < bs.bands.cols(); ++b) out += ",band" + std::to_string(b);
  out += "\n";
  for (std::size_t i = 0; i < bs.grid.size(); ++i) {
    out += format_double(bs.grid[i].k1) + "," + format_double(bs.grid[i].k2);
    for (Eigen::Index b = 0; b < bs.bands.cols(); ++b)
      out += "," + format_double(bs.bands(static_cast<Eigen::Index>(i), b));
    out += "\n";
  }
  return out;
}

std::string persistence_csv(const PersistenceTrace& t, const ojson& config) {
  std::string out = "# config " + config.dump() + "\n";
  out += "epsilon,k1,k2,gap,line_residual,phase\n";
  for (std::size_t i = 0; i < t.epsilons.size(); ++i) {
    out += format_double(t.epsilons[i]) + "," + format_double(t.locations[i].k1) + "," +
           format_double(t.locations[i].k2) + "," + format_double(t.gaps[i]) + "," +
           format_double(t.on_line_residuals[i]) + "," + format_double(t.phases[i]) + "\n";
  }
  return out;
}

}  // namespace hexcone
