#include "hexcone/berry.hpp"
#include "hexcone/planewave.hpp"
#include "hexcone/quotient.hpp"
#include "hexcone/report.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace hexcone;
namespace fs = std::filesystem;

namespace {

// numbers, pi, sqrt(), + - * / and parentheses
class Expr {
 public:
  explicit Expr(std::string s) : s_(std::move(s)) {}
  double parse() {
    const double v = sum();
    skip();
    if (p_ != s_.size()) bad();
    return v;
  }

 private:
  std::string s_;
  std::size_t p_ = 0;

  [[noreturn]] void bad() const { throw Error(ErrorCode::ParseError, "cannot parse number '" + s_ + "'"); }
  void skip() {
    while (p_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[p_]))) ++p_;
  }
  bool eat(char c) {
    skip();
    if (p_ < s_.size() && s_[p_] == c) {
      ++p_;
      return true;
    }
    return false;
  }
  double sum() {
    double v = product();
    for (;;) {
      if (eat('+')) v += product();
      else if (eat('-')) v -= product();
      else return v;
    }
  }
  double product() {
    double v = unary();
    for (;;) {
      if (eat('*')) v *= unary();
      else if (eat('/')) v /= unary();
      else return v;
    }
  }
  double unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return atom();
  }
  double atom() {
    skip();
    if (eat('(')) {
      const double v = sum();
      if (!eat(')')) bad();
      return v;
    }
    if (s_.compare(p_, 2, "pi") == 0) {
      p_ += 2;
      return kPi;
    }
    if (s_.compare(p_, 4, "sqrt") == 0) {
      p_ += 4;
      if (!eat('(')) bad();
      const double v = sum();
      if (!eat(')')) bad();
      return std::sqrt(v);
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s_.substr(p_), &used);
    } catch (const std::exception&) {
      bad();
    }
    p_ += used;
    return v;
  }
};

double num(const std::string& s) { return Expr(s).parse(); }

std::vector<double> num_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(num(tok));
  return out;
}

Quasimomentum point(const std::string& s) {
  if (s == "kstar") return kstar();
  if (s == "-kstar") return -kstar();
  if (s == "0" || s == "gamma") return {0.0, 0.0};
  const std::vector<double> v = num_list(s);
  if (v.size() != 2) throw Error(ErrorCode::ParseError, "expected kstar, -kstar, 0 or 'k1,k2', got '" + s + "'");
  return {v[0], v[1]};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path.string() + "'");
  out << text;
}

struct ModelOpts {
  std::string preset;
  std::string model_path;
  std::map<std::string, std::string> params;  // raw expressions
};

void add_model_options(CLI::App* app, ModelOpts& m) {
  app->add_option("--preset", m.preset, "honeycomb, honeycomb_2atom or sixcell");
  app->add_option("--model", m.model_path, "model JSON file");
  for (const char* p : {"q", "q1", "q2", "r", "rho"})
    app->add_option(std::string("--") + p, m.params[p], std::string("preset parameter ") + p);
}

Model load(const ModelOpts& m, ojson& config) {
  if (!m.model_path.empty()) {
    config["model"] = m.model_path;
    return load_model(read_file(m.model_path));
  }
  const std::string name = m.preset.empty() ? "sixcell" : m.preset;
  PresetParams pp;
  if (name == "sixcell") pp = {{"q1", std::sqrt(3.0)}, {"q2", 0.0}, {"r", std::sqrt(7.0)}};
  if (name == "honeycomb" || name == "honeycomb_2atom") pp = {{"q", 0.0}};
  for (const auto& [k, v] : m.params)
    if (!v.empty()) pp[k] = num(v);
  config["preset"] = name;
  ojson jp = ojson::object();
  for (const auto& [k, v] : pp) jp[k] = v;
  config["params"] = jp;
  return build_preset(name, pp);
}

void emit(const fs::path& path, const ojson& doc) {
  const std::string text = dump_json(doc) + "\n";
  write_file(path, text);
  std::cout << text;
}

const SymmetryAction* first_of(const Model& m, std::initializer_list<const char*> names) {
  for (const char* n : names)
    if (const SymmetryAction* s = m.find(n)) return s;
  return nullptr;
}

std::vector<Edge> parse_edges(const std::string& s) {
  std::vector<Edge> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (item.empty()) continue;
    const std::vector<double> v = num_list(item);
    if (v.size() != 5) throw Error(ErrorCode::ParseError, "edge '" + item + "' needs u,v,n1,n2,m");
    out.push_back({static_cast<int>(v[0]), static_cast<int>(v[1]),
                   {static_cast<int>(v[2]), static_cast<int>(v[3])}, v[4]});
  }
  return out;
}

int fail_with(const Error& e) {
  ojson j;
  j["error"] = error_name(e.code());
  j["message"] = e.what();
  if (auto* vf = dynamic_cast<const ValidationFailure*>(&e)) j["report"] = to_json(vf->report());
  std::cerr << dump_json(j) << "\n";
  return is_validation_error(e.code()) ? 2 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conical points of hexagonally symmetric periodic operators"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string out_dir = ".";
  int threads = 0;
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "OpenMP threads (default: HEXCONE_THREADS or OMP_NUM_THREADS)");

  ModelOpts mo;

  auto* bands = app.add_subcommand("bands", "band CSV over a grid or a path");
  add_model_options(bands, mo);
  int grid = 64, pps = 64;
  std::string path;
  bands->add_option("--grid", grid, "uniform n x n grid");
  bands->add_option("--path", path, "corners, e.g. 0;kstar;-kstar");
  bands->add_option("--pps", pps, "points per path segment");

  auto* quotient = app.add_subcommand("quotient", "rotation blocks and multiplicity census");
  add_model_options(quotient, mo);
  std::string at = "kstar", extra;
  quotient->add_option("--at", at, "kstar, -kstar or 0");
  quotient->add_option("--extra", extra, "symmetry exchanging the blocks (default Vbar, then F)");

  auto* dirac = app.add_subcommand("dirac", "cone reports at the rotation fixed points");
  add_model_options(dirac, mo);
  std::string radii_s = "0.01,0.003,0.001";
  dirac->add_option("--radii", radii_s, "cone fit radii");

  auto* berry = app.add_subcommand("berry", "Berry phase around a circle");
  add_model_options(berry, mo);
  std::string center = "kstar";
  double radius = 0.25;
  int points = 64, band = 0;
  berry->add_option("--center", center, "kstar, -kstar, 0 or k1,k2");
  berry->add_option("--radius", radius, "circle radius in kappa units");
  berry->add_option("--points", points, "contour points");
  berry->add_option("--band", band, "band index, 0-based");

  auto* persist = app.add_subcommand("persist", "cone tracking under a symmetry-breaking perturbation");
  add_model_options(persist, mo);
  std::string edges_s = "3,0,-1,1,1", kept_s = "F", eps_s = "0,0.05,0.1,0.15,0.2", seed_s = "kstar";
  persist->add_option("--perturb", edges_s, "perturbation edges u,v,n1,n2,m separated by ';'");
  persist->add_option("--kept", kept_s, "F, Vbar or none");
  persist->add_option("--eps", eps_s, "epsilon list");
  persist->add_option("--seed", seed_s, "starting cone location");
  persist->add_option("--band", band, "lower band of the cone, 0-based");

  auto* planewave = app.add_subcommand("planewave", "plane-wave model of -Laplacian + eps q");
  std::string pot_path, flags_s = "R,V,F,FV,real", shells_s = "0,1,0.7,-0.45", sweep_s = "0,0.01,0.02,0.05,0.1,0.2";
  int cutoff = 6;
  double six_eps = 0.05;
  planewave->add_option("--potential", pot_path, "rows g1 g2 re im");
  planewave->add_option("--flags", flags_s, "declared potential symmetries");
  planewave->add_option("--shells", shells_s, "q0,s1,s2,s3 shell values when no file is given");
  planewave->add_option("--eps", sweep_s, "epsilon list");
  planewave->add_option("--cutoff", cutoff, "index cutoff");
  planewave->add_option("--sixfold-eps", six_eps, "epsilon for the k = 0 splitting");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail_with(Error(ErrorCode::ParseError, e.what()));
  }

  try {
    if (threads <= 0)
      if (const char* env = std::getenv("HEXCONE_THREADS")) threads = std::atoi(env);
    if (threads > 0) omp_set_num_threads(threads);

    const fs::path out(out_dir);
    ojson config;

    if (bands->parsed()) {
      config["command"] = "bands";
      const Model m = load(mo, config);
      const BlochOperator H = assemble(m.graph);
      GridSpec spec;
      if (!path.empty()) {
        std::vector<Quasimomentum> corners;
        std::stringstream ss(path);
        std::string tok;
        while (std::getline(ss, tok, ';')) corners.push_back(point(tok));
        spec = GridSpec::polyline(corners, pps);
        config["path"] = path;
        config["pps"] = pps;
      } else {
        spec = GridSpec::uniform_grid(grid);
        config["grid"] = grid;
      }
      const std::string csv = bands_csv(sweep(H, spec), config);
      write_file(out / "bands.csv", csv);
      std::cout << (out / "bands.csv").string() << "\n";
      return 0;
    }

    if (quotient->parsed()) {
      config["command"] = "quotient";
      const Model m = load(mo, config);
      const BlochOperator H = assemble(m.graph);
      const Quasimomentum k0 = point(at);
      config["at"] = at;
      const RotationDecomposition d = decompose(H, m.require("R"), k0);
      ojson doc;
      doc["config"] = config;
      doc["decomposition"] = to_json(d);
      const SymmetryAction* sx = extra.empty() ? first_of(m, {"Vbar", "F"}) : &m.require(extra);
      if (sx) {
        doc["extra"] = sx->name;
        doc["isospectrality"] = to_json(check_isospectrality(d, H, *sx));
      }
      doc["census"] = to_json(multiplicity_census(d));
      if (auto c = rotation_center_vertex(m.require("R"))) doc["suppression"] = suppression_check(d, c);
      emit(out / "quotient.json", doc);
      return 0;
    }

    if (dirac->parsed()) {
      config["command"] = "dirac";
      const Model m = load(mo, config);
      const BlochOperator H = assemble(m.graph);
      ConeFitOptions fo;
      fo.radii = num_list(radii_s);
      config["radii"] = fo.radii;
      ojson doc;
      doc["config"] = config;
      doc["points"] = ojson::array();
      const std::pair<const char*, Quasimomentum> fixed[] = {{"kstar", kstar()}, {"-kstar", -kstar()}, {"0", {0.0, 0.0}}};
      for (const auto& [name, k0] : fixed) {
        ojson pj;
        pj["name"] = name;
        pj["k0"] = to_json(k0);
        pj["cones"] = ojson::array();
        for (const Cluster& c : clusters_at(H, k0)) {
          if (c.multiplicity < 2) continue;
          const ConeReport rep = classify(H, k0, m.require("R"), c.lambda);
          ojson cj;
          cj["report"] = to_json(rep);
          if (rep.classification != ConeClass::indeterminate) cj["fit"] = to_json(cone_fit(H, k0, c.lambda, fo, &rep));
          pj["cones"].push_back(cj);
        }
        doc["points"].push_back(pj);
      }
      emit(out / "dirac.json", doc);
      return 0;
    }

    if (berry->parsed()) {
      config["command"] = "berry";
      const Model m = load(mo, config);
      const BlochOperator H = assemble(m.graph);
      config["center"] = center;
      config["radius"] = radius;
      config["points"] = points;
      config["band"] = band;
      const Contour c = circle_contour(point(center), radius, points, band);
      ojson doc;
      doc["config"] = config;
      doc["overlap_product"] = to_json(berry_phase(H, c));
      if (const SymmetryAction* vb = m.find("Vbar")) {
        doc["vbar_fixed"] = to_json(berry_phase_vbar(H, c, *vb));
        doc["vbar_holonomy"] = vbar_holonomy(H, c, *vb);
      }
      emit(out / "berry.json", doc);
      return 0;
    }

    if (persist->parsed()) {
      config["command"] = "persist";
      const Model m = load(mo, config);
      const BlochOperator H = assemble(m.graph);
      const BlochOperator W = assemble(edge_perturbation(m.graph, parse_edges(edges_s)));
      KeptSymmetry kept = KeptSymmetry::none;
      const SymmetryAction* sk = nullptr;
      if (kept_s == "F") {
        kept = KeptSymmetry::F;
        sk = &m.require("F");
      } else if (kept_s == "Vbar") {
        kept = KeptSymmetry::Vbar;
        sk = &m.require("Vbar");
      } else if (kept_s != "none") {
        throw Error(ErrorCode::InvalidArgument, "--kept must be F, Vbar or none");
      }
      const std::vector<double> eps = num_list(eps_s);
      config["perturb"] = edges_s;
      config["kept"] = kept_s;
      config["eps"] = eps;
      config["seed"] = seed_s;
      config["band"] = band;
      const PersistenceTrace tr = persistence_scan(H, W, eps, point(seed_s), band, kept, sk, m.require("R"));
      write_file(out / "persistence.csv", persistence_csv(tr, config));
      std::cout << persistence_csv(tr, config);
      if (kept == KeptSymmetry::F) {
        ojson doc;
        doc["config"] = config;
        doc["unperturbed"] = to_json(parity_crossing(H, *sk));
        doc["perturbed"] = to_json(parity_crossing(H + W.scaled(eps.back()), *sk));
        write_file(out / "crossing.json", dump_json(doc) + "\n");
      }
      return 0;
    }

    if (planewave->parsed()) {
      config["command"] = "planewave";
      const unsigned flags = flags_from_string(flags_s);
      FourierPotential q;
      if (!pot_path.empty()) {
        q = FourierPotential::from_rows(parse_potential_rows(read_file(pot_path)), flags);
        config["potential"] = pot_path;
        config["flags"] = flags_s;
      } else {
        const std::vector<double> s = num_list(shells_s);
        if (s.size() != 4) throw Error(ErrorCode::ParseError, "--shells needs four values");
        q = shell_potential(s[0], s[1], s[2], s[3]);
        config["shells"] = s;
      }
      const std::vector<double> eps = num_list(sweep_s);
      config["eps"] = eps;
      config["cutoff"] = cutoff;
      config["sixfold_eps"] = six_eps;
      ojson doc;
      doc["config"] = config;
      doc["separation_integral"] = ojson::array({separation_integral(q).real(), separation_integral(q).imag()});
      const PureLaplacianAlpha a = alpha_pure_laplacian(cutoff);
      doc["pure_laplacian"] = {{"alpha_k", ojson::array({a.alpha_k.real(), a.alpha_k.imag()})},
                               {"alpha_kappa", ojson::array({a.alpha_kappa.real(), a.alpha_kappa.imag()})},
                               {"triple_multiplicity", a.triple_multiplicity}};
      doc["sweep"] = ojson::array();
      for (const EpsilonReport& r : epsilon_sweep(q, eps, cutoff)) doc["sweep"].push_back(to_json(r));
      if ((flags & (kFlagR | kFlagV | kFlagF | kFlagReal)) == (kFlagR | kFlagV | kFlagF | kFlagReal))
        doc["sixfold"] = to_json(sixfold_splitting(q, six_eps, cutoff));
      emit(out / "planewave.json", doc);
      return 0;
    }
  } catch (const Error& e) {
    return fail_with(e);
  } catch (const std::exception& e) {
    return fail_with(Error(ErrorCode::InvalidArgument, e.what()));
  }
  return 0;
}
