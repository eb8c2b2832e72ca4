#include "hexcone/crystal.hpp"
#include "hexcone/generator.hpp"

#include <doctest.h>

using namespace hexcone;

namespace {

Model sixcell(double q1 = std::sqrt(3.0), double q2 = 0.0, double r = std::sqrt(7.0)) {
  return build_preset("sixcell", {{"q1", q1}, {"q2", q2}, {"r", r}});
}

}  // namespace

TEST_SUITE("crystal") {

TEST_CASE("presets carry validated symmetries") {
  const Model h = build_preset("honeycomb", {{"q", 0.0}});
  for (const char* n : {"R", "F", "V", "C", "Vbar"}) REQUIRE(h.find(n));
  const Model s = sixcell();
  for (const char* n : {"R", "F", "C"}) REQUIRE(s.find(n));
  CHECK_FALSE(s.find("Vbar"));
  CHECK(sixcell(0.5, 0.5, 2.0).find("Vbar"));
  for (const Model* m : {&h, &s})
    for (const SymmetryAction& a : m->actions) CHECK(validate_symmetry(m->graph, a).passed());
}

TEST_CASE("preset diagonal equals the vertex potential") {
  const Model s = sixcell(1.5, -0.5, 2.0);
  // stored potential plus weighted degree
  for (const Vertex& v : s.graph.vertices)
    CHECK(v.potential + s.graph.weighted_degree(v.id) == doctest::Approx(v.id % 2 == 0 ? 1.5 : -0.5));
}

TEST_CASE("unknown preset") {
  CHECK_THROWS_AS(build_preset("kagome", {}), Error);
  try {
    build_preset("kagome", {});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownPreset);
  }
}

TEST_CASE("malformed actions are rejected") {
  const Model s = sixcell();
  SymmetryAction a = s.require("R");
  a.permutation[0] = a.permutation[1];
  try {
    validate_symmetry(s.graph, a);
    FAIL("expected MalformedAction");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MalformedAction);
  }
  a = s.require("R");
  a.permutation.pop_back();
  CHECK_THROWS_AS(validate_symmetry(s.graph, a), Error);
}

TEST_CASE("validation detects a broken weight") {
  Model s = sixcell();
  s.graph.edges[0].weight = 1.3;
  const ValidationReport r = validate_symmetry(s.graph, s.require("R"));
  CHECK_FALSE(r.passed());
  CHECK(r.summary().find("R") != std::string::npos);
}

TEST_CASE("composition and inverse") {
  const Model s = sixcell();
  const SymmetryAction& R = s.require("R");
  const SymmetryAction I = compose_actions(R, inverse_action(R));
  for (int v = 0; v < I.size(); ++v) {
    CHECK(I.permutation[v] == v);
    CHECK(I.shifts[v].is_zero());
  }
  const SymmetryAction R3 = compose_actions(R, compose_actions(R, R));
  for (int v = 0; v < R3.size(); ++v) {
    CHECK(R3.permutation[v] == v);
    CHECK(R3.shifts[v].is_zero());
  }
  CHECK((R3.point_matrix - Mat2::Identity()).norm() < 1e-14);
  const SymmetryAction RF = compose_actions(R, s.require("F"));
  CHECK(validate_symmetry(s.graph, RF).passed());
}

TEST_CASE("model JSON round trip") {
  const Model s = sixcell(1.25, 0.5, 2.5);
  const std::string text = save_model(s);
  const Model back = load_model(text);
  CHECK(same_structure(s.graph, back.graph));
  CHECK(back.actions.size() == s.actions.size());
  CHECK(save_model(back) == text);
}

TEST_CASE("model JSON errors name their location") {
  try {
    load_model("{\"vertices\": [ {\"id\": 0, \"xi1\": 0, \"xi2\": 0, \"q\": 0, \"z\": 1} ]}");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(std::string(e.what()).find("vertices[0].z") != std::string::npos);
  }
  try {
    load_model("{\n  \"vertices\": [\n  oops ]}");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("declared symmetry that fails validation") {
  std::string text = save_model(sixcell());
  // break the spoke weight of the first spoke
  const auto pos = text.find("\"m\": 2.6457513110645907");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 24, "\"m\": 2.5");
  try {
    load_model(text);
    FAIL("expected a validation failure");
  } catch (const ValidationFailure& e) {
    CHECK(e.code() == ErrorCode::SymmetryValidationError);
    CHECK_FALSE(e.report().passed());
  }
}

TEST_CASE("rotation centre vertex") {
  CHECK_FALSE(rotation_center_vertex(sixcell().require("R")));
  std::mt19937_64 rng(7);
  GeneratorOptions opt;
  opt.center_vertex = true;
  const Model m = random_symmetric_model(SymmetryGroup::R_F, rng, opt);
  CHECK(rotation_center_vertex(m.require("R")).has_value());
}

TEST_CASE("random models are invariant under their declared actions") {
  std::mt19937_64 rng(11);
  for (SymmetryGroup g : {SymmetryGroup::R_F, SymmetryGroup::R_V, SymmetryGroup::R_FV})
    for (int i = 0; i < 5; ++i) {
      const Model m = random_symmetric_model(g, rng);
      CHECK(m.graph.size() <= 12);
      for (const SymmetryAction& a : m.actions) CHECK(validate_symmetry(m.graph, a).passed());
    }
}

TEST_CASE("edge perturbation keeps the vertex set") {
  const Model s = sixcell();
  const PeriodicGraph w = edge_perturbation(s.graph, {{3, 0, {-1, 1}, 1.0}});
  CHECK(w.size() == 6);
  CHECK(w.edges.size() == 1);
  for (const Vertex& v : w.vertices) CHECK(v.potential == 0.0);
  CHECK(validate_symmetry(w, s.require("F")).passed());
  CHECK_FALSE(validate_symmetry(w, s.require("R")).passed());
}

}
