#include <doctest.h>

#include <json.hpp>
#include <stdexcept>
#include <string>
#include <vector>

#include "g2q/cluster.hpp"
#include "g2q/errors.hpp"
#include "g2q/fm.hpp"
#include "g2q/minaff.hpp"
#include "g2q/monomial.hpp"

using namespace g2q;

namespace {

Monomial mono(const std::string& text) { return Monomial::parse(text); }

VertexId v1(int shift) { return {1, shift}; }
VertexId v2(int shift) { return {2, shift}; }

}  // namespace

TEST_CASE("initial seed layout") {
  Seed seed = g2_initial_seed(3, PayloadMode::Symbolic);
  CHECK(seed.quiver.vertices.size() == 24);
  seed.quiver.check();

  // Node-1 columns: shifts -6n + 7 - 2j, j = 1..3, n = 1..4.
  CHECK(seed.quiver.has_vertex(v1(-1)));
  CHECK(seed.quiver.has_vertex(v1(-23)));
  CHECK(!seed.quiver.has_vertex(v1(1)));
  // Node-2 column: shifts 0, -2, ..., -22.
  CHECK(seed.quiver.has_vertex(v2(0)));
  CHECK(seed.quiver.has_vertex(v2(-22)));
  CHECK(!seed.quiver.has_vertex(v2(2)));

  // The deepest row of each column is frozen, nothing else.
  CHECK(seed.quiver.frozen ==
        std::set<VertexId>{v1(-19), v1(-21), v1(-23), v2(-22)});

  CHECK(seed.labels.at(v1(-1)) == "T:1,0,-1");
  CHECK(seed.labels.at(v1(-9)) == "T:2,0,-9");
  CHECK(seed.labels.at(v2(0)) == "T:0,1,-1");
  CHECK(seed.labels.at(v2(-22)) == "T:0,12,-23");

  // Arrow families, including both orientations between the nodes.
  CHECK(seed.quiver.multiplicity(v1(-7), v1(-1)) == 1);
  CHECK(seed.quiver.multiplicity(v2(0), v2(-2)) == 0);
  CHECK(seed.quiver.multiplicity(v2(-2), v2(0)) == 1);
  CHECK(seed.quiver.multiplicity(v2(0), v1(-1)) == 1);
  CHECK(seed.quiver.multiplicity(v1(-1), v2(-6)) == 1);

  CHECK_THROWS_AS(g2_initial_seed(1, PayloadMode::Symbolic),
                  std::invalid_argument);
  CHECK_THROWS_AS(g2_initial_seed(3, PayloadMode::Value),
                  std::invalid_argument);
}

TEST_CASE("first mutation realizes the smallest exchange relation") {
  CharacterCache cache;
  Seed seed = g2_initial_seed(2, PayloadMode::Value, &cache);
  MutationRelation rel;
  Seed next = mutate(seed, v1(-1), "T:1,1,-7", &rel);

  CHECK(rel.vertex == v1(-1));
  std::vector<std::string> in = rel.in_labels;
  std::sort(in.begin(), in.end());
  CHECK(in == std::vector<std::string>{"T:0,1,-1", "T:2,0,-7"});
  CHECK(rel.out_labels == std::vector<std::string>{"T:0,4,-7"});
  CHECK(rel.denominator == "T:1,0,-1");

  CHECK(next.labels.at(v1(-1)) == "T:1,1,-7");
  CHECK(next.values.at(v1(-1)) == cache.qchar(mono("1_-7 2_0")));

  // Arrow updates: reversals at the mutated vertex...
  CHECK(next.quiver.multiplicity(v1(-1), v1(-7)) == 1);
  CHECK(next.quiver.multiplicity(v1(-1), v2(0)) == 1);
  CHECK(next.quiver.multiplicity(v2(-6), v1(-1)) == 1);
  // ...one surviving composite...
  CHECK(next.quiver.multiplicity(v2(0), v2(-6)) == 1);
  // ...and one composite cancelled against a pre-existing opposite.
  CHECK(next.quiver.multiplicity(v1(-7), v2(-6)) == 0);
  CHECK(next.quiver.multiplicity(v2(-6), v1(-7)) == 0);
  next.quiver.check();
}

TEST_CASE("mutation is an involution") {
  // Arrow/label round-trip at arbitrary vertices (payload-free).
  Seed sym = g2_initial_seed(2, PayloadMode::Symbolic);
  for (const VertexId& v : {v1(-1), v1(-9), v2(-4)}) {
    Seed once = mutate(sym, v, "tmp");
    Seed twice = mutate(once, v, sym.labels.at(v));
    CHECK(twice.quiver == sym.quiver);
    CHECK(twice.labels == sym.labels);
  }

  // Value round-trip where the exchange realizes a known identity, so the
  // first division is exact: (in + out)/y' gives back y on the way down.
  CharacterCache cache;
  Seed seed = g2_initial_seed(2, PayloadMode::Value, &cache);
  for (const VertexId& v : {v1(-1), v2(0)}) {
    Seed once = mutate(seed, v, "tmp");
    Seed twice = mutate(once, v, seed.labels.at(v));
    CHECK(twice.quiver == seed.quiver);
    CHECK(twice.labels == seed.labels);
    CHECK(twice.values == seed.values);
  }
}

TEST_CASE("mutation rejects frozen and missing vertices") {
  Seed seed = g2_initial_seed(2, PayloadMode::Symbolic);
  CHECK_THROWS_AS(mutate(seed, v1(-17), "x"), std::invalid_argument);
  CHECK_THROWS_AS(mutate(seed, v1(99), "x"), std::invalid_argument);
}

TEST_CASE("composite arrows multiply multiplicities") {
  Quiver q;
  VertexId a{1, 1}, b{1, 3}, c{1, 5};
  q.add_vertex(a);
  q.add_vertex(b);
  q.add_vertex(c);
  q.add_arrow(a, b, 2);
  q.add_arrow(b, c);
  Seed seed{q, PayloadMode::Symbolic, {{a, "a"}, {b, "b"}, {c, "c"}}, {}};

  MutationRelation rel;
  Seed next = mutate(seed, b, "b'", &rel);
  CHECK(rel.in_labels == std::vector<std::string>{"a", "a"});
  CHECK(rel.out_labels == std::vector<std::string>{"c"});
  CHECK(rel.denominator == "b");
  CHECK(next.quiver.multiplicity(a, c) == 2);
  CHECK(next.quiver.multiplicity(b, a) == 2);
  CHECK(next.quiver.multiplicity(c, b) == 1);
  CHECK(next.quiver.multiplicity(a, b) == 0);
  CHECK(next.quiver.multiplicity(b, c) == 0);
  next.quiver.check();
}

TEST_CASE("column sweeps produce the T-system grid") {
  Trace tr = run_columns({{1, 1}, 3}, PayloadMode::Symbolic);
  REQUIRE(tr.records.size() == 5);
  std::vector<std::string> produced;
  for (const auto& r : tr.records) produced.push_back(r.produced_label);
  CHECK(produced == std::vector<std::string>{"T:1,1,-7", "T:2,1,-13",
                                             "T:3,1,-19", "T:1,4,-13",
                                             "T:2,4,-19"});
  // First sweep consumes the top rows; denominators are initial labels.
  CHECK(tr.records[0].relation.denominator == "T:1,0,-1");
  CHECK(tr.records[1].relation.denominator == "T:2,0,-7");
  CHECK(tr.records[3].relation.denominator == "T:1,1,-7");

  MatchReport match = match_msystem(tr);
  CHECK(match.complete);
  REQUIRE(match.rows.size() == 5);
  for (const auto& row : match.rows) CHECK(row.ok);
  REQUIRE(match.rows[0].equation.has_value());
  CHECK(*match.rows[0].equation == EquationInstance{EqFamily::Eq1, 1, 1, -7});
  REQUIRE(match.rows[3].equation.has_value());
  CHECK(*match.rows[3].equation == EquationInstance{EqFamily::Eq2, 1, 1, -13});
}

TEST_CASE("single sweep of the middle column") {
  Trace tr = run_columns({{2}, 3}, PayloadMode::Symbolic);
  REQUIRE(tr.records.size() == 3);
  CHECK(tr.records[0].produced_label == "T:1,2,-9");
  CHECK(tr.records[2].produced_label == "T:3,2,-21");
  for (const auto& r : tr.records) {
    CHECK(r.relation.denominator.substr(0, 2) == "T:");
    CHECK(r.relation.denominator.find(",0,") != std::string::npos);
  }
  CHECK(match_msystem(tr).complete);
}

TEST_CASE("node-2 sweeps run unlabeled") {
  Trace tr = run_columns({{4}, 2}, PayloadMode::Symbolic);
  REQUIRE(tr.records.size() == 8);
  for (const auto& r : tr.records) {
    CHECK(r.produced_label.empty());
    CHECK(r.vertex.node == 2);
  }
  MatchReport match = match_msystem(tr);
  CHECK(!match.complete);
  for (const auto& row : match.rows) CHECK(!row.equation.has_value());

  // In value mode the first node-2 exchange is the short-node T-system
  // step: the new value at (2,0) is the character of T:0,1,-3.
  CharacterCache cache;
  Seed seed = g2_initial_seed(2, PayloadMode::Value, &cache);
  Seed next = mutate(seed, v2(0), "step");
  CHECK(next.values.at(v2(0)) ==
        cache.qchar(highest_monomial({LabelKind::T, 0, 1, -3})));

  // Deeper node-2 exchanges keep dividing exactly but their products grow
  // geometrically; a finite budget turns the blow-up into a clean abort.
  FmCaps tight;
  tight.max_terms = 50'000;
  CHECK_THROWS_AS(run_columns({{4}, 2}, PayloadMode::Value, &cache, tight),
                  CapExceededError);
}

TEST_CASE("plan validation") {
  CHECK_THROWS_AS(run_columns({{5}, 3}, PayloadMode::Symbolic),
                  std::invalid_argument);
  CHECK_THROWS_AS(run_columns({{0}, 3}, PayloadMode::Symbolic),
                  std::invalid_argument);
  // rows = 3 supports at most three sweeps of one column.
  CHECK_THROWS_AS(run_columns({{1, 1, 1, 1}, 3}, PayloadMode::Symbolic),
                  std::invalid_argument);
  CHECK_THROWS_AS(run_columns({{1}, 1}, PayloadMode::Symbolic),
                  std::invalid_argument);
}

TEST_CASE("JSON serializations parse and carry the layout") {
  Seed seed = g2_initial_seed(2, PayloadMode::Symbolic);
  nlohmann::json js = nlohmann::json::parse(seed_json(seed));
  CHECK(js["mode"] == "symbolic");
  REQUIRE(js["vertices"].is_array());
  CHECK(js["vertices"].size() == 18);
  // Sorted node-major, shift descending: first entry is (1,-1).
  CHECK(js["vertices"][0]["id"] == nlohmann::json({1, -1}));
  CHECK(js["vertices"][0]["label"] == "T:1,0,-1");
  CHECK(js["vertices"][0]["frozen"] == false);
  REQUIRE(js["arrows"].is_array());
  CHECK(js["arrows"].size() == seed.quiver.arrows.size());

  Trace tr = run_columns({{1}, 2}, PayloadMode::Symbolic);
  nlohmann::json tj = nlohmann::json::parse(trace_json(tr));
  REQUIRE(tj["records"].is_array());
  CHECK(tj["records"].size() == 2);
  CHECK(tj["records"][0]["produced_label"] == "T:1,1,-7");
  CHECK(tj["records"][0]["relation"]["denominator"] == "T:1,0,-1");

  nlohmann::json mj = nlohmann::json::parse(match_msystem(tr).json());
  CHECK(mj["complete"] == true);
  CHECK(mj["rows"].size() == 2);
  CHECK(mj["rows"][0]["equation"]["family"] == 1);
}

TEST_CASE("value sweeps agree across exchange and slice-certified routes") {
  CharacterCache cache;
  // Threshold 1 certifies every labeled payload through the slice-wise
  // identity check; the default threshold keeps this plan on division.
  Trace direct = run_columns({{1, 1}, 3}, PayloadMode::Value, &cache);
  Trace sliced = run_columns({{1, 1}, 3}, PayloadMode::Value, &cache, {}, 1);
  REQUIRE(sliced.records.size() == direct.records.size());
  for (std::size_t i = 0; i < direct.records.size(); ++i) {
    CHECK(sliced.records[i].vertex == direct.records[i].vertex);
    CHECK(sliced.records[i].produced_label == direct.records[i].produced_label);
  }
  for (const auto& [v, val] : direct.seed.values) {
    REQUIRE(sliced.seed.values.count(v) == 1);
    CHECK(sliced.seed.values.at(v) == val);
  }
  CHECK(match_msystem(sliced).complete);
}
