#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "g2q/fm.hpp"
#include "g2q/minaff.hpp"
#include "g2q/polynomial.hpp"

namespace g2q {

// A quiver vertex, named after the spectral-parameter grid it sits on:
// node 1 vertices carry odd shifts, node 2 vertices even shifts.
struct VertexId {
  int node = 1;
  int shift = 0;
  auto operator<=>(const VertexId&) const = default;
  std::string str() const;  // "(1,-7)"
};

// A finite quiver with frozen vertices. Arrows are stored as a multiset:
// arrows[{a,b}] is the multiplicity of a -> b (absent means zero). The
// structure keeps no loops and no two-cycles; mutation preserves this.
struct Quiver {
  std::vector<VertexId> vertices;  // insertion order (used for output)
  std::map<std::pair<VertexId, VertexId>, int> arrows;
  std::set<VertexId> frozen;

  bool has_vertex(const VertexId& v) const;
  bool is_frozen(const VertexId& v) const;
  int multiplicity(const VertexId& a, const VertexId& b) const;
  void add_vertex(const VertexId& v, bool freeze = false);
  void add_arrow(const VertexId& a, const VertexId& b, int mult = 1);

  // Throws std::logic_error if a loop, a two-cycle, a non-positive
  // multiplicity, or an arrow at a missing vertex is present.
  void check() const;

  friend bool operator==(const Quiver&, const Quiver&) = default;
};

enum class PayloadMode { Symbolic, Value };

// A seed: a quiver whose vertices carry labels and, in value mode,
// Laurent-polynomial payloads.
struct Seed {
  Quiver quiver;
  PayloadMode mode = PayloadMode::Symbolic;
  std::map<VertexId, std::string> labels;
  std::map<VertexId, QPolynomial> values;  // populated only in value mode
};

// The exchange relation realized by one mutation, recorded as label lists:
//   new * denominator = prod(in_labels) + prod(out_labels)
// where in/out are the arrows into/out of the mutated vertex before the
// mutation (labels repeated per arrow multiplicity).
struct MutationRelation {
  VertexId vertex;
  std::vector<std::string> in_labels;
  std::vector<std::string> out_labels;
  std::string denominator;
};

// Mutate `seed` at `v`, labeling the produced cluster variable `new_label`.
//   - arrows: composite arrows a->b for each pair a->v->b (multiplicities
//     multiply), then all arrows at v reverse, then opposite pairs cancel.
//   - value mode: payload(v) becomes (prod(in) + prod(out)) / old payload,
//     which must divide exactly (InexactDivisionError otherwise); the
//     products and the division run under caps.max_terms and throw
//     CapExceededError past it.
// Throws std::invalid_argument for a missing or frozen vertex. If rel_out
// is non-null it receives the realized exchange relation.
Seed mutate(const Seed& seed, const VertexId& v, const std::string& new_label,
            MutationRelation* rel_out = nullptr, const FmCaps& caps = {});

// The initial seed for the G2 q-character quiver, truncated to `rows`
// mutable rows per node-1 column. Node-1 vertices form three columns
//   column j (j = 1,2,3): shifts -6n + 7 - 2j, n = 1..rows+1
// and node 2 forms one column of shifts -2m + 2, m = 1..3*rows+3. The
// deepest row of each column is frozen. Initial labels are Kirillov-
// Reshetikhin: node-1 column j row n carries T:n,0,(-6n+7-2j) and node-2
// row m carries T:0,m,(-2m+1). In value mode every payload is the
// q-character of its label's highest monomial, computed through `cache`.
// Requires rows >= 2; value mode requires a cache.
Seed g2_initial_seed(int rows, PayloadMode mode, CharacterCache* cache = nullptr,
                     const FmCaps& caps = {});

// A mutation plan: sweep the listed columns in order (entries 1..4), on a
// seed with `rows` mutable rows. Sweeping a column mutates it top-down;
// each full sweep of a column consumes one row of its safe region, so a
// column's r-th sweep stops one row higher than its (r-1)-th.
struct ColumnPlan {
  std::vector<int> columns;
  int rows = 2;
};

struct MutationRecord {
  std::size_t index = 0;  // position in the trace, starting at 0
  VertexId vertex;
  MutationRelation relation;
  std::string produced_label;  // empty for node-2 (column 4) mutations
};

struct Trace {
  Seed seed;  // final seed
  std::vector<MutationRecord> records;
};

// Execute a plan from the initial seed. Node-1 mutations are labeled by
// the sweep grid: column j's r-th sweep writes T:k,3(r-1)+j,(-6k-6r+7-2j)
// at row k. In value mode each labeled mutation's payload is checked
// against the q-character of its label (InconsistentError on mismatch,
// naming the vertex and the mutation index); exchanges whose products
// exceed `graded_pair_threshold` pairs certify the payload through the
// slice-wise identity check instead of materializing the division, which
// is equivalent in a ring without zero divisors. Node-2 sweeps are
// executed generically (always by exchange division, under the term
// budget) and their records carry no produced label.
Trace run_columns(const ColumnPlan& plan, PayloadMode mode,
                  CharacterCache* cache = nullptr, const FmCaps& caps = {},
                  std::size_t graded_pair_threshold = kGradedPairThreshold);

// Match every record of a trace against the T-system equations: a
// produced label T:k,l,s names equation family 1 (l <= 3) or family 2
// (l >= 4, with l-index l-3), and the record's relation must realize that
// equation factor-for-factor. `complete` is true iff every record matched.
struct MatchRow {
  std::size_t index = 0;
  std::string produced_label;
  std::optional<EquationInstance> equation;
  bool ok = false;
  std::string detail;  // why the row failed, empty when ok
};

struct MatchReport {
  std::vector<MatchRow> rows;
  bool complete = true;
  std::string json() const;
};

MatchReport match_msystem(const Trace& trace);

// JSON forms.
std::string seed_json(const Seed& seed);
std::string trace_json(const Trace& trace);

}  // namespace g2q
