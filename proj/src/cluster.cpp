#include "g2q/cluster.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

#include <json.hpp>

#include "g2q/errors.hpp"

namespace g2q {

std::string VertexId::str() const {
  return "(" + std::to_string(node) + "," + std::to_string(shift) + ")";
}

bool Quiver::has_vertex(const VertexId& v) const {
  return std::find(vertices.begin(), vertices.end(), v) != vertices.end();
}

bool Quiver::is_frozen(const VertexId& v) const { return frozen.count(v) != 0; }

int Quiver::multiplicity(const VertexId& a, const VertexId& b) const {
  auto it = arrows.find({a, b});
  return it == arrows.end() ? 0 : it->second;
}

void Quiver::add_vertex(const VertexId& v, bool freeze) {
  if (has_vertex(v)) throw std::logic_error("duplicate vertex " + v.str());
  vertices.push_back(v);
  if (freeze) frozen.insert(v);
}

void Quiver::add_arrow(const VertexId& a, const VertexId& b, int mult) {
  if (mult <= 0) throw std::logic_error("arrow multiplicity must be positive");
  if (a == b) throw std::logic_error("loop at " + a.str());
  if (!has_vertex(a) || !has_vertex(b)) {
    throw std::logic_error("arrow endpoint missing: " + a.str() + " -> " +
                           b.str());
  }
  arrows[{a, b}] += mult;
}

void Quiver::check() const {
  for (const auto& [key, mult] : arrows) {
    const auto& [a, b] = key;
    if (mult <= 0) {
      throw std::logic_error("non-positive arrow " + a.str() + " -> " +
                             b.str());
    }
    if (a == b) throw std::logic_error("loop at " + a.str());
    if (!has_vertex(a) || !has_vertex(b)) {
      throw std::logic_error("arrow endpoint missing: " + a.str() + " -> " +
                             b.str());
    }
    if (arrows.count({b, a})) {
      throw std::logic_error("two-cycle between " + a.str() + " and " +
                             b.str());
    }
  }
  for (const auto& v : frozen) {
    if (!has_vertex(v)) {
      throw std::logic_error("frozen vertex missing: " + v.str());
    }
  }
}

namespace {

// Shared mutation core. A non-null `known_payload` replaces the exchange
// division in value mode: the caller has already certified that the payload
// satisfies the exchange identity, so it is installed directly.
Seed mutate_core(const Seed& seed, const VertexId& v,
                 const std::string& new_label, MutationRelation* rel_out,
                 const FmCaps& caps, const QPolynomial* known_payload) {
  const Quiver& q = seed.quiver;
  if (!q.has_vertex(v)) {
    throw std::invalid_argument("mutation at unknown vertex " + v.str());
  }
  if (q.is_frozen(v)) {
    throw std::invalid_argument("mutation at frozen vertex " + v.str());
  }

  std::vector<std::pair<VertexId, int>> in, out;
  for (const auto& [key, mult] : q.arrows) {
    if (key.second == v) in.emplace_back(key.first, mult);
    if (key.first == v) out.emplace_back(key.second, mult);
  }

  auto label_of = [&](const VertexId& u) {
    auto it = seed.labels.find(u);
    return it == seed.labels.end() ? u.str() : it->second;
  };
  MutationRelation rel;
  rel.vertex = v;
  for (const auto& [u, mult] : in) {
    for (int i = 0; i < mult; ++i) rel.in_labels.push_back(label_of(u));
  }
  for (const auto& [u, mult] : out) {
    for (int i = 0; i < mult; ++i) rel.out_labels.push_back(label_of(u));
  }
  rel.denominator = label_of(v);

  Seed next = seed;

  // Composite arrows: one a -> b per pair of arrows a -> v -> b.
  for (const auto& [a, m1] : in) {
    for (const auto& [b, m2] : out) {
      if (a == b) {
        throw std::logic_error("mutation at " + v.str() +
                               " would create a loop at " + a.str());
      }
      next.quiver.arrows[{a, b}] += m1 * m2;
    }
  }
  // Reverse every arrow at v.
  for (const auto& [u, mult] : in) {
    next.quiver.arrows.erase({u, v});
    next.quiver.arrows[{v, u}] += mult;
  }
  for (const auto& [u, mult] : out) {
    next.quiver.arrows.erase({v, u});
    next.quiver.arrows[{u, v}] += mult;
  }
  // Cancel opposite pairs (all such pairs involve a composite just added,
  // since the quiver had no two-cycles before the mutation).
  std::vector<std::pair<VertexId, VertexId>> pairs;
  for (const auto& [key, mult] : next.quiver.arrows) {
    if (key.first < key.second) pairs.push_back(key);
  }
  for (const auto& key : pairs) {
    auto fwd = next.quiver.arrows.find(key);
    auto bwd = next.quiver.arrows.find({key.second, key.first});
    if (fwd == next.quiver.arrows.end() || bwd == next.quiver.arrows.end()) {
      continue;
    }
    int c = std::min(fwd->second, bwd->second);
    fwd->second -= c;
    bwd->second -= c;
    if (fwd->second == 0) next.quiver.arrows.erase(fwd);
    if (bwd->second == 0) next.quiver.arrows.erase(bwd);
  }

  next.labels[v] = new_label;
  if (seed.mode == PayloadMode::Value) {
    auto itv = seed.values.find(v);
    if (itv == seed.values.end()) {
      throw std::logic_error("value-mode seed has no payload at " + v.str());
    }
    if (known_payload != nullptr) {
      next.values[v] = *known_payload;
    } else {
      QPolynomial pin = QPolynomial::one();
      QPolynomial pout = QPolynomial::one();
      for (const auto& [u, mult] : in) {
        for (int i = 0; i < mult; ++i) {
          pin = mul_capped(pin, seed.values.at(u), caps.max_terms);
        }
      }
      for (const auto& [u, mult] : out) {
        for (int i = 0; i < mult; ++i) {
          pout = mul_capped(pout, seed.values.at(u), caps.max_terms);
        }
      }
      QPolynomial num = pin + pout;
      if (num.term_count() > caps.max_terms) {
        throw CapExceededError("exchange numerator grew past the term budget");
      }
      auto quot = exact_div(num, itv->second, caps.max_terms);
      if (!quot) {
        throw InexactDivisionError("exchange numerator at " + v.str() +
                                   " is not divisible by the current payload");
      }
      next.values[v] = std::move(*quot);
    }
  }

  next.quiver.check();
  if (rel_out) *rel_out = std::move(rel);
  return next;
}

}  // namespace

Seed mutate(const Seed& seed, const VertexId& v, const std::string& new_label,
            MutationRelation* rel_out, const FmCaps& caps) {
  return mutate_core(seed, v, new_label, rel_out, caps, nullptr);
}

Seed g2_initial_seed(int rows, PayloadMode mode, CharacterCache* cache,
                     const FmCaps& caps) {
  if (rows < 2) {
    throw std::invalid_argument("initial seed needs at least two rows");
  }
  if (mode == PayloadMode::Value && cache == nullptr) {
    throw std::invalid_argument("value mode requires a character cache");
  }
  Seed seed;
  seed.mode = mode;
  for (int j = 1; j <= 3; ++j) {
    for (int n = 1; n <= rows + 1; ++n) {
      VertexId v{1, -6 * n + 7 - 2 * j};
      seed.quiver.add_vertex(v, n == rows + 1);
      seed.labels[v] = ModuleLabel{LabelKind::T, n, 0, v.shift}.str();
    }
  }
  for (int m = 1; m <= 3 * rows + 3; ++m) {
    VertexId v{2, -2 * m + 2};
    seed.quiver.add_vertex(v, m == 3 * rows + 3);
    seed.labels[v] = ModuleLabel{LabelKind::T, 0, m, -2 * m + 1}.str();
  }
  auto maybe_arrow = [&seed](const VertexId& a, const VertexId& b) {
    if (seed.quiver.has_vertex(a) && seed.quiver.has_vertex(b)) {
      seed.quiver.add_arrow(a, b);
    }
  };
  for (const VertexId v : seed.quiver.vertices) {
    if (v.node == 1) {
      maybe_arrow(v, {1, v.shift + 6});
      maybe_arrow(v, {2, v.shift - 5});
    } else {
      maybe_arrow(v, {2, v.shift + 2});
      maybe_arrow(v, {1, v.shift - 1});
    }
  }
  seed.quiver.check();
  if (mode == PayloadMode::Value) {
    for (const auto& [v, label] : seed.labels) {
      auto lab = parse_module_label(label);
      seed.values.emplace(v, cache->qchar(highest_monomial(*lab), caps));
    }
  }
  return seed;
}

namespace {

// Payload factor lists of the exchange at v: arrows into / out of v, with
// multiplicity, resolved to the current payloads.
std::pair<std::vector<const QPolynomial*>, std::vector<const QPolynomial*>>
exchange_payloads(const Seed& seed, const VertexId& v) {
  std::vector<const QPolynomial*> in, out;
  for (const auto& [key, mult] : seed.quiver.arrows) {
    for (int i = 0; i < mult; ++i) {
      if (key.second == v) in.push_back(&seed.values.at(key.first));
      if (key.first == v) out.push_back(&seed.values.at(key.second));
    }
  }
  return {std::move(in), std::move(out)};
}

// Reduces a factor list to one product pair by multiplying everything except
// the largest factor together (the accompanying factors in these exchanges
// are small, so the pre-product stays cheap).
std::pair<QPolynomial, QPolynomial> as_product_pair(
    std::vector<const QPolynomial*> fs, const FmCaps& caps) {
  if (fs.empty()) return {QPolynomial::one(), QPolynomial::one()};
  std::sort(fs.begin(), fs.end(), [](const auto* a, const auto* b) {
    return a->term_count() < b->term_count();
  });
  QPolynomial rest = QPolynomial::one();
  for (std::size_t i = 0; i + 1 < fs.size(); ++i) {
    rest = mul_capped(rest, *fs[i], caps.max_terms);
  }
  return {std::move(rest), *fs.back()};
}

// Pair count of the dominating multiplication in a factor list.
std::size_t pair_bound(const std::vector<const QPolynomial*>& fs) {
  std::size_t s1 = 1, s2 = 1;
  for (const auto* f : fs) {
    std::size_t n = f->term_count();
    if (n >= s1) {
      s2 = s1;
      s1 = n;
    } else if (n > s2) {
      s2 = n;
    }
  }
  return s1 * s2;
}

}  // namespace

Trace run_columns(const ColumnPlan& plan, PayloadMode mode,
                  CharacterCache* cache, const FmCaps& caps,
                  std::size_t graded_pair_threshold) {
  for (int c : plan.columns) {
    if (c < 1 || c > 4) {
      throw std::invalid_argument("plan column out of range: " +
                                  std::to_string(c));
    }
  }
  Seed seed = g2_initial_seed(plan.rows, mode, cache, caps);
  Trace trace;
  std::map<int, int> sweeps;
  std::size_t index = 0;
  for (int c : plan.columns) {
    int r = ++sweeps[c];
    if (c <= 3) {
      int limit = plan.rows + 1 - r;
      if (limit < 1) {
        throw std::invalid_argument("column " + std::to_string(c) +
                                    " swept past the truncation depth");
      }
      for (int k = 1; k <= limit; ++k) {
        VertexId v{1, -6 * k + 7 - 2 * c};
        ModuleLabel lab{LabelKind::T, k, 3 * (r - 1) + c,
                        -6 * k - 6 * r + 7 - 2 * c};
        MutationRelation rel;
        if (mode == PayloadMode::Value) {
          QPolynomial want = cache->qchar(highest_monomial(lab), caps);
          auto [in_fs, out_fs] = exchange_payloads(seed, v);
          const QPolynomial& old = seed.values.at(v);
          std::size_t est = std::max({want.term_count() * old.term_count(),
                                      pair_bound(in_fs), pair_bound(out_fs)});
          if (est > graded_pair_threshold) {
            // Oversized exchange: certify want * old == in + out slice-wise
            // (equivalent to dividing, since the ring has no zero divisors)
            // and install the certified payload.
            ProductSumComparison cmp = compare_product_sums(
                {{want, old}},
                {as_product_pair(std::move(in_fs), caps),
                 as_product_pair(std::move(out_fs), caps)},
                caps.max_terms);
            if (!cmp.equal) {
              throw InconsistentError(
                  "mutation " + std::to_string(index) + " at " + v.str() +
                  " produced a payload that is not the q-character of " +
                  lab.str());
            }
            seed = mutate_core(seed, v, lab.str(), &rel, caps, &want);
          } else {
            seed = mutate(seed, v, lab.str(), &rel, caps);
            if (!(seed.values.at(v) == want)) {
              throw InconsistentError(
                  "mutation " + std::to_string(index) + " at " + v.str() +
                  " produced a payload that is not the q-character of " +
                  lab.str());
            }
          }
        } else {
          seed = mutate(seed, v, lab.str(), &rel, caps);
        }
        trace.records.push_back({index++, v, std::move(rel), lab.str()});
      }
    } else {
      int limit = 3 * plan.rows + 3 - r;
      if (limit < 1) {
        throw std::invalid_argument(
            "column 4 swept past the truncation depth");
      }
      for (int m = 1; m <= limit; ++m) {
        VertexId v{2, -2 * m + 2};
        MutationRelation rel;
        seed = mutate(seed, v, "?" + v.str() + ":" + std::to_string(r),
                      &rel, caps);
        trace.records.push_back({index++, v, std::move(rel), ""});
      }
    }
  }
  trace.seed = std::move(seed);
  return trace;
}

namespace {

MatchRow match_record(const MutationRecord& rec) {
  MatchRow row;
  row.index = rec.index;
  row.produced_label = rec.produced_label;
  auto lab = parse_module_label(rec.produced_label);
  if (!lab || lab->kind != LabelKind::T) {
    row.detail = "record carries no module label";
    return row;
  }
  EquationInstance eq;
  eq.k = lab->k;
  eq.s = lab->s;
  eq.dual = false;
  if (lab->l >= 1 && lab->l <= 3) {
    eq.family = EqFamily::Eq1;
    eq.l = lab->l;
  } else if (lab->l >= 4) {
    eq.family = EqFamily::Eq2;
    eq.l = lab->l - 3;
  } else {
    row.detail = "label " + rec.produced_label + " has no equation shape";
    return row;
  }
  EquationFactors factors;
  try {
    factors = equation_factors(eq);
  } catch (const std::invalid_argument& e) {
    row.detail = e.what();
    return row;
  }
  row.equation = eq;
  if (rec.relation.denominator != factors.lhs2.str()) {
    row.detail = "denominator " + rec.relation.denominator + " != " +
                 factors.lhs2.str();
    return row;
  }
  std::vector<std::string> sum1 = {factors.rhs1a.str(), factors.rhs1b.str()};
  std::vector<std::string> sum2;
  for (const auto& l : factors.rhs2) sum2.push_back(l.str());
  std::vector<std::string> ins = rec.relation.in_labels;
  std::vector<std::string> outs = rec.relation.out_labels;
  std::sort(sum1.begin(), sum1.end());
  std::sort(sum2.begin(), sum2.end());
  std::sort(ins.begin(), ins.end());
  std::sort(outs.begin(), outs.end());
  if ((ins == sum1 && outs == sum2) || (ins == sum2 && outs == sum1)) {
    row.ok = true;
  } else {
    row.detail = "numerator factors do not realize " + eq.str();
  }
  return row;
}

nlohmann::json vertex_json(const VertexId& v) {
  return nlohmann::json::array({v.node, v.shift});
}

}  // namespace

MatchReport match_msystem(const Trace& trace) {
  MatchReport rep;
  for (const auto& rec : trace.records) {
    rep.rows.push_back(match_record(rec));
    rep.complete = rep.complete && rep.rows.back().ok;
  }
  return rep;
}

std::string MatchReport::json() const {
  nlohmann::json j;
  j["complete"] = complete;
  auto arr = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json r;
    r["index"] = row.index;
    r["produced_label"] = row.produced_label;
    if (row.equation) {
      r["equation"] = {{"family", row.equation->family == EqFamily::Eq1 ? 1 : 2},
                       {"k", row.equation->k},
                       {"l", row.equation->l},
                       {"s", row.equation->s},
                       {"dual", row.equation->dual}};
    } else {
      r["equation"] = nullptr;
    }
    r["ok"] = row.ok;
    if (!row.detail.empty()) r["detail"] = row.detail;
    arr.push_back(std::move(r));
  }
  j["rows"] = std::move(arr);
  return j.dump();
}

std::string seed_json(const Seed& seed) {
  nlohmann::json j;
  j["mode"] = seed.mode == PayloadMode::Value ? "value" : "symbolic";
  std::vector<VertexId> order = seed.quiver.vertices;
  std::sort(order.begin(), order.end(), [](const VertexId& a, const VertexId& b) {
    if (a.node != b.node) return a.node < b.node;
    return a.shift > b.shift;
  });
  auto verts = nlohmann::json::array();
  for (const auto& v : order) {
    nlohmann::json entry;
    entry["id"] = vertex_json(v);
    auto it = seed.labels.find(v);
    entry["label"] = it == seed.labels.end() ? "" : it->second;
    entry["frozen"] = seed.quiver.is_frozen(v);
    verts.push_back(std::move(entry));
  }
  j["vertices"] = std::move(verts);
  auto arrs = nlohmann::json::array();
  for (const auto& [key, mult] : seed.quiver.arrows) {
    arrs.push_back(nlohmann::json::array(
        {vertex_json(key.first), vertex_json(key.second), mult}));
  }
  j["arrows"] = std::move(arrs);
  return j.dump();
}

std::string trace_json(const Trace& trace) {
  nlohmann::json j;
  auto arr = nlohmann::json::array();
  for (const auto& rec : trace.records) {
    nlohmann::json r;
    r["index"] = rec.index;
    r["vertex"] = vertex_json(rec.vertex);
    r["relation"] = {{"in", rec.relation.in_labels},
                     {"out", rec.relation.out_labels},
                     {"denominator", rec.relation.denominator}};
    r["produced_label"] = rec.produced_label;
    arr.push_back(std::move(r));
  }
  j["records"] = std::move(arr);
  return j.dump();
}

}  // namespace g2q
