#include "g2q/fm.hpp"

#include <limits>
#include <map>
#include <stdexcept>
#include <utility>

#include "g2q/errors.hpp"
#include "g2q/sl2.hpp"

namespace g2q {

namespace {

Sl2Monomial node_part(const Monomial& m, int node) {
  std::vector<Sl2Monomial::Entry> entries;
  for (const auto& e : m.entries()) {
    if (e.key.node == node) entries.push_back({e.key.shift, e.exp});
  }
  return Sl2Monomial::from_sorted_entries(std::move(entries));
}

// Per-monomial bookkeeping: closed multiplicity, how much each node has
// contributed through its expansions, and the A-degree from the head.
struct Rec {
  long long mult = 0;
  std::array<long long, 2> received{{0, 0}};
  int depth = 0;
};

long long checked_add(long long a, long long b) {
  long long r;
  if (__builtin_add_overflow(a, b, &r)) {
    throw std::overflow_error("character multiplicity overflow");
  }
  return r;
}

// One expansion term of a node part: the product of corrected A^{-1}
// factors it contributes, and how many of them there are.
struct Lift {
  Monomial factor;
  int a_count = 0;
};

std::vector<std::vector<Lift>> expansion_lifts(const Sl2Monomial& part,
                                               int node, int h) {
  std::vector<std::vector<Lift>> lists;
  for (const Str& st : decompose_strings(part, h)) {
    std::vector<Lift> lifts;
    for (const StringTerm& term : string_character_terms(st, h)) {
      Lift lift;
      for (int v : term.a_indices) {
        lift.factor = lift.factor * Monomial::a_monomial(node, v).inverse();
        ++lift.a_count;
      }
      lifts.push_back(std::move(lift));
    }
    lists.push_back(std::move(lifts));
  }
  return lists;
}

}  // namespace

QPolynomial fm_qcharacter(const Monomial& m_plus, const FmCaps& caps) {
  if (!m_plus.is_dominant()) {
    throw std::invalid_argument("head monomial must be dominant");
  }

  std::unordered_map<Monomial, Rec, MonomialHash> state;
  std::map<int, std::vector<Monomial>> frontier;  // pending, keyed by depth
  state.emplace(m_plus, Rec{1, {{0, 0}}, 0});
  frontier[0].push_back(m_plus);

  while (!frontier.empty()) {
    auto level_it = frontier.begin();
    const int depth = level_it->first;
    std::vector<Monomial> level = std::move(level_it->second);
    frontier.erase(level_it);

    // Descendants land strictly deeper, so one pass settles a level; the
    // loop re-runs until no node finds fresh multiplicity, as the closure
    // rule is stated.
    bool changed = true;
    while (changed) {
      changed = false;
      for (const Monomial& m : level) {
        for (int node = 1; node <= 2; ++node) {
          const int h = kNodeLength[node];
          Sl2Monomial part = node_part(m, node);
          if (!part.is_dominant()) continue;
          long long fresh;
          {
            const Rec& rec = state.at(m);
            fresh = rec.mult - rec.received[node - 1];
          }
          if (fresh <= 0) continue;
          changed = true;
          // The expansion's head term is m itself: record the node's
          // contribution to m before generating descendants.
          {
            Rec& rec = state.at(m);
            rec.received[node - 1] = checked_add(rec.received[node - 1], fresh);
          }
          if (part.is_identity()) continue;  // trivial expansion

          std::vector<std::vector<Lift>> lists =
              expansion_lifts(part, node, h);
          std::vector<std::size_t> idx(lists.size(), 0);
          while (true) {
            // Advance the odometer; the all-zero tuple (the head) is skipped.
            std::size_t pos = 0;
            while (pos < lists.size()) {
              if (++idx[pos] < lists[pos].size()) break;
              idx[pos] = 0;
              ++pos;
            }
            if (pos == lists.size()) break;  // wrapped around: done

            Monomial desc = m;
            long long depth_new = depth;
            for (std::size_t si = 0; si < lists.size(); ++si) {
              const Lift& lift = lists[si][idx[si]];
              desc = desc * lift.factor;
              depth_new += lift.a_count;
            }
            auto it = state.find(desc);
            if (it == state.end()) {
              if (depth_new > caps.max_depth) {
                throw CapExceededError("expansion depth " +
                                       std::to_string(depth_new) +
                                       " exceeds the configured maximum");
              }
              if (desc.is_dominant()) {
                throw NotSpecialError("second dominant monomial generated: " +
                                      desc.str());
              }
              it = state
                       .emplace(desc,
                                Rec{0, {{0, 0}}, static_cast<int>(depth_new)})
                       .first;
              if (state.size() > caps.max_terms) {
                throw CapExceededError(
                    "term count exceeds the configured maximum");
              }
              frontier[static_cast<int>(depth_new)].push_back(desc);
            } else if (it->second.depth != depth_new) {
              // The A-monomials are multiplicatively independent, so every
              // route to the same monomial uses the same number of factors.
              throw InconsistentError("conflicting depths for " + desc.str());
            }
            Rec& r = it->second;
            r.received[node - 1] = checked_add(r.received[node - 1], fresh);
            if (r.received[node - 1] > r.mult) r.mult = r.received[node - 1];
          }
        }
      }
    }
  }

  std::vector<QPolynomial::Term> terms;
  terms.reserve(state.size());
  for (auto& [m, rec] : state) terms.push_back({m, BigInt(rec.mult)});
  QPolynomial result = QPolynomial::from_terms(std::move(terms));

  for (int node = 1; node <= 2; ++node) {
    if (!peel_characters(beta(result, node), kNodeLength[node])) {
      throw InconsistentError(
          "node-" + std::to_string(node) +
          " projection is not a nonnegative combination of characters");
    }
  }
  return result;
}

ValidationReport validate_character(const QPolynomial& p) {
  ValidationReport rep;
  for (const auto& t : dominant_terms(p)) rep.dominant.push_back(t.m);
  for (int node = 1; node <= 2; ++node) {
    rep.peel_ok[node - 1] =
        peel_characters(beta(p, node), kNodeLength[node]).has_value();
  }
  if (rep.special()) {
    const Monomial& head = rep.dominant.front();
    rep.cone_ok = true;
    rep.right_negative_ok = true;
    for (const auto& t : p.terms()) {
      if (!leq(t.m, head)) rep.cone_ok = false;
      if (!(t.m == head) && !t.m.is_right_negative()) {
        rep.right_negative_ok = false;
      }
    }
  }
  return rep;
}

QPolynomial CharacterCache::qchar(const Monomial& m_plus, const FmCaps& caps) {
  if (m_plus.is_identity()) return QPolynomial::one();
  int min_shift = std::numeric_limits<int>::max();
  for (const auto& e : m_plus.entries()) {
    min_shift = std::min(min_shift, e.key.shift);
  }
  Monomial key = m_plus.shifted(-min_shift);
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = memo_.find(key);
    if (it != memo_.end()) return apply_shift(it->second, min_shift);
  }
  QPolynomial computed = fm_qcharacter(key, caps);
  std::lock_guard<std::mutex> lock(mu_);
  auto [it, inserted] = memo_.emplace(key, std::move(computed));
  return apply_shift(it->second, min_shift);
}

std::size_t CharacterCache::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return memo_.size();
}

}  // namespace g2q
