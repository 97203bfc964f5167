#pragma once

#include <array>
#include <cstddef>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "g2q/monomial.hpp"
#include "g2q/polynomial.hpp"

namespace g2q {

// Hard limits for a single character computation. Exceeding a cap throws
// CapExceededError; the algorithm never returns a truncated answer.
struct FmCaps {
  int max_depth = 200;             // A^{-1} factors from the head
  std::size_t max_terms = 5'000'000;  // distinct monomials
};

// Frenkel-Mukhin algorithm: the q-character of the simple module with
// dominant highest monomial m_plus, for the type-G2 variable conventions of
// this library. Descends from the head by node-local string expansions,
// processing monomials by their distance (number of A^{-1} factors) from the
// head and closing each multiplicity to the maximum contributed by either
// node. Throws NotSpecialError if a second dominant monomial appears (the
// algorithm only applies to special modules), CapExceededError on cap hits,
// and InconsistentError if the computed polynomial fails the final per-node
// string-decomposition validation.
QPolynomial fm_qcharacter(const Monomial& m_plus, const FmCaps& caps = {});

// Post-hoc certificate for a candidate character polynomial.
struct ValidationReport {
  std::vector<Monomial> dominant;  // dominant monomials, canonical order
  std::array<bool, 2> peel_ok{};   // node-1 / node-2 projections peel cleanly
  bool cone_ok = false;            // every monomial sits under the head in leq
  bool right_negative_ok = false;  // all non-head terms right-negative
  bool special() const { return dominant.size() == 1; }
  bool all_ok() const {
    return special() && peel_ok[0] && peel_ok[1] && cone_ok &&
           right_negative_ok;
  }
};
ValidationReport validate_character(const QPolynomial& p);

// Shift-normalized memo for q-characters: computing chi(m) once serves every
// spectral translate of m. Thread-safe; concurrent misses may compute the
// same character redundantly but insertion is single-writer.
class CharacterCache {
 public:
  QPolynomial qchar(const Monomial& m_plus, const FmCaps& caps = {});
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::unordered_map<Monomial, QPolynomial, MonomialHash> memo_;
};

}  // namespace g2q
