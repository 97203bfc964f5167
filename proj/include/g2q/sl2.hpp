#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "g2q/bigint.hpp"

namespace g2q {

// Laurent monomial in single-node variables Y_s (shift-keyed only). All
// string machinery takes a half-step h: strings step by 2h, and the root
// monomial at index v is A_v = Y_{v-h} Y_{v+h}. h = 1 is the standard sl2
// convention; node-i projections of G2 characters use h = r_i so shifts can
// stay on the common q-grid.
class Sl2Monomial {
 public:
  struct Entry {
    int shift;
    int exp;
    friend constexpr bool operator==(const Entry&, const Entry&) = default;
  };

  Sl2Monomial() = default;  // identity

  static Sl2Monomial variable(int shift, int exp = 1);
  static Sl2Monomial from_sorted_entries(std::vector<Entry> entries);

  bool is_identity() const { return entries_.empty(); }
  const std::vector<Entry>& entries() const { return entries_; }
  int exponent(int shift) const;

  Sl2Monomial operator*(const Sl2Monomial& o) const;
  Sl2Monomial inverse() const;

  bool is_dominant() const;

  std::string str() const;  // monomial grammar with the node omitted: Y_0 Y_{-2}^-1

  // Same multiplicative order rule as Monomial, on shift keys.
  static int compare(const Sl2Monomial& a, const Sl2Monomial& b);
  friend bool operator==(const Sl2Monomial& a, const Sl2Monomial& b) {
    return a.entries_ == b.entries_;
  }
  friend bool operator<(const Sl2Monomial& a, const Sl2Monomial& b) {
    return compare(a, b) < 0;
  }

  std::size_t hash() const;

 private:
  std::vector<Entry> entries_;
};

struct Sl2MonomialHash {
  std::size_t operator()(const Sl2Monomial& m) const { return m.hash(); }
};

// Z-combination of Sl2Monomials, strictly descending, no zero coefficients.
class Sl2Polynomial {
 public:
  struct Term {
    Sl2Monomial m;
    BigInt c;
    friend bool operator==(const Term&, const Term&) = default;
  };

  Sl2Polynomial() = default;  // zero
  static Sl2Polynomial one();
  static Sl2Polynomial term(Sl2Monomial m, BigInt c = 1);
  static Sl2Polynomial from_terms(std::vector<Term> terms);  // sorts & merges

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  const BigInt* coeff(const Sl2Monomial& m) const;

  friend Sl2Polynomial operator+(const Sl2Polynomial& a,
                                 const Sl2Polynomial& b);
  friend Sl2Polynomial operator-(const Sl2Polynomial& a,
                                 const Sl2Polynomial& b);
  friend Sl2Polynomial operator*(const Sl2Polynomial& a,
                                 const Sl2Polynomial& b);
  friend bool operator==(const Sl2Polynomial& a,
                         const Sl2Polynomial& b) = default;

  std::string str() const;

 private:
  std::vector<Term> terms_;
};

// String of `length` members centered at `center`:
// members(h) = {center + (length-1-2i)h : 0 <= i < length}.
struct Str {
  int center;
  int length;
  friend constexpr auto operator<=>(const Str&, const Str&) = default;
  std::vector<int> members(int h = 1) const;  // ascending
};

// Character term of a string module together with its descent witness
// (the A-indices whose inverses produce it from the head).
struct StringTerm {
  Sl2Monomial m;
  std::vector<int> a_indices;
};

// q-character of the length-k string module: k+1 terms, coefficient 1,
// term i = head * prod_{j<i} A^{-1}_{center + (length-2j)h}.
Sl2Polynomial string_character(const Str& st, int h = 1);
std::vector<StringTerm> string_character_terms(const Str& st, int h = 1);

// True iff one member set contains the other, or their union is not itself
// a string's member set (the blocking case: a strictly longer joint string).
bool in_general_position(const Str& s1, const Str& s2, int h = 1);

// The unique multiset of pairwise-general-position strings whose variable
// product is m. Requires m dominant and m != 1. Sorted by (center, length).
std::vector<Str> decompose_strings(const Sl2Monomial& m, int h = 1);

// Product of string characters over decompose_strings(m); m must be
// dominant (the identity yields 1).
Sl2Polynomial sl2_character(const Sl2Monomial& m, int h = 1);

// Greedy check that p is a nonnegative integer combination of sl2
// characters: repeatedly subtract c * sl2_character(m) at the maximal term
// m (which must be dominant with c > 0) until zero. Absent when blocked.
std::optional<std::vector<std::pair<Sl2Monomial, BigInt>>> peel_characters(
    const Sl2Polynomial& p, int h = 1);

}  // namespace g2q
