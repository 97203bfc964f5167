#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace g2q {

// Cartan data for G2. Node 1 is the long node (r_1 = 3, q_1 = q^3), node 2
// the short one (r_2 = 1); B = diag(3,1)*C is symmetric.
inline constexpr int kCartan[2][2] = {{2, -1}, {-3, 2}};
inline constexpr int kNodeLength[3] = {0, 3, 1};  // indexed by node id

struct VarKey {
  int node;   // 1 or 2
  int shift;  // integer power of q relative to the fixed anchor
  friend constexpr auto operator<=>(const VarKey&, const VarKey&) = default;
};

// Laurent monomial in the variables Y_{i, a q^s} on a single q-orbit:
// a sparse exponent map keyed by (node, shift), entries sorted by key,
// no zero exponents stored. Immutable value type.
class Monomial {
 public:
  struct Entry {
    VarKey key;
    int exp;
    friend constexpr bool operator==(const Entry&, const Entry&) = default;
  };

  Monomial() = default;  // identity

  static Monomial variable(int node, int shift, int exp = 1);
  // Corrected simple-root monomials:
  //   A_{1,s} = 1_{s-3} 1_{s+3} 2_{s-2}^{-1} 2_s^{-1} 2_{s+2}^{-1}
  //   A_{2,s} = 2_{s-1} 2_{s+1} 1_s^{-1}
  // (the node-i spread is q^{+-r_i}; these are the forms consistent with the
  // fundamental q-characters, see tests).
  static Monomial a_monomial(int node, int shift);
  // Grammar: mono := factor (' ' factor)* | "1";
  //          factor := node '_' shift ('^' exp)? with optional braces
  // around shift/exp. Repeated variables multiply.
  static Monomial parse(std::string_view text);
  // Bulk constructor for callers that already hold canonical entries
  // (strictly key-sorted, nonzero exponents); validates and throws on abuse.
  static Monomial from_sorted_entries(std::vector<Entry> entries);

  bool is_identity() const { return entries_.empty(); }
  const std::vector<Entry>& entries() const { return entries_; }
  int exponent(int node, int shift) const;

  Monomial operator*(const Monomial& o) const;
  Monomial inverse() const;
  Monomial pow(int e) const;

  bool is_dominant() const;      // all exponents >= 0
  bool is_antidominant() const;  // all exponents <= 0
  // True iff every exponent at the maximal occupied shift is negative.
  // Throws std::invalid_argument on the identity.
  bool is_right_negative() const;

  // Fundamental-weight coordinates: componentwise exponent sum per node.
  std::pair<long long, long long> weight() const;
  Monomial shifted(int d) const;  // every (i, s) -> (i, s + d)
  Monomial iota() const;          // every (i, s, e) -> (i, 12 - s, -e)

  std::string str() const;

  // Total order compatible with multiplication: walk the union of keys in
  // (node, shift) order, reading missing exponents as 0; the first position
  // where exponents differ decides (larger exponent = larger monomial).
  // Returns <0, 0, >0.
  static int compare(const Monomial& a, const Monomial& b);
  friend bool operator==(const Monomial& a, const Monomial& b) {
    return a.entries_ == b.entries_;
  }
  friend bool operator!=(const Monomial& a, const Monomial& b) {
    return !(a == b);
  }
  friend bool operator<(const Monomial& a, const Monomial& b) {
    return compare(a, b) < 0;
  }

  std::size_t hash() const;

 private:
  std::vector<Entry> entries_;
};

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const { return m.hash(); }
};

inline std::pair<long long, long long> weight_of(const Monomial& m) {
  return m.weight();
}

// Exponent vector over the A-monomials: (i, s) -> exponent of A_{i,s}.
using ACoeffs = std::map<VarKey, long long>;

Monomial product_of_A(const ACoeffs& c);

// Unique integer solution of n = prod A_{i,s}^{c(i,s)} (the A's are
// multiplicatively independent), or absent if none exists.
std::optional<ACoeffs> factor_over_A_integral(const Monomial& n);
// As above but additionally requiring every exponent >= 0 (the Q+ cone).
std::optional<ACoeffs> factor_over_A(const Monomial& n);
// m <= m2 iff m2 * m^{-1} lies in the Q+ cone.
bool leq(const Monomial& m, const Monomial& m2);

}  // namespace g2q
