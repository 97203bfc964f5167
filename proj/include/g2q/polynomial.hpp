#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "g2q/bigint.hpp"
#include "g2q/monomial.hpp"
#include "g2q/sl2.hpp"

namespace g2q {

// Element of the ring ZP: a finite integer combination of Monomials, kept
// as a term vector strictly descending in the monomial order with no zero
// coefficients. Equality is structural; immutable value semantics.
class QPolynomial {
 public:
  struct Term {
    Monomial m;
    BigInt c;
    friend bool operator==(const Term&, const Term&) = default;
  };

  QPolynomial() = default;  // zero
  static QPolynomial one();
  static QPolynomial term(Monomial m, BigInt c = 1);
  static QPolynomial from_terms(std::vector<Term> terms);  // sorts & merges
  // O(n) construction from terms already strictly descending with nonzero
  // coefficients; throws std::logic_error if the invariant does not hold.
  static QPolynomial from_descending_terms(std::vector<Term> terms);

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t term_count() const { return terms_.size(); }
  const BigInt* coeff(const Monomial& m) const;  // nullptr when absent

  friend QPolynomial operator+(const QPolynomial& a, const QPolynomial& b);
  friend QPolynomial operator-(const QPolynomial& a, const QPolynomial& b);
  friend QPolynomial operator*(const QPolynomial& a, const QPolynomial& b);
  friend bool operator==(const QPolynomial& a, const QPolynomial& b) = default;

  // Termwise product with a single monomial (order-preserving, cheap).
  QPolynomial times_monomial(const Monomial& m) const;

  std::string str() const;   // c1*mono1 + c2*mono2 + ... (unit coefficients omitted)
  std::string json() const;  // {"terms":[{"c":"<decimal>","m":[[i,s,e],...]},...]}

 private:
  std::vector<Term> terms_;
};

// Product with a distinct-term budget; throws CapExceededError beyond it.
QPolynomial mul_capped(const QPolynomial& a, const QPolynomial& b,
                       std::size_t max_terms);

// Exact quotient p / q in ZP when it exists, std::nullopt otherwise.
// Iterated leading-term elimination under the fixed monomial order, after a
// cheap necessary condition (the coefficient sums must divide in Z). Throws
// std::invalid_argument on a zero divisor and CapExceededError when the
// running remainder outgrows `max_terms` distinct monomials or the step
// budget is exhausted (pathological non-divisible inputs diverge instead of
// terminating, so the budgets keep the decision procedure bounded).
std::optional<QPolynomial> exact_div(
    const QPolynomial& p, const QPolynomial& q,
    std::size_t max_terms = std::numeric_limits<std::size_t>::max());

// Exact equality test for sums of pairwise products, evaluated without
// materializing either side. Both sums are accumulated one weight slice at a
// time (the fundamental-weight pair is additive under multiplication, so a
// product term's slice is known from its factors), which bounds peak memory
// by the largest single-weight slice instead of the full expansion. Distinct
// term counts come out exactly; on inequality the largest differing monomial
// is reported with both coefficients. Throws CapExceededError when one slice
// outgrows `max_slice_terms` distinct monomials.
struct ProductSumComparison {
  struct Mismatch {
    Monomial m;
    BigInt lhs_coeff;
    BigInt rhs_coeff;
  };
  bool equal = false;
  std::size_t lhs_terms = 0;  // distinct monomials of the left sum
  std::size_t rhs_terms = 0;  // distinct monomials of the right sum
  std::optional<Mismatch> mismatch;
};

ProductSumComparison compare_product_sums(
    const std::vector<std::pair<QPolynomial, QPolynomial>>& lhs,
    const std::vector<std::pair<QPolynomial, QPolynomial>>& rhs,
    std::size_t max_slice_terms = std::numeric_limits<std::size_t>::max());

// Pair count above which product identities are checked through
// compare_product_sums rather than materialized polynomials.
inline constexpr std::size_t kGradedPairThreshold = 16'000'000;

// Dominant terms of a sum of pairwise products, in canonical (descending)
// order, accumulated slice-wise like compare_product_sums. A dominant
// monomial has componentwise non-negative weight, so only those slices are
// scanned; memory stays bounded by the largest scanned slice.
std::vector<QPolynomial::Term> dominant_product_terms(
    const std::vector<std::pair<QPolynomial, QPolynomial>>& products,
    std::size_t max_slice_terms = std::numeric_limits<std::size_t>::max());

// Coefficient of `m` in a*b without materializing the product: sums
// c_a * coeff(b, m / m_a) over the terms of a (the smaller factor should be
// passed first; the other side is a binary-search lookup per term).
BigInt product_coeff(const QPolynomial& a, const QPolynomial& b,
                     const Monomial& m);

// All terms with dominant monomial, in canonical (descending) order.
std::vector<QPolynomial::Term> dominant_terms(const QPolynomial& p);

// Ring homomorphism ZP -> Z[Y_s^{+-1}] keeping only node-`node` exponents;
// shifts stay on the q-grid (use half-step r_node for string work).
Sl2Polynomial beta(const QPolynomial& p, int node);

QPolynomial apply_shift(const QPolynomial& p, int d);
QPolynomial apply_iota(const QPolynomial& p);

// Two-variable Laurent polynomial keyed by fundamental-weight pairs
// (y1, y2); terms strictly descending in lexicographic weight order.
class WeightPolynomial {
 public:
  struct Term {
    std::pair<long long, long long> w;
    BigInt c;
    friend bool operator==(const Term&, const Term&) = default;
  };

  WeightPolynomial() = default;
  static WeightPolynomial one();
  static WeightPolynomial from_terms(std::vector<Term> terms);

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  BigInt dimension() const;  // value at y1 = y2 = 1

  friend WeightPolynomial operator+(const WeightPolynomial& a,
                                    const WeightPolynomial& b);
  friend WeightPolynomial operator*(const WeightPolynomial& a,
                                    const WeightPolynomial& b);
  friend bool operator==(const WeightPolynomial& a,
                         const WeightPolynomial& b) = default;

  std::string str() const;

 private:
  std::vector<Term> terms_;
};

WeightPolynomial restrict_to_Uqg(const QPolynomial& p);

}  // namespace g2q
