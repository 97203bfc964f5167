#pragma once

#include <optional>
#include <string>
#include <vector>

#include "g2q/fm.hpp"
#include "g2q/monomial.hpp"
#include "g2q/polynomial.hpp"

namespace g2q {

// Module labels T_{k,l}^{(s)} (kind T) and their duals (kind Tdual).
enum class LabelKind { T, Tdual };

struct ModuleLabel {
  LabelKind kind = LabelKind::T;
  int k = 0;
  int l = 0;
  int s = 0;
  std::string str() const;  // "T:k,l,s" / "Td:k,l,s"
  friend bool operator==(const ModuleLabel&, const ModuleLabel&) = default;
};

// Highest monomial of the labeled module:
//   T:     (prod_{i<k} 1_{s+6i}) (prod_{j<l} 2_{s+6k+2j+1})
//   Tdual: (prod_{i<l} 2_{-s-6k-2i-1}) (prod_{j<k} 1_{-s-6j})
Monomial highest_monomial(const ModuleLabel& lab);

// Inverse of ModuleLabel::str(): accepts "T:k,l,s" and "Td:k,l,s".
std::optional<ModuleLabel> parse_module_label(const std::string& text);

// The q-character of the labeled module. Tdual characters are the iota
// image of the matching T character; with cross_check set, the dual head is
// also run through the algorithm directly and the two results compared.
QPolynomial label_character(const ModuleLabel& lab, CharacterCache& cache,
                            const FmCaps& caps = {}, bool cross_check = false);

enum class EqFamily { Eq1, Eq2 };

// One instance of the two-family equation system (dual = mirrored labels):
//   Eq1 (l in 1..3):  [T_{k,l}^{(s)}][T_{k,0}^{(s+6)}]
//                       = [T_{k+1,0}^{(s)}][T_{k-1,l}^{(s+6)}] + [T_{0,3k+l}^{(s)}]
//   Eq2 (l >= 1):     [T_{k,l+3}^{(s)}][T_{k,l}^{(s+6)}]
//                       = [T_{k+1,l}^{(s)}][T_{k-1,l+3}^{(s+6)}]
//                         + [T_{0,l}^{(s+6k+6)}][T_{0,3k+l+3}^{(s)}]
struct EquationInstance {
  EqFamily family = EqFamily::Eq1;
  int k = 1;
  int l = 1;
  int s = 0;
  bool dual = false;
  std::string str() const;
  friend bool operator==(const EquationInstance&,
                         const EquationInstance&) = default;
};

struct EquationFactors {
  ModuleLabel lhs1, lhs2;                // left product
  ModuleLabel rhs1a, rhs1b;              // first summand product
  std::vector<ModuleLabel> rhs2;         // second summand (one or two labels)
};
EquationFactors equation_factors(const EquationInstance& eq);

struct VerifyReport {
  EquationInstance eq;
  bool pass = false;
  std::size_t lhs_terms = 0;  // terms of the left product
  std::size_t rhs_terms = 0;  // terms of the right sum
  std::vector<std::pair<std::string, std::size_t>> factor_terms;
  struct Mismatch {
    Monomial m;       // largest differing monomial
    BigInt lhs_coeff;
    BigInt rhs_coeff;
  };
  std::optional<Mismatch> mismatch;
  std::string json() const;
};
// Verifies the identity exactly. Products whose pair count stays at or below
// `graded_pair_threshold` are materialized and compared as polynomials;
// larger ones go through compare_product_sums, which checks the same
// equality one weight slice at a time so memory tracks the largest slice
// rather than the full expansion. Both routes fill the same report fields
// with exact values.
VerifyReport verify_equation(
    const EquationInstance& eq, CharacterCache& cache, const FmCaps& caps = {},
    std::size_t graded_pair_threshold = kGradedPairThreshold);

// Dominant monomials of the three equation sides, computed from the actual
// polynomials and checked against the closed forms
//   M = head(lhs1) * head(lhs2),   M_r = M * prod_{i<r} A_{1, s+6k-6i-3}^{-1}
// with lhs = {M, M_1..M_k}, rhs1 = {M, M_1..M_{k-1}}, rhs2 = {M_k}, all with
// coefficient 1. A mismatch throws InconsistentError; dual instances are not
// supported (the closed forms describe the primal system).
struct DominantClassification {
  std::vector<Monomial> lhs, rhs1, rhs2;  // canonical (descending) order
  std::vector<Monomial> chain;            // M, M_1, ..., M_k
};
DominantClassification classify_dominant(const EquationInstance& eq,
                                         CharacterCache& cache,
                                         const FmCaps& caps = {});

// Witness monomials n_r = M_r * A_{1, s+6k-6r+3}^{-1} (r = 1..k-1): each must
// be absent from the first-summand product and reachable from M_r inside the
// node-1 string character of M_r's node-1 part. Primal instances only.
struct WitnessReport {
  struct Entry {
    int r = 0;
    Monomial n;
    bool absent_from_product = false;
    bool sl2_reachable = false;
  };
  std::vector<Entry> entries;
  bool pass = true;
};
WitnessReport irreducibility_witnesses(const EquationInstance& eq,
                                       CharacterCache& cache,
                                       const FmCaps& caps = {});

// The equation instance pushed through restrict_to_Uqg: the identity must
// hold in the two-variable weight ring; dimensions are the values at y=1.
struct MSystemReport {
  EquationInstance eq;
  bool pass = false;
  WeightPolynomial lhs, rhs;
  BigInt lhs_dimension, rhs_dimension;
};
MSystemReport verify_m_system(const EquationInstance& eq,
                              CharacterCache& cache, const FmCaps& caps = {});

}  // namespace g2q
