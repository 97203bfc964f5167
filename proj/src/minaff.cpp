#include "g2q/minaff.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include <json.hpp>

#include "g2q/errors.hpp"
#include "g2q/sl2.hpp"

namespace g2q {

std::string ModuleLabel::str() const {
  std::string out = kind == LabelKind::T ? "T:" : "Td:";
  out += std::to_string(k) + "," + std::to_string(l) + "," + std::to_string(s);
  return out;
}

Monomial highest_monomial(const ModuleLabel& lab) {
  if (lab.k < 0 || lab.l < 0) {
    throw std::invalid_argument("label indices must be nonnegative");
  }
  Monomial m;
  if (lab.kind == LabelKind::T) {
    for (int i = 0; i < lab.k; ++i) {
      m = m * Monomial::variable(1, lab.s + 6 * i);
    }
    for (int j = 0; j < lab.l; ++j) {
      m = m * Monomial::variable(2, lab.s + 6 * lab.k + 2 * j + 1);
    }
  } else {
    for (int i = 0; i < lab.l; ++i) {
      m = m * Monomial::variable(2, -lab.s - 6 * lab.k - 2 * i - 1);
    }
    for (int j = 0; j < lab.k; ++j) {
      m = m * Monomial::variable(1, -lab.s - 6 * j);
    }
  }
  return m;
}

std::optional<ModuleLabel> parse_module_label(const std::string& text) {
  ModuleLabel lab;
  std::size_t pos = 0;
  if (text.rfind("Td:", 0) == 0) {
    lab.kind = LabelKind::Tdual;
    pos = 3;
  } else if (text.rfind("T:", 0) == 0) {
    lab.kind = LabelKind::T;
    pos = 2;
  } else {
    return std::nullopt;
  }
  int* fields[3] = {&lab.k, &lab.l, &lab.s};
  for (int f = 0; f < 3; ++f) {
    if (f > 0) {
      if (pos >= text.size() || text[pos] != ',') return std::nullopt;
      ++pos;
    }
    std::size_t start = pos;
    if (pos < text.size() && text[pos] == '-') ++pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos == start || (text[start] == '-' && pos == start + 1)) return std::nullopt;
    try {
      *fields[f] = std::stoi(text.substr(start, pos - start));
    } catch (const std::out_of_range&) {
      return std::nullopt;
    }
  }
  if (pos != text.size()) return std::nullopt;
  if (lab.k < 0 || lab.l < 0) return std::nullopt;
  return lab;
}

QPolynomial label_character(const ModuleLabel& lab, CharacterCache& cache,
                            const FmCaps& caps, bool cross_check) {
  if (lab.kind == LabelKind::T) {
    return cache.qchar(highest_monomial(lab), caps);
  }
  ModuleLabel primal{LabelKind::T, lab.k, lab.l, lab.s};
  QPolynomial dual = apply_iota(cache.qchar(highest_monomial(primal), caps));
  if (cross_check) {
    QPolynomial direct = cache.qchar(highest_monomial(lab), caps);
    if (!(direct == dual)) {
      throw InconsistentError("direct dual character differs from the iota "
                              "image for " + lab.str());
    }
  }
  return dual;
}

std::string EquationInstance::str() const {
  std::string out = family == EqFamily::Eq1 ? "Eq1" : "Eq2";
  if (dual) out += "-dual";
  out += "(k=" + std::to_string(k) + ",l=" + std::to_string(l) +
         ",s=" + std::to_string(s) + ")";
  return out;
}

EquationFactors equation_factors(const EquationInstance& eq) {
  if (eq.k < 1) throw std::invalid_argument("equation requires k >= 1");
  LabelKind kind = eq.dual ? LabelKind::Tdual : LabelKind::T;
  auto lab = [kind](int k, int l, int s) { return ModuleLabel{kind, k, l, s}; };
  EquationFactors f;
  if (eq.family == EqFamily::Eq1) {
    if (eq.l < 1 || eq.l > 3) {
      throw std::invalid_argument("first-family equations require l in 1..3");
    }
    f.lhs1 = lab(eq.k, eq.l, eq.s);
    f.lhs2 = lab(eq.k, 0, eq.s + 6);
    f.rhs1a = lab(eq.k + 1, 0, eq.s);
    f.rhs1b = lab(eq.k - 1, eq.l, eq.s + 6);
    f.rhs2 = {lab(0, 3 * eq.k + eq.l, eq.s)};
  } else {
    if (eq.l < 1) {
      throw std::invalid_argument("second-family equations require l >= 1");
    }
    f.lhs1 = lab(eq.k, eq.l + 3, eq.s);
    f.lhs2 = lab(eq.k, eq.l, eq.s + 6);
    f.rhs1a = lab(eq.k + 1, eq.l, eq.s);
    f.rhs1b = lab(eq.k - 1, eq.l + 3, eq.s + 6);
    f.rhs2 = {lab(0, eq.l, eq.s + 6 * eq.k + 6),
              lab(0, 3 * eq.k + eq.l + 3, eq.s)};
  }
  return f;
}

VerifyReport verify_equation(const EquationInstance& eq, CharacterCache& cache,
                             const FmCaps& caps,
                             std::size_t graded_pair_threshold) {
  EquationFactors f = equation_factors(eq);
  VerifyReport rep;
  rep.eq = eq;

  // Materialize the factor characters (never the products) up front; both
  // verification routes share them and the per-factor counts.
  auto character = [&](const ModuleLabel& lab) {
    QPolynomial chi = label_character(lab, cache, caps);
    rep.factor_terms.push_back({lab.str(), chi.term_count()});
    return chi;
  };
  QPolynomial lhs1 = character(f.lhs1);
  QPolynomial lhs2 = character(f.lhs2);
  QPolynomial rhs1a = character(f.rhs1a);
  QPolynomial rhs1b = character(f.rhs1b);
  QPolynomial rhs2a = character(f.rhs2.at(0));
  QPolynomial rhs2b =
      f.rhs2.size() > 1 ? character(f.rhs2.at(1)) : QPolynomial::one();

  std::size_t max_pairs = std::max(
      {lhs1.term_count() * lhs2.term_count(),
       rhs1a.term_count() * rhs1b.term_count(),
       rhs2a.term_count() * rhs2b.term_count()});
  if (max_pairs > graded_pair_threshold) {
    ProductSumComparison cmp = compare_product_sums(
        {{std::move(lhs1), std::move(lhs2)}},
        {{std::move(rhs1a), std::move(rhs1b)},
         {std::move(rhs2a), std::move(rhs2b)}},
        caps.max_terms);
    rep.pass = cmp.equal;
    rep.lhs_terms = cmp.lhs_terms;
    rep.rhs_terms = cmp.rhs_terms;
    if (cmp.mismatch) {
      rep.mismatch = VerifyReport::Mismatch{cmp.mismatch->m,
                                            cmp.mismatch->lhs_coeff,
                                            cmp.mismatch->rhs_coeff};
    }
    return rep;
  }

  QPolynomial lhs = mul_capped(lhs1, lhs2, caps.max_terms);
  QPolynomial rhs = mul_capped(rhs1a, rhs1b, caps.max_terms) +
                    mul_capped(rhs2a, rhs2b, caps.max_terms);
  rep.lhs_terms = lhs.term_count();
  rep.rhs_terms = rhs.term_count();
  QPolynomial diff = lhs - rhs;
  rep.pass = diff.is_zero();
  if (!rep.pass) {
    const Monomial& m = diff.terms().front().m;
    const BigInt* lc = lhs.coeff(m);
    const BigInt* rc = rhs.coeff(m);
    rep.mismatch = VerifyReport::Mismatch{m, lc ? *lc : BigInt(0),
                                          rc ? *rc : BigInt(0)};
  }
  return rep;
}

std::string VerifyReport::json() const {
  nlohmann::json j;
  j["equation"] = {{"family", eq.family == EqFamily::Eq1 ? 1 : 2},
                   {"k", eq.k},
                   {"l", eq.l},
                   {"s", eq.s},
                   {"dual", eq.dual}};
  j["pass"] = pass;
  j["lhs_terms"] = lhs_terms;
  j["rhs_terms"] = rhs_terms;
  nlohmann::json factors = nlohmann::json::array();
  for (const auto& [label, count] : factor_terms) {
    factors.push_back({{"label", label}, {"terms", count}});
  }
  j["factors"] = factors;
  if (mismatch) {
    j["mismatch"] = {{"monomial", mismatch->m.str()},
                     {"lhs", mismatch->lhs_coeff.str()},
                     {"rhs", mismatch->rhs_coeff.str()}};
  }
  return j.dump();
}

namespace {

// M, M_1, ..., M_k of the closed-form dominant chain.
std::vector<Monomial> dominant_chain(const EquationInstance& eq,
                                     const EquationFactors& f) {
  std::vector<Monomial> chain;
  Monomial m = highest_monomial(f.lhs1) * highest_monomial(f.lhs2);
  chain.push_back(m);
  for (int r = 1; r <= eq.k; ++r) {
    m = m * Monomial::a_monomial(1, eq.s + 6 * eq.k - 6 * (r - 1) - 3)
                .inverse();
    chain.push_back(m);
  }
  return chain;
}

std::vector<Monomial> dominant_support(
    const std::vector<QPolynomial::Term>& dominants) {
  std::vector<Monomial> out;
  for (const auto& t : dominants) {
    if (!(t.c == BigInt(1))) {
      throw InconsistentError("dominant monomial " + t.m.str() +
                              " has coefficient " + t.c.str());
    }
    out.push_back(t.m);
  }
  return out;
}

void require_equal(const std::vector<Monomial>& got,
                   const std::vector<Monomial>& want, const char* side) {
  if (got != want) {
    throw InconsistentError(std::string("dominant monomials of the ") + side +
                            " do not match the closed form");
  }
}

}  // namespace

DominantClassification classify_dominant(const EquationInstance& eq,
                                         CharacterCache& cache,
                                         const FmCaps& caps) {
  if (eq.dual) {
    throw std::invalid_argument(
        "dominant classification covers primal instances only");
  }
  EquationFactors f = equation_factors(eq);
  DominantClassification out;
  // Dominant supports come from the graded scan: it touches only the slices
  // that can hold dominant monomials, so even products far too large to
  // materialize stay cheap here.
  auto support = [&](const ModuleLabel& la, const ModuleLabel& lb) {
    std::vector<std::pair<QPolynomial, QPolynomial>> prod;
    prod.push_back({label_character(la, cache, caps),
                    label_character(lb, cache, caps)});
    return dominant_support(dominant_product_terms(prod, caps.max_terms));
  };
  out.lhs = support(f.lhs1, f.lhs2);
  out.rhs1 = support(f.rhs1a, f.rhs1b);
  if (f.rhs2.size() > 1) {
    out.rhs2 = support(f.rhs2.at(0), f.rhs2.at(1));
  } else {
    out.rhs2 =
        dominant_support(dominant_terms(label_character(f.rhs2.at(0), cache,
                                                        caps)));
  }
  out.chain = dominant_chain(eq, f);

  // The chain is strictly descending in the term order, matching the
  // canonical order of the computed lists.
  require_equal(out.lhs, out.chain, "left product");
  require_equal(out.rhs1,
                std::vector<Monomial>(out.chain.begin(), out.chain.end() - 1),
                "first summand");
  require_equal(out.rhs2, {out.chain.back()}, "second summand");
  return out;
}

WitnessReport irreducibility_witnesses(const EquationInstance& eq,
                                       CharacterCache& cache,
                                       const FmCaps& caps) {
  if (eq.dual) {
    throw std::invalid_argument(
        "irreducibility witnesses cover primal instances only");
  }
  EquationFactors f = equation_factors(eq);
  std::vector<Monomial> chain = dominant_chain(eq, f);
  // Witness absence needs single coefficients of the first-summand product,
  // which product_coeff reads off the factors directly; the product itself
  // is never materialized.
  QPolynomial fac_a = label_character(f.rhs1a, cache, caps);
  QPolynomial fac_b = label_character(f.rhs1b, cache, caps);
  if (fac_a.term_count() > fac_b.term_count()) std::swap(fac_a, fac_b);

  WitnessReport rep;
  for (int r = 1; r <= eq.k - 1; ++r) {
    const int v = eq.s + 6 * eq.k - 6 * r + 3;
    const Monomial& m_r = chain[r];
    WitnessReport::Entry entry;
    entry.r = r;
    entry.n = m_r * Monomial::a_monomial(1, v).inverse();
    entry.absent_from_product = product_coeff(fac_a, fac_b, entry.n).is_zero();

    // Node-1 reachability: lowering M_r's node-1 part by A_v inside its own
    // string character.
    std::vector<Sl2Monomial::Entry> part_entries;
    for (const auto& e : m_r.entries()) {
      if (e.key.node == 1) part_entries.push_back({e.key.shift, e.exp});
    }
    Sl2Monomial part = Sl2Monomial::from_sorted_entries(part_entries);
    entry.sl2_reachable = false;
    if (part.is_dominant() && !part.is_identity()) {
      Sl2Monomial lowered =
          part * Sl2Monomial::variable(v - 3, -1) *
          Sl2Monomial::variable(v + 3, -1);
      entry.sl2_reachable =
          sl2_character(part, 3).coeff(lowered) != nullptr;
    }
    rep.pass = rep.pass && entry.absent_from_product && entry.sl2_reachable;
    rep.entries.push_back(std::move(entry));
  }
  return rep;
}

MSystemReport verify_m_system(const EquationInstance& eq,
                              CharacterCache& cache, const FmCaps& caps) {
  EquationFactors f = equation_factors(eq);
  MSystemReport rep;
  rep.eq = eq;
  auto restricted_product = [&](const std::vector<ModuleLabel>& labels) {
    WeightPolynomial out = WeightPolynomial::one();
    for (const ModuleLabel& lab : labels) {
      out = out * restrict_to_Uqg(label_character(lab, cache, caps));
    }
    return out;
  };
  rep.lhs = restricted_product({f.lhs1, f.lhs2});
  rep.rhs = restricted_product({f.rhs1a, f.rhs1b}) + restricted_product(f.rhs2);
  rep.lhs_dimension = rep.lhs.dimension();
  rep.rhs_dimension = rep.rhs.dimension();
  rep.pass = rep.lhs == rep.rhs;
  return rep;
}

}  // namespace g2q
