#include "g2q/sl2.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace g2q {

// ---------------------------------------------------------------------------
// Sl2Monomial.
// ---------------------------------------------------------------------------

Sl2Monomial Sl2Monomial::variable(int shift, int exp) {
  Sl2Monomial m;
  if (exp != 0) m.entries_.push_back({shift, exp});
  return m;
}

Sl2Monomial Sl2Monomial::from_sorted_entries(std::vector<Entry> entries) {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].exp == 0 ||
        (i > 0 && entries[i - 1].shift >= entries[i].shift)) {
      throw std::invalid_argument(
          "entries must be strictly shift-sorted with nonzero exponents");
    }
  }
  Sl2Monomial m;
  m.entries_ = std::move(entries);
  return m;
}

int Sl2Monomial::exponent(int shift) const {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), shift,
      [](const Entry& e, int s) { return e.shift < s; });
  if (it != entries_.end() && it->shift == shift) return it->exp;
  return 0;
}

Sl2Monomial Sl2Monomial::operator*(const Sl2Monomial& o) const {
  Sl2Monomial out;
  out.entries_.reserve(entries_.size() + o.entries_.size());
  std::size_t i = 0, j = 0;
  while (i < entries_.size() || j < o.entries_.size()) {
    if (j == o.entries_.size() ||
        (i < entries_.size() && entries_[i].shift < o.entries_[j].shift)) {
      out.entries_.push_back(entries_[i++]);
    } else if (i == entries_.size() ||
               o.entries_[j].shift < entries_[i].shift) {
      out.entries_.push_back(o.entries_[j++]);
    } else {
      int exp = entries_[i].exp + o.entries_[j].exp;
      if (exp != 0) out.entries_.push_back({entries_[i].shift, exp});
      ++i, ++j;
    }
  }
  return out;
}

Sl2Monomial Sl2Monomial::inverse() const {
  Sl2Monomial out;
  out.entries_.reserve(entries_.size());
  for (const Entry& e : entries_) out.entries_.push_back({e.shift, -e.exp});
  return out;
}

bool Sl2Monomial::is_dominant() const {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](const Entry& e) { return e.exp > 0; });
}

std::string Sl2Monomial::str() const {
  if (entries_.empty()) return "1";
  std::string out;
  for (const Entry& e : entries_) {
    if (!out.empty()) out += ' ';
    out += "Y_";
    if (e.shift < 0) {
      out += '{' + std::to_string(e.shift) + '}';
    } else {
      out += std::to_string(e.shift);
    }
    if (e.exp != 1) out += '^' + std::to_string(e.exp);
  }
  return out;
}

int Sl2Monomial::compare(const Sl2Monomial& a, const Sl2Monomial& b) {
  std::size_t i = 0, j = 0;
  while (i < a.entries_.size() || j < b.entries_.size()) {
    if (i == a.entries_.size()) {
      return b.entries_[j].exp > 0 ? -1 : 1;
    }
    if (j == b.entries_.size()) {
      return a.entries_[i].exp > 0 ? 1 : -1;
    }
    const Entry& ea = a.entries_[i];
    const Entry& eb = b.entries_[j];
    if (ea.shift == eb.shift) {
      if (ea.exp != eb.exp) return ea.exp > eb.exp ? 1 : -1;
      ++i, ++j;
    } else if (ea.shift < eb.shift) {
      return ea.exp > 0 ? 1 : -1;  // vs implicit 0 in b
    } else {
      return eb.exp > 0 ? -1 : 1;  // vs implicit 0 in a
    }
  }
  return 0;
}

std::size_t Sl2Monomial::hash() const {
  std::size_t h = 1469598103934665603ull;
  auto mix = [&h](long long v) {
    h ^= static_cast<std::size_t>(v);
    h *= 1099511628211ull;
  };
  for (const Entry& e : entries_) {
    mix(e.shift);
    mix(e.exp);
  }
  return h;
}

// ---------------------------------------------------------------------------
// Sl2Polynomial.
// ---------------------------------------------------------------------------

namespace {

bool sl2_term_desc(const Sl2Polynomial::Term& a, const Sl2Polynomial::Term& b) {
  return Sl2Monomial::compare(a.m, b.m) > 0;
}

}  // namespace

Sl2Polynomial Sl2Polynomial::one() { return term(Sl2Monomial{}, 1); }

Sl2Polynomial Sl2Polynomial::term(Sl2Monomial m, BigInt c) {
  Sl2Polynomial p;
  if (!c.is_zero()) p.terms_.push_back({std::move(m), std::move(c)});
  return p;
}

Sl2Polynomial Sl2Polynomial::from_terms(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(), sl2_term_desc);
  Sl2Polynomial p;
  p.terms_.reserve(terms.size());
  for (auto& t : terms) {
    if (!p.terms_.empty() && p.terms_.back().m == t.m) {
      p.terms_.back().c += t.c;
      if (p.terms_.back().c.is_zero()) p.terms_.pop_back();
    } else if (!t.c.is_zero()) {
      p.terms_.push_back(std::move(t));
    }
  }
  return p;
}

const BigInt* Sl2Polynomial::coeff(const Sl2Monomial& m) const {
  auto it = std::lower_bound(
      terms_.begin(), terms_.end(), m,
      [](const Term& t, const Sl2Monomial& key) {
        return Sl2Monomial::compare(t.m, key) > 0;
      });
  if (it != terms_.end() && it->m == m) return &it->c;
  return nullptr;
}

Sl2Polynomial operator+(const Sl2Polynomial& a, const Sl2Polynomial& b) {
  Sl2Polynomial out;
  out.terms_.reserve(a.terms_.size() + b.terms_.size());
  std::size_t i = 0, j = 0;
  while (i < a.terms_.size() || j < b.terms_.size()) {
    int cmp;
    if (i == a.terms_.size()) {
      cmp = -1;
    } else if (j == b.terms_.size()) {
      cmp = 1;
    } else {
      cmp = Sl2Monomial::compare(a.terms_[i].m, b.terms_[j].m);
    }
    if (cmp > 0) {
      out.terms_.push_back(a.terms_[i++]);
    } else if (cmp < 0) {
      out.terms_.push_back(b.terms_[j++]);
    } else {
      BigInt c = a.terms_[i].c + b.terms_[j].c;
      if (!c.is_zero()) out.terms_.push_back({a.terms_[i].m, std::move(c)});
      ++i, ++j;
    }
  }
  return out;
}

Sl2Polynomial operator-(const Sl2Polynomial& a, const Sl2Polynomial& b) {
  Sl2Polynomial nb;
  nb.terms_.reserve(b.terms_.size());
  for (const auto& t : b.terms_) nb.terms_.push_back({t.m, -t.c});
  return a + nb;
}

Sl2Polynomial operator*(const Sl2Polynomial& a, const Sl2Polynomial& b) {
  std::unordered_map<Sl2Monomial, BigInt, Sl2MonomialHash> acc;
  acc.reserve(a.terms_.size() + b.terms_.size());
  for (const auto& ta : a.terms_) {
    for (const auto& tb : b.terms_) {
      acc[ta.m * tb.m] += ta.c * tb.c;
    }
  }
  std::vector<Sl2Polynomial::Term> terms;
  terms.reserve(acc.size());
  for (auto& [m, c] : acc) {
    if (!c.is_zero()) terms.push_back({m, std::move(c)});
  }
  return Sl2Polynomial::from_terms(std::move(terms));
}

std::string Sl2Polynomial::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const Term& t : terms_) {
    if (!out.empty()) out += " + ";
    if (t.c == BigInt(1)) {
      out += t.m.str();
    } else {
      out += t.c.str() + "*" + t.m.str();
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Strings.
// ---------------------------------------------------------------------------

std::vector<int> Str::members(int h) const {
  std::vector<int> out;
  out.reserve(length);
  for (int j = 0; j < length; ++j) out.push_back(center + (2 * j - (length - 1)) * h);
  return out;
}

std::vector<StringTerm> string_character_terms(const Str& st, int h) {
  if (st.length < 0) throw std::invalid_argument("negative string length");
  if (h <= 0) throw std::invalid_argument("half-step must be positive");
  const int k = st.length;
  const int a = st.center;
  std::vector<StringTerm> out;
  out.reserve(k + 1);
  for (int i = 0; i <= k; ++i) {
    std::map<int, int> exps;
    for (int t = i; t < k; ++t) exps[a + (k - 1 - 2 * t) * h] += 1;
    for (int t = 0; t < i; ++t) exps[a + (k + 1 - 2 * t) * h] -= 1;
    std::vector<Sl2Monomial::Entry> entries;
    for (auto [shift, exp] : exps) {
      if (exp != 0) entries.push_back({shift, exp});
    }
    StringTerm term{Sl2Monomial::from_sorted_entries(std::move(entries)), {}};
    for (int j = 0; j < i; ++j) term.a_indices.push_back(a + (k - 2 * j) * h);
    out.push_back(std::move(term));
  }
  return out;
}

Sl2Polynomial string_character(const Str& st, int h) {
  std::vector<Sl2Polynomial::Term> terms;
  for (auto& t : string_character_terms(st, h)) {
    terms.push_back({std::move(t.m), 1});
  }
  return Sl2Polynomial::from_terms(std::move(terms));
}

bool in_general_position(const Str& s1, const Str& s2, int h) {
  std::vector<int> m1 = s1.members(h);
  std::vector<int> m2 = s2.members(h);
  auto contains = [](const std::vector<int>& big, const std::vector<int>& sub) {
    return std::includes(big.begin(), big.end(), sub.begin(), sub.end());
  };
  if (contains(m1, m2) || contains(m2, m1)) return true;
  std::vector<int> u;
  std::set_union(m1.begin(), m1.end(), m2.begin(), m2.end(),
                 std::back_inserter(u));
  for (std::size_t i = 1; i < u.size(); ++i) {
    if (u[i] - u[i - 1] != 2 * h) return true;  // union is not a string
  }
  return false;
}

std::vector<Str> decompose_strings(const Sl2Monomial& m, int h) {
  if (h <= 0) throw std::invalid_argument("half-step must be positive");
  if (m.is_identity() || !m.is_dominant()) {
    throw std::invalid_argument(
        "string decomposition requires a dominant nonidentity monomial");
  }
  // Group shifts by residue class modulo the string step 2h; strings never
  // cross classes.
  std::map<int, std::vector<Sl2Monomial::Entry>> classes;
  for (const auto& e : m.entries()) {
    int r = e.shift % (2 * h);
    if (r < 0) r += 2 * h;
    classes[r].push_back(e);
  }
  std::vector<Str> out;
  for (auto& [r, entries] : classes) {
    // Open strings as (start, end) pairs, kept sorted by start ascending so
    // the front is the longest candidate when ends are equal.
    std::vector<std::pair<int, int>> open;
    auto close = [&out, h](const std::pair<int, int>& s) {
      int len = (s.second - s.first) / (2 * h) + 1;
      out.push_back(Str{(s.first + s.second) / 2, len});
    };
    for (const auto& e : entries) {  // shifts ascending within the class
      std::vector<std::pair<int, int>> next;
      int extendable = 0;
      for (const auto& s : open) {
        if (s.second == e.shift - 2 * h) {
          ++extendable;
          next.push_back(s);
        } else {
          close(s);  // a gap: this string can never grow again
        }
      }
      int c = e.exp;
      // Extend the longest (earliest-start) strings first; extending a
      // shorter one instead would leave two overlapping strings whose union
      // is a longer string -- not in general position.
      for (int i = 0; i < extendable; ++i) {
        if (i < c) {
          next[i].second = e.shift;
        } else {
          close(next[i]);
        }
      }
      next.resize(std::min<std::size_t>(next.size(), std::min(extendable, c)));
      for (int i = extendable; i < c; ++i) next.push_back({e.shift, e.shift});
      open = std::move(next);
    }
    for (const auto& s : open) close(s);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Sl2Polynomial sl2_character(const Sl2Monomial& m, int h) {
  if (m.is_identity()) return Sl2Polynomial::one();
  Sl2Polynomial out = Sl2Polynomial::one();
  for (const Str& s : decompose_strings(m, h)) {
    out = out * string_character(s, h);
  }
  return out;
}

std::optional<std::vector<std::pair<Sl2Monomial, BigInt>>> peel_characters(
    const Sl2Polynomial& p, int h) {
  // Greedy head subtraction on a hash-map remainder with a lazy max-heap of
  // keys, so the cost is near-linear in the total mass subtracted rather
  // than quadratic in the polynomial size. In the single-node world the
  // maximal term of a character is its dominant head, so subtracting the
  // full multiple at the top is exact.
  std::vector<std::pair<Sl2Monomial, BigInt>> out;
  if (p.is_zero()) return out;
  std::unordered_map<Sl2Monomial, BigInt, Sl2MonomialHash> rem;
  rem.reserve(p.terms().size() * 2);
  std::vector<Sl2Monomial> heap;
  heap.reserve(p.terms().size());
  auto heap_less = [](const Sl2Monomial& a, const Sl2Monomial& b) {
    return Sl2Monomial::compare(a, b) < 0;
  };
  for (const auto& t : p.terms()) {
    rem.emplace(t.m, t.c);
    heap.push_back(t.m);
  }
  std::make_heap(heap.begin(), heap.end(), heap_less);
  // A genuine nonnegative combination peels in at most one round per
  // distinct head; the cap only stops pathological non-combinations whose
  // remainders keep sprouting fresh dominant heads.
  const std::size_t cap = 64 * p.terms().size() + 256;
  while (!heap.empty()) {
    std::pop_heap(heap.begin(), heap.end(), heap_less);
    Sl2Monomial k = std::move(heap.back());
    heap.pop_back();
    auto it = rem.find(k);
    if (it == rem.end()) continue;  // stale heap entry
    BigInt c = it->second;
    if (!k.is_dominant() || c.sign() < 0) return std::nullopt;
    if (out.size() >= cap) return std::nullopt;
    const Sl2Polynomial expansion = sl2_character(k, h);
    for (const auto& t : expansion.terms()) {
      auto [slot, inserted] = rem.try_emplace(t.m, 0);
      slot->second -= c * t.c;
      if (slot->second.is_zero()) {
        rem.erase(slot);
      } else if (inserted) {
        heap.push_back(t.m);
        std::push_heap(heap.begin(), heap.end(), heap_less);
      }
    }
    out.emplace_back(std::move(k), std::move(c));
  }
  return out;
}

}  // namespace g2q
