#include "g2q/monomial.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <stdexcept>

namespace g2q {

namespace {

constexpr long long kMaxExp = std::numeric_limits<int>::max();

int checked_int(long long v, const char* what) {
  if (v > kMaxExp || v < -kMaxExp) {
    throw std::overflow_error(std::string(what) + " out of range");
  }
  return static_cast<int>(v);
}

void require_node(int node) {
  if (node != 1 && node != 2) {
    throw std::invalid_argument("unknown node " + std::to_string(node));
  }
}

}  // namespace

Monomial Monomial::from_sorted_entries(std::vector<Entry> entries) {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].exp == 0 ||
        (i > 0 && !(entries[i - 1].key < entries[i].key))) {
      throw std::invalid_argument(
          "entries must be strictly key-sorted with nonzero exponents");
    }
  }
  Monomial m;
  m.entries_ = std::move(entries);
  return m;
}

Monomial Monomial::variable(int node, int shift, int exp) {
  require_node(node);
  Monomial m;
  if (exp != 0) m.entries_.push_back({{node, shift}, exp});
  return m;
}

Monomial Monomial::a_monomial(int node, int shift) {
  require_node(node);
  if (node == 1) {
    return variable(1, shift - 3) * variable(1, shift + 3) *
           variable(2, shift - 2, -1) * variable(2, shift, -1) *
           variable(2, shift + 2, -1);
  }
  return variable(2, shift - 1) * variable(2, shift + 1) *
         variable(1, shift, -1);
}

int Monomial::exponent(int node, int shift) const {
  VarKey k{node, shift};
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), k,
      [](const Entry& e, const VarKey& key) { return e.key < key; });
  return (it != entries_.end() && it->key == k) ? it->exp : 0;
}

Monomial Monomial::operator*(const Monomial& o) const {
  Monomial out;
  out.entries_.reserve(entries_.size() + o.entries_.size());
  std::size_t i = 0, j = 0;
  while (i < entries_.size() || j < o.entries_.size()) {
    if (j == o.entries_.size() ||
        (i < entries_.size() && entries_[i].key < o.entries_[j].key)) {
      out.entries_.push_back(entries_[i++]);
    } else if (i == entries_.size() || o.entries_[j].key < entries_[i].key) {
      out.entries_.push_back(o.entries_[j++]);
    } else {
      long long e =
          static_cast<long long>(entries_[i].exp) + o.entries_[j].exp;
      if (e != 0) {
        out.entries_.push_back({entries_[i].key, checked_int(e, "exponent")});
      }
      ++i, ++j;
    }
  }
  return out;
}

Monomial Monomial::inverse() const {
  Monomial out;
  out.entries_.reserve(entries_.size());
  for (const Entry& e : entries_) out.entries_.push_back({e.key, -e.exp});
  return out;
}

Monomial Monomial::pow(int e) const {
  Monomial out;
  if (e == 0) return out;
  out.entries_.reserve(entries_.size());
  for (const Entry& en : entries_) {
    long long v = static_cast<long long>(en.exp) * e;
    out.entries_.push_back({en.key, checked_int(v, "exponent")});
  }
  return out;
}

bool Monomial::is_dominant() const {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](const Entry& e) { return e.exp > 0; });
}

bool Monomial::is_antidominant() const {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](const Entry& e) { return e.exp < 0; });
}

bool Monomial::is_right_negative() const {
  if (entries_.empty()) {
    throw std::invalid_argument("right-negativity undefined for identity");
  }
  int smax = entries_.front().key.shift;
  for (const Entry& e : entries_) smax = std::max(smax, e.key.shift);
  for (const Entry& e : entries_) {
    if (e.key.shift == smax && e.exp > 0) return false;
  }
  return true;
}

std::pair<long long, long long> Monomial::weight() const {
  long long w1 = 0, w2 = 0;
  for (const Entry& e : entries_) (e.key.node == 1 ? w1 : w2) += e.exp;
  return {w1, w2};
}

Monomial Monomial::shifted(int d) const {
  Monomial out;
  out.entries_.reserve(entries_.size());
  for (const Entry& e : entries_) {
    long long s = static_cast<long long>(e.key.shift) + d;
    out.entries_.push_back({{e.key.node, checked_int(s, "shift")}, e.exp});
  }
  return out;
}

Monomial Monomial::iota() const {
  Monomial out;
  out.entries_.reserve(entries_.size());
  for (const Entry& e : entries_) {
    out.entries_.push_back({{e.key.node, 12 - e.key.shift}, -e.exp});
  }
  std::sort(out.entries_.begin(), out.entries_.end(),
            [](const Entry& a, const Entry& b) { return a.key < b.key; });
  return out;
}

std::string Monomial::str() const {
  if (entries_.empty()) return "1";
  std::string out;
  for (const Entry& e : entries_) {
    if (!out.empty()) out += ' ';
    out += std::to_string(e.key.node);
    out += '_';
    if (e.key.shift < 0) {
      out += '{' + std::to_string(e.key.shift) + '}';
    } else {
      out += std::to_string(e.key.shift);
    }
    if (e.exp != 1) {
      out += '^' + std::to_string(e.exp);
    }
  }
  return out;
}

int Monomial::compare(const Monomial& a, const Monomial& b) {
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
    if (ea.key == eb.key) {
      if (ea.exp != eb.exp) return ea.exp > eb.exp ? 1 : -1;
      ++i, ++j;
    } else if (ea.key < eb.key) {
      return ea.exp > 0 ? 1 : -1;  // vs implicit 0 in b
    } else {
      return eb.exp > 0 ? -1 : 1;  // vs implicit 0 in a
    }
  }
  return 0;
}

std::size_t Monomial::hash() const {
  std::size_t h = 1469598103934665603ull;
  auto mix = [&h](long long v) {
    h ^= static_cast<std::size_t>(v);
    h *= 1099511628211ull;
  };
  for (const Entry& e : entries_) {
    mix(e.key.node);
    mix(e.key.shift);
    mix(e.exp);
  }
  return h;
}

namespace {

struct Cursor {
  std::string_view text;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw std::invalid_argument("monomial parse error at position " +
                                std::to_string(pos) + ": " + msg);
  }
  bool done() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }

  long long integer(const char* what) {
    bool braced = false;
    if (!done() && peek() == '{') {
      braced = true;
      ++pos;
    }
    std::size_t start = pos;
    if (!done() && (peek() == '-' || peek() == '+')) ++pos;
    std::size_t digits_from = pos;
    while (!done() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos;
    if (pos == digits_from) fail(std::string("expected ") + what);
    long long v = 0;
    try {
      v = std::stoll(std::string(text.substr(start, pos - start)));
    } catch (const std::out_of_range&) {
      fail(std::string(what) + " out of range");
    }
    if (braced) {
      if (done() || peek() != '}') fail("expected '}'");
      ++pos;
    }
    return v;
  }
};

}  // namespace

Monomial Monomial::parse(std::string_view text) {
  // Trim and detect the bare identity "1".
  std::size_t lo = text.find_first_not_of(" \t");
  if (lo == std::string_view::npos) {
    throw std::invalid_argument("monomial parse error: empty input");
  }
  std::size_t hi = text.find_last_not_of(" \t");
  if (text.substr(lo, hi - lo + 1) == "1") return Monomial{};

  Cursor c{text, lo};
  std::map<VarKey, long long> acc;
  while (true) {
    char nc = c.peek();
    if (!std::isdigit(static_cast<unsigned char>(nc))) c.fail("expected node");
    if (nc != '1' && nc != '2') {
      c.fail(std::string("unknown node '") + nc + "'");
    }
    int node = nc - '0';
    ++c.pos;
    if (c.done() || c.peek() != '_') c.fail("expected '_'");
    ++c.pos;
    long long shift = c.integer("shift");
    long long exp = 1;
    if (!c.done() && c.peek() == '^') {
      ++c.pos;
      exp = c.integer("exponent");
    }
    acc[{node, checked_int(shift, "shift")}] += exp;
    // Factor separator or end.
    if (c.done() || c.pos > hi) break;
    if (c.peek() != ' ' && c.peek() != '\t') c.fail("expected space");
    while (!c.done() && (c.peek() == ' ' || c.peek() == '\t')) ++c.pos;
    if (c.done() || c.pos > hi) break;
  }
  Monomial out;
  for (const auto& [key, e] : acc) {
    if (e != 0) out.entries_.push_back({key, checked_int(e, "exponent")});
  }
  return out;
}

Monomial product_of_A(const ACoeffs& c) {
  Monomial out;
  for (const auto& [key, e] : c) {
    if (e != 0) {
      out = out * Monomial::a_monomial(key.node, key.shift)
                      .pow(checked_int(e, "A exponent"));
    }
  }
  return out;
}

std::optional<ACoeffs> factor_over_A_integral(const Monomial& n) {
  if (n.is_identity()) return ACoeffs{};
  int lo = n.entries().front().key.shift, hi = lo;
  std::map<int, long long> e1, e2;
  for (const auto& en : n.entries()) {
    lo = std::min(lo, en.key.shift);
    hi = std::max(hi, en.key.shift);
    (en.key.node == 1 ? e1 : e2)[en.key.shift] = en.exp;
  }
  auto at = [](const std::map<int, long long>& m, int k) -> long long {
    auto it = m.find(k);
    return it == m.end() ? 0 : it->second;
  };

  // Eliminate node-2 generators: the node-1 exponent equations give
  //   c2(x) = c1(x-3) + c1(x+3) - e1(x),
  // and substituting into the node-2 equations yields the marching rule
  //   c1(y+4) = e2(y) + e1(y-1) + e1(y+1) + c1(y) - c1(y-4),
  // one chain per residue class of y mod 4, with zero seeds left of the
  // support (any solution has c1 confined near [lo, hi]).
  std::map<int, long long> c1;
  auto c1at = [&c1](int k) -> long long {
    auto it = c1.find(k);
    return it == c1.end() ? 0 : it->second;
  };
  for (int y = lo - 9; y <= hi + 9; ++y) {
    long long v = at(e2, y) + at(e1, y - 1) + at(e1, y + 1) + c1at(y) -
                  c1at(y - 4);
    if (v != 0) c1[y + 4] = v;
  }
  // A finitely-supported solution keeps c1 within [lo+3, hi-3]; anything
  // outside (in particular a non-vanishing tail) means no solution.
  for (const auto& [k, v] : c1) {
    if (v != 0 && (k < lo + 3 || k > hi - 3)) return std::nullopt;
  }
  ACoeffs out;
  for (const auto& [k, v] : c1) {
    if (v != 0) out[{1, k}] = v;
  }
  for (int x = lo - 7; x <= hi + 7; ++x) {
    long long v = c1at(x - 3) + c1at(x + 3) - at(e1, x);
    if (v != 0) out[{2, x}] = v;
  }
  // The marching rule covers every equation it visited; reconstruction
  // certifies the candidate exactly.
  if (!(product_of_A(out) == n)) return std::nullopt;
  return out;
}

std::optional<ACoeffs> factor_over_A(const Monomial& n) {
  auto c = factor_over_A_integral(n);
  if (!c) return std::nullopt;
  for (const auto& [key, v] : *c) {
    if (v < 0) return std::nullopt;
  }
  return c;
}

bool leq(const Monomial& m, const Monomial& m2) {
  return factor_over_A(m2 * m.inverse()).has_value();
}

}  // namespace g2q
