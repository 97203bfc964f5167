#include "g2q/polynomial.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstring>
#include <limits>
#include <map>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "g2q/errors.hpp"

namespace g2q {

namespace {

bool term_desc(const QPolynomial::Term& a, const QPolynomial::Term& b) {
  return Monomial::compare(a.m, b.m) > 0;
}

}  // namespace

QPolynomial QPolynomial::one() { return term(Monomial{}, 1); }

QPolynomial QPolynomial::term(Monomial m, BigInt c) {
  QPolynomial p;
  if (!c.is_zero()) p.terms_.push_back({std::move(m), std::move(c)});
  return p;
}

QPolynomial QPolynomial::from_descending_terms(std::vector<Term> terms) {
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (terms[i].c.is_zero() ||
        (i > 0 && Monomial::compare(terms[i - 1].m, terms[i].m) <= 0)) {
      throw std::logic_error("terms not strictly descending and nonzero");
    }
  }
  QPolynomial p;
  p.terms_ = std::move(terms);
  return p;
}

QPolynomial QPolynomial::from_terms(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(), term_desc);
  QPolynomial p;
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

const BigInt* QPolynomial::coeff(const Monomial& m) const {
  auto it = std::lower_bound(
      terms_.begin(), terms_.end(), m, [](const Term& t, const Monomial& key) {
        return Monomial::compare(t.m, key) > 0;
      });
  if (it != terms_.end() && it->m == m) return &it->c;
  return nullptr;
}

QPolynomial operator+(const QPolynomial& a, const QPolynomial& b) {
  QPolynomial out;
  out.terms_.reserve(a.terms_.size() + b.terms_.size());
  std::size_t i = 0, j = 0;
  while (i < a.terms_.size() || j < b.terms_.size()) {
    int cmp;
    if (i == a.terms_.size()) {
      cmp = -1;
    } else if (j == b.terms_.size()) {
      cmp = 1;
    } else {
      cmp = Monomial::compare(a.terms_[i].m, b.terms_[j].m);
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

QPolynomial operator-(const QPolynomial& a, const QPolynomial& b) {
  QPolynomial nb;
  nb.terms_.reserve(b.terms_.size());
  for (const auto& t : b.terms_) nb.terms_.push_back({t.m, -t.c});
  return a + nb;
}

QPolynomial QPolynomial::times_monomial(const Monomial& m) const {
  QPolynomial out;
  out.terms_.reserve(terms_.size());
  // The order is multiplication-compatible, so the sorted sequence maps to
  // a sorted sequence.
  for (const Term& t : terms_) out.terms_.push_back({t.m * m, t.c});
  return out;
}

// ---------------------------------------------------------------------------
// Multiplication. Small products accumulate through a hash map of Monomials;
// large ones run on a packed fixed-window byte representation where monomial
// comparison is memcmp and addition is bytewise (exponents biased by 128).
// ---------------------------------------------------------------------------

namespace {

constexpr std::size_t kPackedPairThreshold = std::size_t(1) << 20;

struct Window {
  std::vector<VarKey> keys;  // ascending

  int width() const { return static_cast<int>(keys.size()); }

  int index_of(const VarKey& k) const {
    auto it = std::lower_bound(keys.begin(), keys.end(), k);
    return static_cast<int>(it - keys.begin());
  }

  static Window from(const std::vector<QPolynomial::Term>& a,
                     const std::vector<QPolynomial::Term>& b) {
    Window w;
    for (const auto* terms : {&a, &b}) {
      for (const auto& t : *terms) {
        for (const auto& e : t.m.entries()) w.keys.push_back(e.key);
      }
    }
    std::sort(w.keys.begin(), w.keys.end());
    w.keys.erase(std::unique(w.keys.begin(), w.keys.end()), w.keys.end());
    return w;
  }
};

int max_abs_exponent(const std::vector<QPolynomial::Term>& terms) {
  int m = 0;
  for (const auto& t : terms) {
    for (const auto& e : t.m.entries()) m = std::max(m, std::abs(e.exp));
  }
  return m;
}

bool coeffs_fit_int64(const std::vector<QPolynomial::Term>& terms) {
  return std::all_of(terms.begin(), terms.end(),
                     [](const auto& t) { return t.c.fits_int64(); });
}

void pack_into(const Monomial& m, const Window& w, std::uint8_t* out) {
  std::memset(out, 128, w.keys.size());
  for (const auto& e : m.entries()) {
    out[w.index_of(e.key)] = static_cast<std::uint8_t>(e.exp + 128);
  }
}

Monomial decode_packed(const Window& w, const std::uint8_t* bytes) {
  std::vector<Monomial::Entry> entries;
  for (int t = 0; t < w.width(); ++t) {
    int exp = static_cast<int>(bytes[t]) - 128;
    if (exp != 0) entries.push_back({w.keys[t], exp});
  }
  return Monomial::from_sorted_entries(std::move(entries));
}

std::uint64_t hash_bytes(const std::uint8_t* p, int n) {
  // Mixes 8-byte chunks; called once per generated product key, so per-byte
  // hashing would dominate large multiplications.
  std::uint64_t h = 0x9e3779b97f4a7c15ull;
  int i = 0;
  for (; i + 8 <= n; i += 8) {
    std::uint64_t x;
    std::memcpy(&x, p + i, 8);
    h = (h ^ x) * 0xff51afd7ed558ccdull;
    h ^= h >> 33;
  }
  std::uint64_t tail = 0;
  if (i < n) {
    std::memcpy(&tail, p + i, static_cast<std::size_t>(n - i));
    h = (h ^ tail) * 0xff51afd7ed558ccdull;
    h ^= h >> 33;
  }
  return h;
}

// Open-addressing accumulation table over packed keys stored in an arena.
// Slots are epoch-stamped so reset() is O(1): entries from earlier epochs
// read as empty, which keeps repeated small accumulations (one per graded
// slice) free of allocation churn.
struct PackedTable {
  struct Slot {
    std::uint64_t hash = 0;
    std::uint32_t pos = 0;  // arena index + 1
    std::uint32_t epoch = 0;
    std::int64_t coeff = 0;
  };

  int width;
  std::uint32_t epoch = 1;
  std::vector<Slot> slots;
  std::vector<std::uint8_t> arena;
  std::size_t live = 0;  // slots with nonzero coeff
  std::size_t used = 0;  // occupied slots
  bool overflow = false;

  explicit PackedTable(int w, std::size_t capacity_hint) : width(w) {
    std::size_t cap = 64;
    while (cap < capacity_hint * 2) cap <<= 1;
    slots.resize(cap);
  }

  bool slot_used(const Slot& s) const { return s.epoch == epoch; }

  void reset() {
    ++epoch;
    arena.clear();
    live = 0;
    used = 0;
    overflow = false;
  }

  const std::uint8_t* key_at(std::uint32_t pos) const {
    return arena.data() + std::size_t(pos - 1) * width;
  }

  void grow() {
    std::vector<Slot> bigger(slots.size() * 2);
    for (const Slot& s : slots) {
      if (!slot_used(s)) continue;
      std::size_t mask = bigger.size() - 1;
      std::size_t at = s.hash & mask;
      while (bigger[at].epoch == epoch) at = (at + 1) & mask;
      bigger[at] = s;
    }
    slots.swap(bigger);
  }

  // Returns the slot index; transitions are reported through *became_live.
  void add(const std::uint8_t* key, std::uint64_t h, std::int64_t delta,
           bool* became_live = nullptr) {
    if (became_live) *became_live = false;
    std::size_t mask = slots.size() - 1;
    std::size_t at = h & mask;
    while (true) {
      Slot& s = slots[at];
      if (!slot_used(s)) {
        std::uint32_t pos =
            static_cast<std::uint32_t>(arena.size() / width) + 1;
        arena.insert(arena.end(), key, key + width);
        s = Slot{h, pos, epoch, delta};
        ++used;
        if (delta != 0) {
          ++live;
          if (became_live) *became_live = true;
        }
        if (used * 3 > slots.size() * 2) grow();
        return;
      }
      if (s.hash == h && std::memcmp(key_at(s.pos), key, width) == 0) {
        bool was_zero = s.coeff == 0;
        if (__builtin_add_overflow(s.coeff, delta, &s.coeff)) {
          overflow = true;
        }
        if (was_zero && s.coeff != 0) {
          ++live;
          if (became_live) *became_live = true;
        } else if (!was_zero && s.coeff == 0) {
          --live;
        }
        return;
      }
      at = (at + 1) & mask;
    }
  }
};

std::vector<QPolynomial::Term> extract_sorted(const PackedTable& table,
                                              const Window& w) {
  std::vector<std::uint32_t> order;
  order.reserve(table.live);
  for (const auto& s : table.slots) {
    if (table.slot_used(s) && s.coeff != 0) order.push_back(s.pos);
  }
  const int width = table.width;
  const std::uint8_t* arena = table.arena.data();
  std::sort(order.begin(), order.end(),
            [arena, width](std::uint32_t a, std::uint32_t b) {
              return std::memcmp(arena + std::size_t(a - 1) * width,
                                 arena + std::size_t(b - 1) * width,
                                 width) > 0;
            });
  std::vector<QPolynomial::Term> out;
  out.reserve(order.size());
  for (std::uint32_t pos : order) {
    const std::uint8_t* key = arena + std::size_t(pos - 1) * width;
    std::uint64_t h = hash_bytes(key, width);
    std::size_t mask = table.slots.size() - 1;
    std::size_t at = h & mask;
    while (table.slots[at].pos == 0 || table.slots[at].hash != h ||
           std::memcmp(table.key_at(table.slots[at].pos), key, width) != 0) {
      at = (at + 1) & mask;
    }
    out.push_back({decode_packed(w, key), BigInt(table.slots[at].coeff)});
  }
  return out;
}

QPolynomial mul_naive(const QPolynomial& a, const QPolynomial& b,
                      std::size_t max_terms) {
  std::unordered_map<Monomial, BigInt, MonomialHash> acc;
  acc.reserve(a.terms().size() + b.terms().size());
  for (const auto& ta : a.terms()) {
    for (const auto& tb : b.terms()) {
      BigInt& c = acc[ta.m * tb.m];
      c += ta.c * tb.c;
    }
    if (acc.size() > max_terms) {
      throw CapExceededError("product grew past the term budget");
    }
  }
  std::vector<QPolynomial::Term> terms;
  terms.reserve(acc.size());
  for (auto& [m, c] : acc) {
    if (!c.is_zero()) terms.push_back({m, std::move(c)});
  }
  if (terms.size() > max_terms) {
    throw CapExceededError("product grew past the term budget");
  }
  return QPolynomial::from_terms(std::move(terms));
}

std::optional<QPolynomial> mul_packed(const QPolynomial& a,
                                      const QPolynomial& b,
                                      std::size_t max_terms) {
  if (!coeffs_fit_int64(a.terms()) || !coeffs_fit_int64(b.terms())) {
    return std::nullopt;
  }
  if (max_abs_exponent(a.terms()) + max_abs_exponent(b.terms()) > 126) {
    return std::nullopt;
  }
  Window w = Window::from(a.terms(), b.terms());
  if (w.width() == 0 || w.width() > 4096) return std::nullopt;
  const int width = w.width();

  auto pack_all = [&w, width](const std::vector<QPolynomial::Term>& terms,
                              std::vector<std::uint8_t>& bytes,
                              std::vector<std::int64_t>& coeffs) {
    bytes.resize(terms.size() * width);
    coeffs.resize(terms.size());
    for (std::size_t i = 0; i < terms.size(); ++i) {
      pack_into(terms[i].m, w, bytes.data() + i * width);
      coeffs[i] = terms[i].c.as_int64();
    }
  };
  std::vector<std::uint8_t> apack, bpack;
  std::vector<std::int64_t> acoeff, bcoeff;
  pack_all(a.terms(), apack, acoeff);
  pack_all(b.terms(), bpack, bcoeff);
  // Debias one side so the inner loop is a plain byte add (mod-256 wraparound
  // is exact because the combined exponent range was prechecked).
  for (auto& byte : bpack) byte = static_cast<std::uint8_t>(byte - 128);

  PackedTable table(width,
                    std::max<std::size_t>(a.terms().size() + b.terms().size(),
                                          std::size_t(1) << 16));
  std::vector<std::uint8_t> tmp(width);
  for (std::size_t i = 0; i < a.terms().size(); ++i) {
    const std::uint8_t* pa = apack.data() + i * width;
    for (std::size_t j = 0; j < b.terms().size(); ++j) {
      const std::uint8_t* pb = bpack.data() + j * width;
      for (int t = 0; t < width; ++t) {
        tmp[t] = static_cast<std::uint8_t>(pa[t] + pb[t]);
      }
      std::int64_t c;
      if (__builtin_mul_overflow(acoeff[i], bcoeff[j], &c)) {
        return std::nullopt;
      }
      table.add(tmp.data(), hash_bytes(tmp.data(), width), c);
      if (table.overflow) return std::nullopt;
    }
    if (table.live > max_terms) {
      throw CapExceededError("product grew past the term budget");
    }
  }
  std::vector<QPolynomial::Term> terms = extract_sorted(table, w);
  if (terms.size() > max_terms) {
    throw CapExceededError("product grew past the term budget");
  }
  return QPolynomial::from_descending_terms(std::move(terms));
}

}  // namespace

QPolynomial mul_capped(const QPolynomial& a, const QPolynomial& b,
                       std::size_t max_terms) {
  if (a.is_zero() || b.is_zero()) return QPolynomial{};
  std::size_t pairs = a.terms().size() * b.terms().size();
  if (pairs >= kPackedPairThreshold) {
    if (auto fast = mul_packed(a, b, max_terms)) return std::move(*fast);
  }
  return mul_naive(a, b, max_terms);
}

QPolynomial operator*(const QPolynomial& a, const QPolynomial& b) {
  return mul_capped(a, b, std::numeric_limits<std::size_t>::max());
}

// ---------------------------------------------------------------------------
// Graded product scans. The per-node exponent sums and first moments
// (sum of exponent * shift) are all additive under multiplication, so the
// four together grade the ring: every product term lands in a slice known
// from its two factors. Factors are bucketed by key once; slice keys are
// then enumerated in sorted order by merging per-bucket streams through a
// heap, and each slice is accumulated independently, which bounds peak
// memory by the largest slice instead of the full expansion. Slices run on
// the packed byte representation when every factor fits a shared window,
// with an exact BigInt rerun per slice on coefficient overflow.
// ---------------------------------------------------------------------------

namespace {

// (node-1 exponent sum, node-2 exponent sum, node-1 moment, node-2 moment).
using GradedKey = std::array<long long, 4>;

GradedKey graded_key_of(const Monomial& m) {
  GradedKey k{0, 0, 0, 0};
  for (const auto& e : m.entries()) {
    const int i = e.key.node == 1 ? 0 : 1;
    k[static_cast<std::size_t>(i)] += e.exp;
    k[static_cast<std::size_t>(i + 2)] +=
        static_cast<long long>(e.exp) * e.key.shift;
  }
  return k;
}

GradedKey operator+(const GradedKey& a, const GradedKey& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]};
}

// One factor polynomial with its term indices grouped by graded key.
struct GradedFactor {
  const QPolynomial* p = nullptr;
  std::vector<GradedKey> keys;         // ascending
  std::vector<std::uint32_t> offsets;  // keys.size() + 1 fenceposts
  std::vector<std::uint32_t> idx;      // term indices grouped by key

  explicit GradedFactor(const QPolynomial& poly) : p(&poly) {
    const auto& terms = poly.terms();
    std::vector<std::pair<GradedKey, std::uint32_t>> tagged;
    tagged.reserve(terms.size());
    for (std::uint32_t i = 0; i < terms.size(); ++i) {
      tagged.push_back({graded_key_of(terms[i].m), i});
    }
    std::sort(tagged.begin(), tagged.end());
    idx.reserve(tagged.size());
    for (const auto& [k, i] : tagged) {
      if (keys.empty() || keys.back() != k) {
        offsets.push_back(static_cast<std::uint32_t>(idx.size()));
        keys.push_back(k);
      }
      idx.push_back(i);
    }
    offsets.push_back(static_cast<std::uint32_t>(idx.size()));
  }
};

// One bucket pair contributing to the slice under scan.
struct SlicePart {
  std::uint32_t product = 0;
  std::uint32_t ba = 0;
  std::uint32_t bb = 0;
};

// Weight-bucketed view of a list of signed two-factor products.
struct GradedEngine {
  std::vector<GradedFactor> factors;
  struct Product {
    std::size_t fa = 0;
    std::size_t fb = 0;
    int sign = 1;
  };
  std::vector<Product> products;

  bool packed_ok = false;
  Window win;
  std::vector<std::vector<std::uint8_t>> packed;  // biased a / debiased b
  std::vector<std::vector<std::int64_t>> coeff64;

  void absorb(const std::vector<std::pair<QPolynomial, QPolynomial>>& ps,
              int sign) {
    for (const auto& [a, b] : ps) {
      if (a.is_zero() || b.is_zero()) continue;  // the product is zero
      products.push_back({factors.size(), factors.size() + 1, sign});
      factors.emplace_back(a);
      factors.emplace_back(b);
    }
  }

  void prepare() {
    packed_ok = !factors.empty();
    for (const auto& f : factors) {
      packed_ok = packed_ok && coeffs_fit_int64(f.p->terms());
    }
    if (packed_ok) {
      std::vector<int> maxabs(factors.size());
      for (std::size_t i = 0; i < factors.size(); ++i) {
        maxabs[i] = max_abs_exponent(factors[i].p->terms());
      }
      for (const auto& pr : products) {
        if (maxabs[pr.fa] + maxabs[pr.fb] > 126) packed_ok = false;
      }
    }
    if (packed_ok) {
      for (const auto& f : factors) {
        for (const auto& t : f.p->terms()) {
          for (const auto& e : t.m.entries()) win.keys.push_back(e.key);
        }
      }
      std::sort(win.keys.begin(), win.keys.end());
      win.keys.erase(std::unique(win.keys.begin(), win.keys.end()),
                     win.keys.end());
      if (win.width() == 0 || win.width() > 4096) packed_ok = false;
    }
    if (!packed_ok) return;

    const int width = win.width();
    packed.resize(factors.size());
    coeff64.resize(factors.size());
    for (std::size_t fi = 0; fi < factors.size(); ++fi) {
      const auto& terms = factors[fi].p->terms();
      packed[fi].resize(terms.size() * width);
      coeff64[fi].resize(terms.size());
      for (std::size_t i = 0; i < terms.size(); ++i) {
        pack_into(terms[i].m, win, packed[fi].data() + i * width);
        coeff64[fi][i] = terms[i].c.as_int64();
      }
    }
    // Debias the second side of every product so the pair key is a plain
    // byte add (each factor sits on exactly one side of one product).
    for (const auto& pr : products) {
      for (auto& byte : packed[pr.fb]) {
        byte = static_cast<std::uint8_t>(byte - 128);
      }
    }
  }

  // Enumerates slice keys in ascending order by merging, per product, one
  // stream per first-factor bucket through a heap; each heap pop yields one
  // contributing bucket pair, and equal-key pops form one slice.
  // fn(key, parts) runs once per slice.
  template <typename SliceFn>
  void for_each_slice(SliceFn&& fn) const {
    struct Stream {
      GradedKey key;
      std::uint32_t product;
      std::uint32_t ba;
      std::uint32_t bb;
    };
    auto later = [](const Stream& x, const Stream& y) { return y.key < x.key; };
    std::vector<Stream> heap;
    for (std::uint32_t pi = 0; pi < products.size(); ++pi) {
      const GradedFactor& A = factors[products[pi].fa];
      const GradedFactor& B = factors[products[pi].fb];
      if (B.keys.empty()) continue;
      for (std::uint32_t ba = 0; ba < A.keys.size(); ++ba) {
        heap.push_back({A.keys[ba] + B.keys[0], pi, ba, 0});
      }
    }
    std::make_heap(heap.begin(), heap.end(), later);

    std::vector<SlicePart> parts;
    while (!heap.empty()) {
      const GradedKey key = heap.front().key;
      parts.clear();
      while (!heap.empty() && heap.front().key == key) {
        std::pop_heap(heap.begin(), heap.end(), later);
        Stream s = heap.back();
        heap.pop_back();
        parts.push_back({s.product, s.ba, s.bb});
        const GradedFactor& B = factors[products[s.product].fb];
        if (s.bb + 1 < B.keys.size()) {
          ++s.bb;
          s.key = factors[products[s.product].fa].keys[s.ba] + B.keys[s.bb];
          heap.push_back(s);
          std::push_heap(heap.begin(), heap.end(), later);
        }
      }
      fn(key, parts);
    }
  }

  // Accumulates one bucket pair into the packed table with the given sign;
  // false means an int64 product overflowed.
  bool part_into_packed(const SlicePart& part, int sign, PackedTable& table,
                        std::size_t max_slice_terms,
                        std::vector<std::uint8_t>& tmp) const {
    const int width = win.width();
    const Product& pr = products[part.product];
    const GradedFactor& A = factors[pr.fa];
    const GradedFactor& B = factors[pr.fb];
    for (std::uint32_t pa = A.offsets[part.ba]; pa < A.offsets[part.ba + 1];
         ++pa) {
      const std::uint8_t* bytes_a =
          packed[pr.fa].data() + std::size_t(A.idx[pa]) * width;
      const std::int64_t ca = coeff64[pr.fa][A.idx[pa]] * sign;
      for (std::uint32_t pb = B.offsets[part.bb]; pb < B.offsets[part.bb + 1];
           ++pb) {
        const std::uint8_t* bytes_b =
            packed[pr.fb].data() + std::size_t(B.idx[pb]) * width;
        for (int t = 0; t < width; ++t) {
          tmp[static_cast<std::size_t>(t)] =
              static_cast<std::uint8_t>(bytes_a[t] + bytes_b[t]);
        }
        std::int64_t c;
        if (__builtin_mul_overflow(ca, coeff64[pr.fb][B.idx[pb]], &c)) {
          return false;
        }
        table.add(tmp.data(), hash_bytes(tmp.data(), width), c);
        if (table.overflow) return false;
      }
      if (table.used > max_slice_terms) {
        throw CapExceededError("graded slice grew past the term budget");
      }
    }
    return true;
  }

  // Exact accumulation of one bucket pair into a BigInt map.
  void part_into_generic(
      const SlicePart& part,
      std::unordered_map<Monomial, BigInt, MonomialHash>& map,
      std::size_t max_slice_terms) const {
    const Product& pr = products[part.product];
    const GradedFactor& A = factors[pr.fa];
    const GradedFactor& B = factors[pr.fb];
    for (std::uint32_t pa = A.offsets[part.ba]; pa < A.offsets[part.ba + 1];
         ++pa) {
      const auto& ta = A.p->terms()[A.idx[pa]];
      for (std::uint32_t pb = B.offsets[part.bb]; pb < B.offsets[part.bb + 1];
           ++pb) {
        const auto& tb = B.p->terms()[B.idx[pb]];
        map[ta.m * tb.m] += ta.c * tb.c;
      }
      if (map.size() > max_slice_terms) {
        throw CapExceededError("graded slice grew past the term budget");
      }
    }
  }
};

}  // namespace

ProductSumComparison compare_product_sums(
    const std::vector<std::pair<QPolynomial, QPolynomial>>& lhs,
    const std::vector<std::pair<QPolynomial, QPolynomial>>& rhs,
    std::size_t max_slice_terms) {
  GradedEngine eng;
  eng.absorb(lhs, +1);
  eng.absorb(rhs, -1);

  ProductSumComparison out;
  if (eng.products.empty()) {
    out.equal = true;
    return out;
  }
  eng.prepare();

  // Exact slice comparison with separate per-side maps; reports the largest
  // differing monomial of the slice, or nullopt when the slice is equal.
  auto run_slice_generic =
      [&](const std::vector<SlicePart>& parts, std::size_t* lhs_distinct,
          std::size_t* rhs_distinct)
      -> std::optional<ProductSumComparison::Mismatch> {
    std::unordered_map<Monomial, BigInt, MonomialHash> maps[2];
    for (const SlicePart& part : parts) {
      eng.part_into_generic(
          part, maps[eng.products[part.product].sign > 0 ? 0 : 1],
          max_slice_terms);
    }
    for (auto& map : maps) {
      std::erase_if(map, [](const auto& kv) { return kv.second.is_zero(); });
    }
    *lhs_distinct = maps[0].size();
    *rhs_distinct = maps[1].size();
    std::optional<ProductSumComparison::Mismatch> worst;
    auto consider = [&](const Monomial& m, const BigInt& lc, const BigInt& rc) {
      if (lc == rc) return;
      if (!worst || Monomial::compare(m, worst->m) > 0) {
        worst = ProductSumComparison::Mismatch{m, lc, rc};
      }
    };
    for (const auto& [m, c] : maps[0]) {
      auto it = maps[1].find(m);
      consider(m, c, it == maps[1].end() ? BigInt(0) : it->second);
    }
    for (const auto& [m, c] : maps[1]) {
      if (maps[0].find(m) == maps[0].end()) consider(m, BigInt(0), c);
    }
    return worst;
  };

  out.equal = true;
  std::vector<std::uint8_t> tmp(
      static_cast<std::size_t>(eng.packed_ok ? eng.win.width() : 0));
  PackedTable table(eng.packed_ok ? eng.win.width() : 1, std::size_t(1) << 9);
  eng.for_each_slice([&](const GradedKey&, const std::vector<SlicePart>& parts) {
    std::size_t lhs_distinct = 0;
    std::size_t rhs_distinct = 0;
    bool need_generic = !eng.packed_ok;
    bool clean = false;
    if (eng.packed_ok) {
      table.reset();
      bool fits = true;
      for (int phase = 0; fits && phase < 2; ++phase) {
        const int want_sign = phase == 0 ? 1 : -1;
        for (const SlicePart& part : parts) {
          if (eng.products[part.product].sign != want_sign) continue;
          fits = eng.part_into_packed(part, want_sign, table, max_slice_terms,
                                      tmp);
          if (!fits) break;
        }
        if (fits && phase == 0) lhs_distinct = table.live;
      }
      if (!fits) {
        need_generic = true;  // int64 overflow: redo this slice exactly
      } else {
        clean = table.live == 0;
      }
    }
    if (need_generic || !clean) {
      // Unequal or overflowed slices rerun exactly for per-side counts and
      // the mismatch witness (equal slices have identical counts by
      // definition, so the packed verdict suffices there).
      auto mm = run_slice_generic(parts, &lhs_distinct, &rhs_distinct);
      clean = !mm.has_value();
      if (mm &&
          (!out.mismatch || Monomial::compare(mm->m, out.mismatch->m) > 0)) {
        out.mismatch = std::move(mm);
      }
    } else {
      rhs_distinct = lhs_distinct;  // the slice cancelled exactly
    }
    out.equal = out.equal && clean;
    out.lhs_terms += lhs_distinct;
    out.rhs_terms += rhs_distinct;
  });
  return out;
}

std::vector<QPolynomial::Term> dominant_product_terms(
    const std::vector<std::pair<QPolynomial, QPolynomial>>& products,
    std::size_t max_slice_terms) {
  GradedEngine eng;
  eng.absorb(products, +1);
  std::vector<QPolynomial::Term> out;
  if (eng.products.empty()) return out;
  eng.prepare();

  std::vector<std::uint8_t> tmp(
      static_cast<std::size_t>(eng.packed_ok ? eng.win.width() : 0));
  PackedTable table(eng.packed_ok ? eng.win.width() : 1, std::size_t(1) << 9);
  eng.for_each_slice([&](const GradedKey& key,
                         const std::vector<SlicePart>& parts) {
    // Every exponent of a dominant monomial is non-negative, so both node
    // exponent sums are too; other slices cannot contribute.
    if (key[0] < 0 || key[1] < 0) return;
    bool done = false;
    if (eng.packed_ok) {
      const int width = eng.win.width();
      table.reset();
      bool fits = true;
      for (const SlicePart& part : parts) {
        fits = eng.part_into_packed(part, +1, table, max_slice_terms, tmp);
        if (!fits) break;
      }
      if (fits) {
        for (const auto& slot : table.slots) {
          if (!table.slot_used(slot) || slot.coeff == 0) continue;
          const std::uint8_t* bytes = table.key_at(slot.pos);
          // Biased packing: byte < 128 marks a negative exponent.
          bool dominant = true;
          for (int t = 0; t < width; ++t) {
            if (bytes[t] < 128) {
              dominant = false;
              break;
            }
          }
          if (dominant) {
            out.push_back({decode_packed(eng.win, bytes), BigInt(slot.coeff)});
          }
        }
        done = true;
      }
    }
    if (!done) {
      std::unordered_map<Monomial, BigInt, MonomialHash> map;
      for (const SlicePart& part : parts) {
        eng.part_into_generic(part, map, max_slice_terms);
      }
      for (auto& [m, c] : map) {
        if (!c.is_zero() && m.is_dominant()) out.push_back({m, std::move(c)});
      }
    }
  });
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return Monomial::compare(a.m, b.m) > 0;
  });
  return out;
}

BigInt product_coeff(const QPolynomial& a, const QPolynomial& b,
                     const Monomial& m) {
  BigInt total(0);
  for (const auto& t : a.terms()) {
    if (const BigInt* cb = b.coeff(m * t.m.inverse())) total += t.c * *cb;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Exact division by iterated leading-term elimination. The quotient term at
// each step divides the current maximal remainder term by the divisor head;
// Laurent monomials always divide, so failure shows up as a non-integral
// coefficient, a quotient term below the provable lower bound
// (min(p)/min(q)), or an exhausted step budget.
// ---------------------------------------------------------------------------

namespace {

constexpr std::size_t kDivStepCap = 20'000'000;

std::optional<QPolynomial> exact_div_generic(const QPolynomial& p,
                                             const QPolynomial& q,
                                             std::size_t max_terms) {
  const Monomial& qlead_m = q.terms().front().m;
  const BigInt& qlead_c = q.terms().front().c;
  const Monomial qlead_inv = qlead_m.inverse();
  const Monomial& qmin_m = q.terms().back().m;
  const Monomial& pmin_m = p.terms().back().m;

  std::unordered_map<Monomial, BigInt, MonomialHash> rem;
  rem.reserve(p.terms().size() * 2);
  std::vector<Monomial> heap;
  heap.reserve(p.terms().size());
  auto heap_less = [](const Monomial& a, const Monomial& b) {
    return Monomial::compare(a, b) < 0;
  };
  for (const auto& t : p.terms()) {
    rem.emplace(t.m, t.c);
    heap.push_back(t.m);
  }
  std::make_heap(heap.begin(), heap.end(), heap_less);

  std::vector<QPolynomial::Term> quot;
  std::size_t steps = 0;
  while (!heap.empty()) {
    std::pop_heap(heap.begin(), heap.end(), heap_less);
    Monomial k = std::move(heap.back());
    heap.pop_back();
    auto it = rem.find(k);
    if (it == rem.end()) continue;  // stale heap entry
    if (++steps > kDivStepCap) {
      throw CapExceededError("exact division exceeded its step budget");
    }
    BigInt c;
    if (!it->second.divide_exact(qlead_c, c)) return std::nullopt;
    Monomial t = k * qlead_inv;
    if (Monomial::compare(t * qmin_m, pmin_m) < 0) return std::nullopt;
    rem.erase(it);
    for (std::size_t gi = 1; gi < q.terms().size(); ++gi) {
      Monomial key = t * q.terms()[gi].m;
      auto [slot, inserted] = rem.try_emplace(key, 0);
      slot->second -= c * q.terms()[gi].c;
      if (slot->second.is_zero()) {
        rem.erase(slot);
      } else if (inserted) {
        heap.push_back(std::move(key));
        std::push_heap(heap.begin(), heap.end(), heap_less);
      }
    }
    if (rem.size() > max_terms) {
      throw CapExceededError("exact division remainder grew past the term budget");
    }
    quot.push_back({std::move(t), std::move(c)});
  }
  if (!rem.empty()) return std::nullopt;  // unreachable; defensive
  return QPolynomial::from_descending_terms(std::move(quot));
}

std::optional<std::optional<QPolynomial>> exact_div_packed(
    const QPolynomial& p, const QPolynomial& q, std::size_t max_terms) {
  // Outer nullopt: representation not applicable, use the generic path.
  // Inner optional: the division result.
  if (!coeffs_fit_int64(p.terms()) || !coeffs_fit_int64(q.terms())) {
    return std::nullopt;
  }
  if (max_abs_exponent(p.terms()) + 2 * max_abs_exponent(q.terms()) > 120) {
    return std::nullopt;
  }
  Window w = Window::from(p.terms(), q.terms());
  if (w.width() == 0 || w.width() > 4096) return std::nullopt;
  const int width = w.width();

  std::vector<std::uint8_t> qpack(q.terms().size() * width);
  std::vector<std::int64_t> qcoeff(q.terms().size());
  for (std::size_t i = 0; i < q.terms().size(); ++i) {
    pack_into(q.terms()[i].m, w, qpack.data() + i * width);
    qcoeff[i] = q.terms()[i].c.as_int64();
  }
  std::vector<std::uint8_t> pmin(width), qmin(width);
  pack_into(p.terms().back().m, w, pmin.data());
  pack_into(q.terms().back().m, w, qmin.data());

  PackedTable table(width, p.terms().size());
  std::vector<std::uint32_t> heap;
  auto heap_less = [&table, width](std::uint32_t a, std::uint32_t b) {
    return std::memcmp(table.arena.data() + std::size_t(a - 1) * width,
                       table.arena.data() + std::size_t(b - 1) * width,
                       width) < 0;
  };
  std::vector<std::uint8_t> tmp(width);
  for (const auto& t : p.terms()) {
    pack_into(t.m, w, tmp.data());
    bool became = false;
    table.add(tmp.data(), hash_bytes(tmp.data(), width), t.c.as_int64(),
              &became);
    if (became) heap.push_back(static_cast<std::uint32_t>(
        table.arena.size() / width));  // last appended
  }
  // Positions recorded above are only valid for fresh inserts; p's terms are
  // distinct so every add was a fresh insert.
  std::make_heap(heap.begin(), heap.end(), heap_less);

  auto slot_for = [&table, width](const std::uint8_t* key,
                                  std::uint64_t h) -> PackedTable::Slot& {
    std::size_t mask = table.slots.size() - 1;
    std::size_t at = h & mask;
    while (true) {
      PackedTable::Slot& s = table.slots[at];
      if (table.slot_used(s) && s.hash == h &&
          std::memcmp(table.key_at(s.pos), key, width) == 0) {
        return s;
      }
      at = (at + 1) & mask;
    }
  };

  const std::uint8_t* qlead = qpack.data();
  std::vector<QPolynomial::Term> quot;
  std::vector<std::uint8_t> tkey(width), skey(width);
  std::size_t steps = 0;
  while (!heap.empty()) {
    std::pop_heap(heap.begin(), heap.end(), heap_less);
    std::uint32_t pos = heap.back();
    heap.pop_back();
    const std::uint8_t* key = table.arena.data() + std::size_t(pos - 1) * width;
    std::uint64_t h = hash_bytes(key, width);
    PackedTable::Slot& slot = slot_for(key, h);
    if (slot.coeff == 0) continue;  // stale
    if (++steps > kDivStepCap) {
      throw CapExceededError("exact division exceeded its step budget");
    }
    if (slot.coeff == std::numeric_limits<std::int64_t>::min() &&
        qcoeff[0] == -1) {
      return std::nullopt;  // quotient overflows; fall back to the generic path
    }
    if (slot.coeff % qcoeff[0] != 0) return std::optional<QPolynomial>{};
    std::int64_t c = slot.coeff / qcoeff[0];
    // Quotient term bytes and the lower-bound test against min(p)/min(q).
    bool in_range = true;
    for (int t = 0; t < width; ++t) {
      int v = int(key[t]) - int(qlead[t]) + 128;
      if (v < 1 || v > 255) {
        in_range = false;
        break;
      }
      tkey[t] = static_cast<std::uint8_t>(v);
    }
    if (!in_range) return std::nullopt;  // fall back to the generic path
    for (int t = 0; t < width; ++t) {
      int v = int(tkey[t]) + int(qmin[t]) - 128;
      if (v < 0 || v > 255) {
        return std::nullopt;
      }
      skey[t] = static_cast<std::uint8_t>(v);
    }
    if (std::memcmp(skey.data(), pmin.data(), width) < 0) {
      return std::optional<QPolynomial>{};
    }
    slot.coeff = 0;
    --table.live;
    for (std::size_t gi = 1; gi < q.terms().size(); ++gi) {
      const std::uint8_t* g = qpack.data() + gi * width;
      bool ok = true;
      for (int t = 0; t < width; ++t) {
        int v = int(tkey[t]) + int(g[t]) - 128;
        if (v < 1 || v > 255) {
          ok = false;
          break;
        }
        tmp[t] = static_cast<std::uint8_t>(v);
      }
      if (!ok) return std::nullopt;
      std::int64_t delta;
      if (__builtin_mul_overflow(-c, qcoeff[gi], &delta)) return std::nullopt;
      std::size_t arena_before = table.arena.size();
      bool became = false;
      table.add(tmp.data(), hash_bytes(tmp.data(), width), delta, &became);
      if (table.overflow) return std::nullopt;
      if (became) {
        std::uint32_t npos;
        if (table.arena.size() > arena_before) {
          npos = static_cast<std::uint32_t>(table.arena.size() / width);
        } else {
          npos = slot_for(tmp.data(), hash_bytes(tmp.data(), width)).pos;
        }
        heap.push_back(npos);
        std::push_heap(heap.begin(), heap.end(), heap_less);
      }
    }
    quot.push_back({decode_packed(w, tkey.data()), BigInt(c)});
    if (table.live > max_terms) {
      throw CapExceededError("exact division remainder grew past the term budget");
    }
    if (heap.size() > table.live * 4 + 1024) {
      heap.clear();
      for (const auto& s : table.slots) {
        if (table.slot_used(s) && s.coeff != 0) heap.push_back(s.pos);
      }
      std::make_heap(heap.begin(), heap.end(), heap_less);
    }
  }
  if (table.live != 0) return std::optional<QPolynomial>{};
  return std::optional<QPolynomial>{
      QPolynomial::from_descending_terms(std::move(quot))};
}

}  // namespace

std::optional<QPolynomial> exact_div(const QPolynomial& p,
                                     const QPolynomial& q,
                                     std::size_t max_terms) {
  if (q.is_zero()) {
    throw std::invalid_argument("division by zero polynomial");
  }
  if (p.is_zero()) return QPolynomial{};
  // Necessary condition through the ring map Y -> 1: an exact quotient has
  // coefficient sum sum(p) / sum(q), which must be an integer.
  BigInt sum_p(0), sum_q(0);
  for (const auto& t : p.terms()) sum_p += t.c;
  for (const auto& t : q.terms()) sum_q += t.c;
  if (!sum_q.is_zero()) {
    BigInt witness;
    if (!sum_p.divide_exact(sum_q, witness)) return std::nullopt;
  }
  if (p.terms().size() >= 1024) {
    if (auto packed = exact_div_packed(p, q, max_terms)) return *packed;
  }
  return exact_div_generic(p, q, max_terms);
}

std::vector<QPolynomial::Term> dominant_terms(const QPolynomial& p) {
  std::vector<QPolynomial::Term> out;
  for (const auto& t : p.terms()) {
    if (t.m.is_dominant()) out.push_back(t);
  }
  return out;
}

Sl2Polynomial beta(const QPolynomial& p, int node) {
  if (node != 1 && node != 2) {
    throw std::invalid_argument("unknown node " + std::to_string(node));
  }
  std::vector<Sl2Polynomial::Term> terms;
  terms.reserve(p.terms().size());
  for (const auto& t : p.terms()) {
    std::vector<Sl2Monomial::Entry> entries;
    for (const auto& e : t.m.entries()) {
      if (e.key.node == node) entries.push_back({e.key.shift, e.exp});
    }
    terms.push_back(
        {Sl2Monomial::from_sorted_entries(std::move(entries)), t.c});
  }
  return Sl2Polynomial::from_terms(std::move(terms));
}

QPolynomial apply_shift(const QPolynomial& p, int d) {
  std::vector<QPolynomial::Term> terms;
  terms.reserve(p.terms().size());
  // Uniform key translation preserves the term order.
  for (const auto& t : p.terms()) terms.push_back({t.m.shifted(d), t.c});
  return QPolynomial::from_descending_terms(std::move(terms));
}

QPolynomial apply_iota(const QPolynomial& p) {
  std::vector<QPolynomial::Term> terms;
  terms.reserve(p.terms().size());
  for (const auto& t : p.terms()) terms.push_back({t.m.iota(), t.c});
  return QPolynomial::from_terms(std::move(terms));
}

std::string QPolynomial::str() const {
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

std::string QPolynomial::json() const {
  nlohmann::json terms = nlohmann::json::array();
  for (const Term& t : terms_) {
    nlohmann::json mono = nlohmann::json::array();
    for (const auto& e : t.m.entries()) {
      mono.push_back({e.key.node, e.key.shift, e.exp});
    }
    terms.push_back({{"m", mono}, {"c", t.c.str()}});
  }
  return nlohmann::json{{"terms", terms}}.dump();
}

// ---------------------------------------------------------------------------
// WeightPolynomial.
// ---------------------------------------------------------------------------

namespace {

bool wterm_desc(const WeightPolynomial::Term& a,
                const WeightPolynomial::Term& b) {
  return a.w > b.w;
}

}  // namespace

WeightPolynomial WeightPolynomial::one() {
  WeightPolynomial p;
  p.terms_.push_back({{0, 0}, 1});
  return p;
}

WeightPolynomial WeightPolynomial::from_terms(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(), wterm_desc);
  WeightPolynomial p;
  for (auto& t : terms) {
    if (!p.terms_.empty() && p.terms_.back().w == t.w) {
      p.terms_.back().c += t.c;
      if (p.terms_.back().c.is_zero()) p.terms_.pop_back();
    } else if (!t.c.is_zero()) {
      p.terms_.push_back(std::move(t));
    }
  }
  return p;
}

BigInt WeightPolynomial::dimension() const {
  BigInt d = 0;
  for (const Term& t : terms_) d += t.c;
  return d;
}

WeightPolynomial operator+(const WeightPolynomial& a,
                           const WeightPolynomial& b) {
  std::vector<WeightPolynomial::Term> terms = a.terms();
  terms.insert(terms.end(), b.terms().begin(), b.terms().end());
  return WeightPolynomial::from_terms(std::move(terms));
}

WeightPolynomial operator*(const WeightPolynomial& a,
                           const WeightPolynomial& b) {
  std::vector<WeightPolynomial::Term> terms;
  terms.reserve(a.terms().size() * b.terms().size());
  for (const auto& ta : a.terms()) {
    for (const auto& tb : b.terms()) {
      terms.push_back(
          {{ta.w.first + tb.w.first, ta.w.second + tb.w.second}, ta.c * tb.c});
    }
  }
  return WeightPolynomial::from_terms(std::move(terms));
}

std::string WeightPolynomial::str() const {
  if (terms_.empty()) return "0";
  auto var = [](const char* name, long long e) -> std::string {
    if (e == 0) return "";
    std::string s = name;
    if (e != 1) s += "^" + std::to_string(e);
    return s;
  };
  std::string out;
  for (const Term& t : terms_) {
    if (!out.empty()) out += " + ";
    std::string v1 = var("y1", t.w.first);
    std::string v2 = var("y2", t.w.second);
    std::string mono =
        v1.empty() ? v2 : (v2.empty() ? v1 : v1 + " " + v2);
    if (mono.empty()) mono = "1";
    if (t.c == BigInt(1)) {
      out += mono;
    } else {
      out += t.c.str() + "*" + mono;
    }
  }
  return out;
}

WeightPolynomial restrict_to_Uqg(const QPolynomial& p) {
  std::vector<WeightPolynomial::Term> terms;
  terms.reserve(p.terms().size());
  for (const auto& t : p.terms()) terms.push_back({t.m.weight(), t.c});
  return WeightPolynomial::from_terms(std::move(terms));
}

}  // namespace g2q
