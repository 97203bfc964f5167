#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <string>

#include <gmpxx.h>

namespace g2q {

// Signed integer of arbitrary size. Values that fit in 64 bits are kept
// inline (the overwhelmingly common case for character coefficients);
// arithmetic is overflow-checked and promotes to GMP storage on demand.
class BigInt {
 public:
  BigInt() = default;
  BigInt(long long v) : small_(v) {}  // NOLINT: implicit by design
  explicit BigInt(const std::string& decimal);

  BigInt(const BigInt& o);
  BigInt(BigInt&&) noexcept = default;
  BigInt& operator=(const BigInt& o);
  BigInt& operator=(BigInt&&) noexcept = default;

  bool is_zero() const { return big_ ? sgn(*big_) == 0 : small_ == 0; }
  int sign() const;
  bool fits_int64() const { return !big_; }
  long long as_int64() const { return small_; }  // only when fits_int64()
  std::string str() const;

  BigInt& operator+=(const BigInt& o);
  BigInt& operator-=(const BigInt& o);
  BigInt& operator*=(const BigInt& o);
  BigInt operator-() const;

  friend BigInt operator+(BigInt a, const BigInt& b) { return a += b; }
  friend BigInt operator-(BigInt a, const BigInt& b) { return a -= b; }
  friend BigInt operator*(BigInt a, const BigInt& b) { return a *= b; }

  // If d divides *this exactly, set q to the quotient and return true.
  bool divide_exact(const BigInt& d, BigInt& q) const;

  friend bool operator==(const BigInt& a, const BigInt& b) {
    return a.cmp(b) == 0;
  }
  friend std::strong_ordering operator<=>(const BigInt& a, const BigInt& b) {
    int c = a.cmp(b);
    return c < 0   ? std::strong_ordering::less
           : c > 0 ? std::strong_ordering::greater
                   : std::strong_ordering::equal;
  }

 private:
  long long small_ = 0;
  std::unique_ptr<mpz_class> big_;  // non-null => value lives here

  int cmp(const BigInt& o) const;
  mpz_class to_mpz() const { return big_ ? *big_ : mpz_class(long(small_)); }
  void set_from(const mpz_class& z);
};

}  // namespace g2q
