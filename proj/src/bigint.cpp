#include "g2q/bigint.hpp"

#include <climits>
#include <stdexcept>

namespace g2q {

BigInt::BigInt(const std::string& decimal) {
  mpz_class z;
  if (z.set_str(decimal, 10) != 0) {
    throw std::invalid_argument("not a decimal integer: '" + decimal + "'");
  }
  set_from(z);
}

BigInt::BigInt(const BigInt& o)
    : small_(o.small_),
      big_(o.big_ ? std::make_unique<mpz_class>(*o.big_) : nullptr) {}

BigInt& BigInt::operator=(const BigInt& o) {
  if (this != &o) {
    small_ = o.small_;
    big_ = o.big_ ? std::make_unique<mpz_class>(*o.big_) : nullptr;
  }
  return *this;
}

void BigInt::set_from(const mpz_class& z) {
  if (z.fits_slong_p()) {
    small_ = z.get_si();
    big_.reset();
  } else {
    big_ = std::make_unique<mpz_class>(z);
  }
}

int BigInt::sign() const {
  if (big_) return sgn(*big_);
  return small_ > 0 ? 1 : small_ < 0 ? -1 : 0;
}

std::string BigInt::str() const {
  return big_ ? big_->get_str() : std::to_string(small_);
}

BigInt& BigInt::operator+=(const BigInt& o) {
  if (!big_ && !o.big_) {
    long long r;
    if (!__builtin_add_overflow(small_, o.small_, &r)) {
      small_ = r;
      return *this;
    }
  }
  set_from(to_mpz() + o.to_mpz());
  return *this;
}

BigInt& BigInt::operator-=(const BigInt& o) {
  if (!big_ && !o.big_) {
    long long r;
    if (!__builtin_sub_overflow(small_, o.small_, &r)) {
      small_ = r;
      return *this;
    }
  }
  set_from(to_mpz() - o.to_mpz());
  return *this;
}

BigInt& BigInt::operator*=(const BigInt& o) {
  if (!big_ && !o.big_) {
    long long r;
    if (!__builtin_mul_overflow(small_, o.small_, &r)) {
      small_ = r;
      return *this;
    }
  }
  set_from(to_mpz() * o.to_mpz());
  return *this;
}

BigInt BigInt::operator-() const {
  if (!big_ && small_ != LLONG_MIN) return BigInt(-small_);
  BigInt r;
  r.set_from(-to_mpz());
  return r;
}

bool BigInt::divide_exact(const BigInt& d, BigInt& q) const {
  if (d.is_zero()) return false;
  if (!big_ && !d.big_ && !(small_ == LLONG_MIN && d.small_ == -1)) {
    if (small_ % d.small_ != 0) return false;
    q = BigInt(small_ / d.small_);
    return true;
  }
  mpz_class n = to_mpz(), m = d.to_mpz();
  if (!mpz_divisible_p(n.get_mpz_t(), m.get_mpz_t())) return false;
  mpz_class res;
  mpz_divexact(res.get_mpz_t(), n.get_mpz_t(), m.get_mpz_t());
  q.set_from(res);
  return true;
}

int BigInt::cmp(const BigInt& o) const {
  if (!big_ && !o.big_) {
    return small_ < o.small_ ? -1 : small_ > o.small_ ? 1 : 0;
  }
  return ::cmp(to_mpz(), o.to_mpz());
}

}  // namespace g2q
