#include "hcolc/bigint.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hcolc {

using u64 = uint64_t;
using u128 = unsigned __int128;

BigInt::BigInt(int64_t v) {
  if (v < 0) {
    negative_ = true;
    // careful with INT64_MIN
    limbs_.push_back(static_cast<u64>(-(v + 1)) + 1);
  } else if (v > 0) {
    limbs_.push_back(static_cast<u64>(v));
  }
}

BigInt BigInt::from_u64(uint64_t v) {
  BigInt r;
  if (v != 0) r.limbs_.push_back(v);
  return r;
}

void BigInt::normalize() {
  while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
  if (limbs_.empty()) negative_ = false;
}

int BigInt::compare_mag(const std::vector<u64>& a, const std::vector<u64>& b) {
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  for (size_t i = a.size(); i-- > 0;) {
    if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
  }
  return 0;
}

std::vector<u64> BigInt::add_mag(const std::vector<u64>& a, const std::vector<u64>& b) {
  const std::vector<u64>& x = a.size() >= b.size() ? a : b;
  const std::vector<u64>& y = a.size() >= b.size() ? b : a;
  std::vector<u64> r;
  r.reserve(x.size() + 1);
  u64 carry = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    u128 s = static_cast<u128>(x[i]) + (i < y.size() ? y[i] : 0) + carry;
    r.push_back(static_cast<u64>(s));
    carry = static_cast<u64>(s >> 64);
  }
  if (carry) r.push_back(carry);
  return r;
}

std::vector<u64> BigInt::sub_mag(const std::vector<u64>& a, const std::vector<u64>& b) {
  std::vector<u64> r;
  r.reserve(a.size());
  u64 borrow = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    u128 rhs = static_cast<u128>(i < b.size() ? b[i] : 0) + borrow;
    u128 lhs = static_cast<u128>(a[i]);
    if (lhs >= rhs) {
      r.push_back(static_cast<u64>(lhs - rhs));
      borrow = 0;
    } else {
      r.push_back(static_cast<u64>((static_cast<u128>(1) << 64) + lhs - rhs));
      borrow = 1;
    }
  }
  while (!r.empty() && r.back() == 0) r.pop_back();
  return r;
}

int BigInt::compare(const BigInt& o) const {
  if (negative_ != o.negative_) return negative_ ? -1 : 1;
  int c = compare_mag(limbs_, o.limbs_);
  return negative_ ? -c : c;
}

BigInt BigInt::operator-() const {
  BigInt r = *this;
  if (!r.is_zero()) r.negative_ = !r.negative_;
  return r;
}

BigInt BigInt::operator+(const BigInt& o) const {
  BigInt r;
  if (negative_ == o.negative_) {
    r.limbs_ = add_mag(limbs_, o.limbs_);
    r.negative_ = negative_;
  } else {
    int c = compare_mag(limbs_, o.limbs_);
    if (c == 0) return BigInt();
    if (c > 0) {
      r.limbs_ = sub_mag(limbs_, o.limbs_);
      r.negative_ = negative_;
    } else {
      r.limbs_ = sub_mag(o.limbs_, limbs_);
      r.negative_ = o.negative_;
    }
  }
  r.normalize();
  return r;
}

BigInt BigInt::operator-(const BigInt& o) const { return *this + (-o); }

BigInt BigInt::operator*(const BigInt& o) const {
  if (is_zero() || o.is_zero()) return BigInt();
  BigInt r;
  r.limbs_.assign(limbs_.size() + o.limbs_.size(), 0);
  for (size_t i = 0; i < limbs_.size(); ++i) {
    u64 carry = 0;
    for (size_t j = 0; j < o.limbs_.size(); ++j) {
      u128 cur = static_cast<u128>(limbs_[i]) * o.limbs_[j] + r.limbs_[i + j] + carry;
      r.limbs_[i + j] = static_cast<u64>(cur);
      carry = static_cast<u64>(cur >> 64);
    }
    size_t k = i + o.limbs_.size();
    while (carry) {
      u128 cur = static_cast<u128>(r.limbs_[k]) + carry;
      r.limbs_[k] = static_cast<u64>(cur);
      carry = static_cast<u64>(cur >> 64);
      ++k;
    }
  }
  r.negative_ = negative_ != o.negative_;
  r.normalize();
  return r;
}

void BigInt::divmod(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r) {
  if (b.is_zero()) throw std::domain_error("BigInt: division by zero");
  int c = compare_mag(a.limbs_, b.limbs_);
  if (c < 0) {
    q = BigInt();
    r = a;
    return;
  }
  // bit-by-bit long division on magnitudes
  size_t n = a.bit_length();
  BigInt quot, rem;
  quot.limbs_.assign((n + 63) / 64, 0);
  for (size_t i = n; i-- > 0;) {
    // rem = rem*2 + bit i of a
    rem = rem.shl(1);
    if (a.bit(i)) {
      if (rem.limbs_.empty()) rem.limbs_.push_back(1);
      else rem.limbs_[0] |= 1;
    }
    if (compare_mag(rem.limbs_, b.limbs_) >= 0) {
      rem.limbs_ = sub_mag(rem.limbs_, b.limbs_);
      quot.limbs_[i / 64] |= (u64(1) << (i % 64));
    }
  }
  quot.normalize();
  rem.normalize();
  quot.negative_ = !quot.is_zero() && (a.negative_ != b.negative_);
  rem.negative_ = !rem.is_zero() && a.negative_;
  q = quot;
  r = rem;
}

BigInt BigInt::operator/(const BigInt& o) const {
  BigInt q, r;
  divmod(*this, o, q, r);
  return q;
}

BigInt BigInt::operator%(const BigInt& o) const {
  BigInt q, r;
  divmod(*this, o, q, r);
  return r;
}

BigInt BigInt::abs() const {
  BigInt r = *this;
  r.negative_ = false;
  return r;
}

BigInt BigInt::gcd(const BigInt& a0, const BigInt& b0) {
  BigInt a = a0.abs(), b = b0.abs();
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  size_t az = a.trailing_zero_bits();
  size_t bz = b.trailing_zero_bits();
  size_t shift = az < bz ? az : bz;
  a = a.shr(az);
  do {
    b = b.shr(b.trailing_zero_bits());
    if (a.compare(b) > 0) std::swap(a, b);
    b = b - a;
  } while (!b.is_zero());
  return a.shl(shift);
}

BigInt BigInt::shl(size_t bits) const {
  if (is_zero() || bits == 0) return *this;
  size_t words = bits / 64, rem = bits % 64;
  BigInt r;
  r.negative_ = negative_;
  r.limbs_.assign(limbs_.size() + words + 1, 0);
  for (size_t i = 0; i < limbs_.size(); ++i) {
    r.limbs_[i + words] |= limbs_[i] << rem;
    if (rem) r.limbs_[i + words + 1] |= limbs_[i] >> (64 - rem);
  }
  r.normalize();
  return r;
}

BigInt BigInt::shr(size_t bits) const {
  size_t words = bits / 64, rem = bits % 64;
  if (words >= limbs_.size()) return BigInt();
  BigInt r;
  r.negative_ = negative_;
  r.limbs_.assign(limbs_.size() - words, 0);
  for (size_t i = 0; i < r.limbs_.size(); ++i) {
    r.limbs_[i] = limbs_[i + words] >> rem;
    if (rem && i + words + 1 < limbs_.size()) r.limbs_[i] |= limbs_[i + words + 1] << (64 - rem);
  }
  r.normalize();
  return r;
}

size_t BigInt::bit_length() const {
  if (limbs_.empty()) return 0;
  u64 top = limbs_.back();
  size_t n = (limbs_.size() - 1) * 64;
  while (top) {
    ++n;
    top >>= 1;
  }
  return n;
}

size_t BigInt::trailing_zero_bits() const {
  if (limbs_.empty()) return 0;
  size_t n = 0;
  for (size_t i = 0; i < limbs_.size(); ++i) {
    if (limbs_[i] == 0) {
      n += 64;
    } else {
      n += static_cast<size_t>(__builtin_ctzll(limbs_[i]));
      break;
    }
  }
  return n;
}

bool BigInt::bit(size_t i) const {
  size_t w = i / 64;
  if (w >= limbs_.size()) return false;
  return (limbs_[w] >> (i % 64)) & 1;
}

uint64_t BigInt::to_uint64() const {
  if (limbs_.empty()) return 0;
  return limbs_[0];
}

bool BigInt::fits_int64() const {
  if (limbs_.empty()) return true;
  if (limbs_.size() > 1) return false;
  if (!negative_) return limbs_[0] <= static_cast<u64>(std::numeric_limits<int64_t>::max());
  return limbs_[0] <= static_cast<u64>(std::numeric_limits<int64_t>::max()) + 1;
}

int64_t BigInt::to_int64() const {
  if (limbs_.empty()) return 0;
  if (negative_) return -static_cast<int64_t>(limbs_[0] - 1) - 1;
  return static_cast<int64_t>(limbs_[0]);
}

double BigInt::to_double() const {
  if (is_zero()) return 0.0;
  size_t n = bit_length();
  if (n <= 53) {
    double m = 0;
    for (size_t i = limbs_.size(); i-- > 0;) m = m * 18446744073709551616.0 + static_cast<double>(limbs_[i]);
    return negative_ ? -m : m;
  }
  // take top 54 bits, round to nearest-even on the 54th with sticky
  BigInt top = shr(n - 54);
  u64 mant54 = top.limbs_[0];
  bool round_bit = mant54 & 1;
  mant54 >>= 1;
  bool sticky = false;
  for (size_t i = 0; i < n - 54 && !sticky; ++i) sticky = bit(i);
  if (round_bit && (sticky || (mant54 & 1))) ++mant54;
  double m = std::ldexp(static_cast<double>(mant54), static_cast<int>(n - 53));
  return negative_ ? -m : m;
}

BigInt BigInt::from_decimal(std::string_view s) {
  if (s.empty()) throw std::invalid_argument("BigInt: empty literal");
  bool neg = false;
  size_t i = 0;
  if (s[0] == '-' || s[0] == '+') {
    neg = s[0] == '-';
    i = 1;
  }
  if (i >= s.size()) throw std::invalid_argument("BigInt: bad literal");
  BigInt r;
  BigInt ten(static_cast<int64_t>(10));
  for (; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') throw std::invalid_argument("BigInt: bad digit");
    r = r * ten + BigInt(static_cast<int64_t>(s[i] - '0'));
  }
  if (neg && !r.is_zero()) r.negative_ = true;
  return r;
}

std::string BigInt::to_decimal() const {
  if (is_zero()) return "0";
  BigInt v = abs();
  const BigInt chunk = BigInt::from_u64(10000000000000000000ull);
  std::string out;
  std::vector<u64> parts;
  while (!v.is_zero()) {
    BigInt q, r;
    divmod(v, chunk, q, r);
    parts.push_back(r.to_uint64());
    v = q;
  }
  char buf[32];
  snprintf(buf, sizeof buf, "%llu", static_cast<unsigned long long>(parts.back()));
  out += buf;
  for (size_t i = parts.size() - 1; i-- > 0;) {
    snprintf(buf, sizeof buf, "%019llu", static_cast<unsigned long long>(parts[i]));
    out += buf;
  }
  if (negative_) out.insert(out.begin(), '-');
  return out;
}

size_t BigInt::hash() const {
  size_t h = negative_ ? 0x9e3779b97f4a7c15ull : 0;
  for (u64 l : limbs_) h = h * 1099511628211ull ^ l;
  return h;
}

}  // namespace hcolc
