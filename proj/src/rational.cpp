#include "hcolc/rational.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace hcolc {

Rational::Rational(BigInt num, BigInt den) : num_(std::move(num)), den_(std::move(den)) {
  if (den_.is_zero()) throw std::domain_error("Rational: zero denominator");
  reduce();
}

void Rational::reduce() {
  if (den_.is_negative()) {
    num_ = -num_;
    den_ = -den_;
  }
  if (num_.is_zero()) {
    den_ = BigInt(static_cast<int64_t>(1));
    return;
  }
  BigInt g = BigInt::gcd(num_, den_);
  if (!g.is_one()) {
    num_ = num_ / g;
    den_ = den_ / g;
  }
}

Rational Rational::from_double(double v) {
  if (!std::isfinite(v)) throw std::domain_error("Rational: non-finite double");
  if (v == 0.0) return Rational();
  int exp = 0;
  double m = std::frexp(v, &exp);  // v = m * 2^exp, |m| in [0.5, 1)
  int64_t mant = static_cast<int64_t>(std::ldexp(m, 53));
  exp -= 53;
  BigInt num(mant);
  if (exp >= 0) return Rational(num.shl(static_cast<size_t>(exp)), BigInt(static_cast<int64_t>(1)));
  return Rational(num, BigInt(static_cast<int64_t>(1)).shl(static_cast<size_t>(-exp)));
}

Rational Rational::operator+(const Rational& o) const {
  return Rational(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}

Rational Rational::operator-(const Rational& o) const {
  return Rational(num_ * o.den_ - o.num_ * den_, den_ * o.den_);
}

Rational Rational::operator*(const Rational& o) const { return Rational(num_ * o.num_, den_ * o.den_); }

Rational Rational::operator/(const Rational& o) const {
  if (o.is_zero()) throw std::domain_error("Rational: division by zero");
  return Rational(num_ * o.den_, den_ * o.num_);
}

Rational Rational::operator-() const {
  Rational r = *this;
  r.num_ = -r.num_;
  return r;
}

Rational Rational::abs() const {
  Rational r = *this;
  r.num_ = r.num_.abs();
  return r;
}

int Rational::compare(const Rational& o) const { return (num_ * o.den_).compare(o.num_ * den_); }

double Rational::to_double() const {
  if (num_.is_zero()) return 0.0;
  BigInt a = num_.abs();
  const BigInt& b = den_;
  // scale so the integer quotient has at least 55 bits, then round to a
  // 53-bit mantissa with a round bit and sticky accumulation
  long diff = static_cast<long>(a.bit_length()) - static_cast<long>(b.bit_length());
  long shift = 55 - diff;
  bool sticky = false;
  BigInt sa;
  if (shift >= 0) {
    sa = a.shl(static_cast<size_t>(shift));
  } else {
    for (long i = 0; i < -shift && !sticky; ++i) sticky = a.bit(static_cast<size_t>(i));
    sa = a.shr(static_cast<size_t>(-shift));
  }
  BigInt q, r;
  BigInt::divmod(sa, b, q, r);
  sticky = sticky || !r.is_zero();
  size_t qbits = q.bit_length();  // 55 or 56
  size_t drop = qbits - 53;
  for (size_t i = 0; i + 1 < drop && !sticky; ++i) sticky = q.bit(i);
  bool round_bit = q.bit(drop - 1);
  uint64_t mant = q.shr(drop).to_uint64();
  if (round_bit && (sticky || (mant & 1))) ++mant;
  double res = std::ldexp(static_cast<double>(mant),
                          static_cast<int>(static_cast<long>(qbits) - 53 - shift));
  return num_.is_negative() ? -res : res;
}

Rational Rational::parse(std::string_view s) {
  if (s.empty()) throw std::invalid_argument("Rational: empty literal");
  size_t slash = s.find('/');
  if (slash != std::string_view::npos) {
    BigInt p = BigInt::from_decimal(s.substr(0, slash));
    BigInt q = BigInt::from_decimal(s.substr(slash + 1));
    return Rational(p, q);
  }
  bool hexfloat = s.find('x') != std::string_view::npos || s.find('X') != std::string_view::npos;
  bool decimal = s.find('.') != std::string_view::npos || s.find('e') != std::string_view::npos ||
                 s.find('E') != std::string_view::npos;
  if (hexfloat || decimal) {
    std::string tmp(s);
    char* end = nullptr;
    double v = std::strtod(tmp.c_str(), &end);
    if (end == nullptr || *end != '\0') throw std::invalid_argument("Rational: bad numeric literal");
    return from_double(v);
  }
  return Rational(BigInt::from_decimal(s), BigInt(static_cast<int64_t>(1)));
}

std::string Rational::to_string() const {
  if (den_.is_one()) return num_.to_decimal();
  return num_.to_decimal() + "/" + den_.to_decimal();
}

}  // namespace hcolc
