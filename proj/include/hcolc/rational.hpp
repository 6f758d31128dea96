#pragma once

#include <string>
#include <string_view>

#include "hcolc/bigint.hpp"

namespace hcolc {

// Exact rational, stored reduced with positive denominator.
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(int64_t v) : num_(v), den_(1) {}
  Rational(BigInt num, BigInt den);  // den must be nonzero

  static Rational from_double(double v);  // exact; v must be finite
  static Rational parse(std::string_view s);  // "p", "-p/q", decimals like "0.5", hex floats "0x1.8p1"

  const BigInt& num() const { return num_; }
  const BigInt& den() const { return den_; }

  bool is_zero() const { return num_.is_zero(); }
  bool is_negative() const { return num_.is_negative(); }

  Rational operator+(const Rational& o) const;
  Rational operator-(const Rational& o) const;
  Rational operator*(const Rational& o) const;
  Rational operator/(const Rational& o) const;  // o nonzero
  Rational operator-() const;
  Rational abs() const;

  int compare(const Rational& o) const;
  bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
  bool operator!=(const Rational& o) const { return !(*this == o); }
  bool operator<(const Rational& o) const { return compare(o) < 0; }
  bool operator<=(const Rational& o) const { return compare(o) <= 0; }
  bool operator>(const Rational& o) const { return compare(o) > 0; }
  bool operator>=(const Rational& o) const { return compare(o) >= 0; }

  double to_double() const;  // correctly rounded, nearest-even
  std::string to_string() const;  // "p/q" or "p" when q = 1

 private:
  void reduce();
  BigInt num_;
  BigInt den_;
};

}  // namespace hcolc
