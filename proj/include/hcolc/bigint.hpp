#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hcolc {

// Sign-magnitude arbitrary-precision integer over 64-bit limbs, little-endian.
// Zero is canonically (positive, no limbs).
class BigInt {
 public:
  BigInt() = default;
  BigInt(int64_t v);
  static BigInt from_u64(uint64_t v);

  static BigInt from_decimal(std::string_view s);  // throws std::invalid_argument

  bool is_zero() const { return limbs_.empty(); }
  bool is_negative() const { return negative_; }
  bool is_one() const { return !negative_ && limbs_.size() == 1 && limbs_[0] == 1; }

  // Total order.
  int compare(const BigInt& other) const;

  BigInt operator-() const;
  BigInt operator+(const BigInt& o) const;
  BigInt operator-(const BigInt& o) const;
  BigInt operator*(const BigInt& o) const;
  // Truncated toward zero; divisor must be nonzero.
  BigInt operator/(const BigInt& o) const;
  BigInt operator%(const BigInt& o) const;
  static void divmod(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r);

  BigInt& operator+=(const BigInt& o) { return *this = *this + o; }
  BigInt& operator-=(const BigInt& o) { return *this = *this - o; }
  BigInt& operator*=(const BigInt& o) { return *this = *this * o; }

  bool operator==(const BigInt& o) const { return compare(o) == 0; }
  bool operator!=(const BigInt& o) const { return compare(o) != 0; }
  bool operator<(const BigInt& o) const { return compare(o) < 0; }
  bool operator<=(const BigInt& o) const { return compare(o) <= 0; }
  bool operator>(const BigInt& o) const { return compare(o) > 0; }
  bool operator>=(const BigInt& o) const { return compare(o) >= 0; }

  BigInt abs() const;
  static BigInt gcd(const BigInt& a, const BigInt& b);  // nonnegative

  BigInt shl(size_t bits) const;
  BigInt shr(size_t bits) const;  // magnitude shift, truncating
  size_t bit_length() const;      // 0 for zero
  size_t trailing_zero_bits() const;
  bool bit(size_t i) const;

  bool fits_uint64() const { return limbs_.size() <= 1 && !negative_; }
  uint64_t to_uint64() const;  // requires fits_uint64()
  bool fits_int64() const;
  int64_t to_int64() const;

  double to_double() const;  // correctly rounded, nearest-even

  std::string to_decimal() const;

  size_t hash() const;

 private:
  void normalize();
  static int compare_mag(const std::vector<uint64_t>& a, const std::vector<uint64_t>& b);
  static std::vector<uint64_t> add_mag(const std::vector<uint64_t>& a, const std::vector<uint64_t>& b);
  // requires |a| >= |b|
  static std::vector<uint64_t> sub_mag(const std::vector<uint64_t>& a, const std::vector<uint64_t>& b);

  bool negative_ = false;
  std::vector<uint64_t> limbs_;
};

}  // namespace hcolc
