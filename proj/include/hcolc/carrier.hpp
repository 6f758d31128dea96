#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "hcolc/rational.hpp"
#include "hcolc/result.hpp"
#include "hcolc/sexpr.hpp"

namespace hcolc {

enum class CarrierKind : uint8_t { Rational, Binary64, Symbolic };
enum class NatKind : uint8_t { BigNat, U64 };

struct SymRef {
  sym::SexprArena* arena = nullptr;
  uint32_t node = 0;
};

struct KindMismatchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Tagged numeric value of the abstract carrier type. Rational values are kept
// reduced; Binary64 uses IEEE-754 round-to-nearest-even; Symbolic builds
// S-expression nodes in an external arena.
class CarrierValue {
 public:
  CarrierValue() : v_(Rational()) {}
  explicit CarrierValue(Rational q) : v_(std::move(q)) {}
  explicit CarrierValue(double d) : v_(d) {}
  explicit CarrierValue(SymRef s) : v_(s) {}

  static CarrierValue zero(CarrierKind k, sym::SexprArena* arena = nullptr);
  static CarrierValue one(CarrierKind k, sym::SexprArena* arena = nullptr);

  CarrierKind kind() const {
    if (std::holds_alternative<Rational>(v_)) return CarrierKind::Rational;
    if (std::holds_alternative<double>(v_)) return CarrierKind::Binary64;
    return CarrierKind::Symbolic;
  }
  const Rational& rational() const { return std::get<Rational>(v_); }
  double binary64() const { return std::get<double>(v_); }
  SymRef symbolic() const { return std::get<SymRef>(v_); }

  bool equals(const CarrierValue& o) const;
  bool is_zero() const;

  std::string to_string() const;

 private:
  std::variant<Rational, double, SymRef> v_;
};

enum class CtOp : uint8_t { Plus, Sub, Mult, Min, Max, Abs, ZLess };

// Total on every kind; unary Abs ignores b. Throws KindMismatchError when the
// operand kinds differ.
CarrierValue ct_arith(CtOp op, const CarrierValue& a, const CarrierValue& b);
CarrierValue ct_arith(CtOp op, const CarrierValue& a);  // Abs

// Compile-time carrier literal, materialized per instantiation. Only Zero and
// One survive translation to fixed-width carriers.
struct CarrierLit {
  enum class Tag : uint8_t { Zero, One, Q } tag = Tag::Zero;
  Rational q;  // for Tag::Q

  static CarrierLit zero() { return {Tag::Zero, Rational()}; }
  static CarrierLit one() { return {Tag::One, Rational()}; }
  static CarrierLit of(Rational v);

  CarrierValue materialize(CarrierKind k, sym::SexprArena* arena = nullptr) const;
  bool is_zero_or_one() const { return tag != Tag::Q; }
  bool operator==(const CarrierLit& o) const { return tag == o.tag && (tag != Tag::Q || q == o.q); }
  std::string to_string() const;
};

// Tagged natural: arbitrary precision or 64-bit unsigned.
class NatValue {
 public:
  NatValue() : kind_(NatKind::U64), u64_(0) {}
  static NatValue big(BigInt v) { return NatValue(NatKind::BigNat, std::move(v), 0); }
  static NatValue u64(uint64_t v) { return NatValue(NatKind::U64, BigInt(), v); }

  NatKind kind() const { return kind_; }
  // Exact value as an unbounded natural; total for every kind.
  BigInt to_nat() const { return kind_ == NatKind::U64 ? BigInt::from_u64(u64_) : big_; }
  uint64_t to_u64_clamped() const;  // low 64 bits; callers must range-check first
  bool fits_u64() const { return kind_ == NatKind::U64 || big_.fits_uint64(); }

  bool equals(const NatValue& o) const { return kind_ == o.kind_ && to_nat() == o.to_nat(); }

  std::string to_string() const { return to_nat().to_decimal(); }

 private:
  NatValue(NatKind k, BigInt b, uint64_t u) : kind_(k), big_(std::move(b)), u64_(u) {}
  NatKind kind_;
  BigInt big_;
  uint64_t u64_;
};

// from_N: BigNat always succeeds; U64 succeeds iff n < 2^64.
Result<NatValue> nat_from_nat(const BigInt& n, NatKind kind);
NatValue nat_from_usize(uint64_t n, NatKind kind);

enum class NatOp : uint8_t { Plus, Minus, Mult, Div, Mod, Min, Max };

// Minus truncates at zero for BigNat and wraps modulo 2^64 for U64.
// Div/Mod by zero is DivByZero.
Result<NatValue> nat_arith(NatOp op, const NatValue& a, const NatValue& b);

}  // namespace hcolc
