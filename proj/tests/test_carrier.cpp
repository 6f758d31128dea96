#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hcolc/carrier.hpp"
#include "hcolc/rng.hpp"

using namespace hcolc;

static Rational q(int64_t n, int64_t d = 1) { return Rational(BigInt(n), BigInt(d)); }

TEST_CASE("bigint basics") {
  BigInt a = BigInt::from_decimal("123456789012345678901234567890");
  BigInt b = BigInt::from_decimal("987654321098765432109876543210");
  CHECK((a + b).to_decimal() == "1111111110111111111011111111100");
  CHECK((b - a).to_decimal() == "864197532086419753208641975320");
  CHECK((a * BigInt(int64_t(0))).is_zero());
  CHECK((-a).is_negative());
  CHECK((a - a).is_zero());
  BigInt p = a * b;
  BigInt qo, r;
  BigInt::divmod(p, a, qo, r);
  CHECK(qo == b);
  CHECK(r.is_zero());
  BigInt::divmod(p + BigInt(int64_t(7)), a, qo, r);
  CHECK(r == BigInt(int64_t(7)));
  CHECK(BigInt::from_decimal("-42").to_decimal() == "-42");
  CHECK(BigInt(int64_t(-5)) + BigInt(int64_t(5)) == BigInt());
}

TEST_CASE("bigint gcd and shifts") {
  CHECK(BigInt::gcd(BigInt(int64_t(12)), BigInt(int64_t(18))) == BigInt(int64_t(6)));
  CHECK(BigInt::gcd(BigInt(int64_t(0)), BigInt(int64_t(7))) == BigInt(int64_t(7)));
  BigInt x = BigInt(int64_t(1)).shl(130);
  CHECK(x.bit_length() == 131);
  CHECK(x.shr(130) == BigInt(int64_t(1)));
  CHECK(x.trailing_zero_bits() == 130);
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    BigInt u(rng.range_i64(-100000, 100000));
    BigInt v(rng.range_i64(-100000, 100000));
    BigInt g = BigInt::gcd(u, v);
    if (!u.is_zero() || !v.is_zero()) {
      CHECK((u % g).is_zero());
      CHECK((v % g).is_zero());
    }
  }
}

TEST_CASE("bigint division randomized against reconstruction") {
  Rng rng(7);
  for (int i = 0; i < 300; ++i) {
    BigInt a(rng.range_i64(-1000000000, 1000000000));
    a = a * BigInt(rng.range_i64(1, 1000000000)) + BigInt(rng.range_i64(0, 1000));
    BigInt b(rng.range_i64(1, 100000));
    BigInt qo, r;
    BigInt::divmod(a, b, qo, r);
    CHECK(qo * b + r == a);
    CHECK(r.abs() < b.abs());
  }
}

TEST_CASE("rational exact field arithmetic") {
  // plus Rational(1/3) Rational(1/6) -> Rational(1/2)
  CarrierValue r = ct_arith(CtOp::Plus, CarrierValue(q(1, 3)), CarrierValue(q(1, 6)));
  CHECK(r.rational() == q(1, 2));
  CHECK((q(1, 3) * q(3, 1)) == q(1));
  CHECK((q(2, 4)) == q(1, 2));  // canonical form
  CHECK(q(-1, -2) == q(1, 2));
  CHECK(q(1, -2) == q(-1, 2));
  CHECK(q(7, 3).to_string() == "7/3");
  CHECK(Rational::parse("7/3") == q(7, 3));
  CHECK(Rational::parse("-5") == q(-5));
  CHECK(Rational::parse("0.5") == q(1, 2));
  CHECK(Rational::parse("0x1.8p1") == q(3));
}

TEST_CASE("rational ring laws (randomized)") {
  Rng rng(42);
  for (int i = 0; i < 500; ++i) {
    Rational a = rng.rational(), b = rng.rational(), c = rng.rational();
    CHECK(a + b == b + a);
    CHECK(a * b == b * a);
    CHECK((a + b) + c == a + (b + c));
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK(a + Rational() == a);
    CHECK(a * Rational(1) == a);
    CHECK(a - a == Rational());
  }
}

TEST_CASE("double <-> rational round trips") {
  Rng rng(3);
  for (int i = 0; i < 2000; ++i) {
    double d = rng.real(-1e6, 1e6);
    CHECK(Rational::from_double(d).to_double() == d);
  }
  // directed: correct rounding of non-representables
  CHECK(Rational(BigInt(int64_t(1)), BigInt(int64_t(3))).to_double() == 1.0 / 3.0);
  CHECK(Rational(BigInt(int64_t(1)), BigInt(int64_t(10))).to_double() == 0.1);
  BigInt big = BigInt(int64_t(1)).shl(53);
  CHECK(Rational(big + BigInt(int64_t(1)), BigInt(int64_t(1))).to_double() ==
        std::ldexp(1.0, 53));  // ties to even
  CHECK(Rational(big + BigInt(int64_t(3)), BigInt(int64_t(1))).to_double() ==
        std::ldexp(1.0, 53) + 4);
}

TEST_CASE("binary64 carrier follows IEEE-754 nearest-even") {
  CarrierValue a(0.1), b(0.2);
  CarrierValue s = ct_arith(CtOp::Plus, a, b);
  CHECK(s.binary64() != 0.3);  // 0.1 + 0.2 != 0.3 in binary64
  CHECK(ct_arith(CtOp::ZLess, CarrierValue(2.0), CarrierValue(3.0)).binary64() == 1.0);
  CHECK(ct_arith(CtOp::ZLess, CarrierValue(3.0), CarrierValue(2.0)).binary64() == 0.0);
}

TEST_CASE("zless and abs invariants for all kinds") {
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    CarrierValue a(rng.rational());
    CHECK(ct_arith(CtOp::ZLess, a, a).is_zero());
    CarrierValue ab = ct_arith(CtOp::Abs, a);
    CHECK(!ab.rational().is_negative());
    CarrierValue d(rng.real(-100, 100));
    CHECK(ct_arith(CtOp::ZLess, d, d).is_zero());
    CHECK(ct_arith(CtOp::Abs, d).binary64() >= 0.0);
  }
}

TEST_CASE("symbolic carrier builds nodes") {
  sym::SexprArena arena;
  CarrierValue x(SymRef{&arena, arena.var(0)});
  CarrierValue y(SymRef{&arena, arena.var(1)});
  CarrierValue s = ct_arith(CtOp::Plus, x, y);
  CHECK(arena.to_string(s.symbolic().node) == "(SPlus (SVar 0) (SVar 1))");
  CarrierValue z = ct_arith(CtOp::ZLess, s, ct_arith(CtOp::Abs, x));
  CHECK(arena.to_string(z.symbolic().node) == "(SZLess (SPlus (SVar 0) (SVar 1)) (SAbs (SVar 0)))");
}

TEST_CASE("kind mismatch is rejected") {
  CHECK_THROWS_AS(ct_arith(CtOp::Plus, CarrierValue(q(1)), CarrierValue(1.0)), KindMismatchError);
}

TEST_CASE("nat_from conversions") {
  // from_N 0 always succeeds
  CHECK(nat_from_usize(0, NatKind::U64).to_nat().is_zero());
  CHECK(nat_from_usize(5, NatKind::BigNat).to_nat() == BigInt(int64_t(5)));
  BigInt two64 = BigInt(int64_t(1)).shl(64);
  auto r = nat_from_nat(two64, NatKind::U64);
  CHECK(!r.ok());
  CHECK(r.error().kind == ErrKind::NatOverflow);
  CHECK(nat_from_nat(two64, NatKind::BigNat).ok());
  // monotone failure: anything below a successful conversion succeeds
  auto hi = nat_from_nat(two64 - BigInt(int64_t(1)), NatKind::U64);
  CHECK(hi.ok());
  Rng rng(9);
  for (int i = 0; i < 100; ++i) {
    uint64_t v = rng.next();
    CHECK(nat_from_nat(BigInt::from_u64(v), NatKind::U64).ok());
  }
}

TEST_CASE("nat minus semantics differ per kind") {
  // BigNat truncates at 0; U64 wraps modulo 2^64
  NatValue a3 = NatValue::big(BigInt(int64_t(3)));
  NatValue a5 = NatValue::big(BigInt(int64_t(5)));
  CHECK(nat_arith(NatOp::Minus, a3, a5).value().to_nat().is_zero());
  NatValue u3 = NatValue::u64(3), u5 = NatValue::u64(5);
  CHECK(nat_arith(NatOp::Minus, u3, u5).value().to_u64_clamped() == static_cast<uint64_t>(-2));
  CHECK(!nat_arith(NatOp::Div, u3, NatValue::u64(0)).ok());
}

TEST_CASE("carrier literal materialization") {
  sym::SexprArena arena;
  CHECK(CarrierLit::one().materialize(CarrierKind::Binary64).binary64() == 1.0);
  CHECK(CarrierLit::of(q(1, 3)).materialize(CarrierKind::Rational).rational() == q(1, 3));
  CHECK_THROWS(CarrierLit::of(q(1, 3)).materialize(CarrierKind::Symbolic, &arena));
  CHECK(arena.to_string(CarrierLit::zero().materialize(CarrierKind::Symbolic, &arena).symbolic().node) ==
        "SConstZero");
}
