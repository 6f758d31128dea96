#include "hcolc/carrier.hpp"

#include <cmath>
#include <cstdio>

namespace hcolc {

CarrierValue CarrierValue::zero(CarrierKind k, sym::SexprArena* arena) {
  switch (k) {
    case CarrierKind::Rational: return CarrierValue(Rational());
    case CarrierKind::Binary64: return CarrierValue(0.0);
    case CarrierKind::Symbolic: return CarrierValue(SymRef{arena, arena->zero()});
  }
  return CarrierValue();
}

CarrierValue CarrierValue::one(CarrierKind k, sym::SexprArena* arena) {
  switch (k) {
    case CarrierKind::Rational: return CarrierValue(Rational(1));
    case CarrierKind::Binary64: return CarrierValue(1.0);
    case CarrierKind::Symbolic: return CarrierValue(SymRef{arena, arena->one()});
  }
  return CarrierValue();
}

bool CarrierValue::equals(const CarrierValue& o) const {
  if (kind() != o.kind()) return false;
  switch (kind()) {
    case CarrierKind::Rational: return rational() == o.rational();
    case CarrierKind::Binary64: return binary64() == o.binary64();
    case CarrierKind::Symbolic: {
      SymRef a = symbolic(), b = o.symbolic();
      return sym::SexprArena::equal(*a.arena, a.node, *b.arena, b.node);
    }
  }
  return false;
}

bool CarrierValue::is_zero() const {
  switch (kind()) {
    case CarrierKind::Rational: return rational().is_zero();
    case CarrierKind::Binary64: return binary64() == 0.0;
    case CarrierKind::Symbolic: return symbolic().arena->at(symbolic().node).op == sym::SOp::Zero;
  }
  return false;
}

std::string CarrierValue::to_string() const {
  switch (kind()) {
    case CarrierKind::Rational: return rational().to_string();
    case CarrierKind::Binary64: {
      char buf[48];
      snprintf(buf, sizeof buf, "%a", binary64());
      return buf;
    }
    case CarrierKind::Symbolic: return symbolic().arena->to_string(symbolic().node);
  }
  return "<?>";
}

namespace {

double d_min(double a, double b) { return b < a ? b : a; }
double d_max(double a, double b) { return a < b ? b : a; }

sym::SOp sym_op(CtOp op) {
  switch (op) {
    case CtOp::Plus: return sym::SOp::Plus;
    case CtOp::Sub: return sym::SOp::Sub;
    case CtOp::Mult: return sym::SOp::Mult;
    case CtOp::Min: return sym::SOp::Min;
    case CtOp::Max: return sym::SOp::Max;
    case CtOp::Abs: return sym::SOp::Abs;
    case CtOp::ZLess: return sym::SOp::ZLess;
  }
  return sym::SOp::Zero;
}

}  // namespace

CarrierValue ct_arith(CtOp op, const CarrierValue& a) {
  if (op != CtOp::Abs) throw KindMismatchError("ct_arith: missing second operand");
  switch (a.kind()) {
    case CarrierKind::Rational: return CarrierValue(a.rational().abs());
    case CarrierKind::Binary64: return CarrierValue(std::fabs(a.binary64()));
    case CarrierKind::Symbolic: {
      SymRef s = a.symbolic();
      return CarrierValue(SymRef{s.arena, s.arena->unary(sym::SOp::Abs, s.node)});
    }
  }
  throw KindMismatchError("ct_arith: bad kind");
}

CarrierValue ct_arith(CtOp op, const CarrierValue& a, const CarrierValue& b) {
  if (op == CtOp::Abs) return ct_arith(op, a);
  if (a.kind() != b.kind()) throw KindMismatchError("ct_arith: operand kinds differ");
  switch (a.kind()) {
    case CarrierKind::Rational: {
      const Rational& x = a.rational();
      const Rational& y = b.rational();
      switch (op) {
        case CtOp::Plus: return CarrierValue(x + y);
        case CtOp::Sub: return CarrierValue(x - y);
        case CtOp::Mult: return CarrierValue(x * y);
        case CtOp::Min: return CarrierValue(y < x ? y : x);
        case CtOp::Max: return CarrierValue(x < y ? y : x);
        case CtOp::ZLess: return CarrierValue(x < y ? Rational(1) : Rational(0));
        case CtOp::Abs: break;
      }
      break;
    }
    case CarrierKind::Binary64: {
      double x = a.binary64(), y = b.binary64();
      switch (op) {
        case CtOp::Plus: return CarrierValue(x + y);
        case CtOp::Sub: return CarrierValue(x - y);
        case CtOp::Mult: return CarrierValue(x * y);
        case CtOp::Min: return CarrierValue(d_min(x, y));
        case CtOp::Max: return CarrierValue(d_max(x, y));
        case CtOp::ZLess: return CarrierValue(x < y ? 1.0 : 0.0);
        case CtOp::Abs: break;
      }
      break;
    }
    case CarrierKind::Symbolic: {
      SymRef x = a.symbolic(), y = b.symbolic();
      if (x.arena != y.arena) throw KindMismatchError("ct_arith: symbolic values from different arenas");
      return CarrierValue(SymRef{x.arena, x.arena->binary(sym_op(op), x.node, y.node)});
    }
  }
  throw KindMismatchError("ct_arith: bad op/kind");
}

CarrierLit CarrierLit::of(Rational v) {
  if (v.is_zero()) return zero();
  if (v == Rational(1)) return one();
  return {Tag::Q, std::move(v)};
}

CarrierValue CarrierLit::materialize(CarrierKind k, sym::SexprArena* arena) const {
  switch (tag) {
    case Tag::Zero: return CarrierValue::zero(k, arena);
    case Tag::One: return CarrierValue::one(k, arena);
    case Tag::Q:
      switch (k) {
        case CarrierKind::Rational: return CarrierValue(q);
        case CarrierKind::Binary64: return CarrierValue(q.to_double());
        case CarrierKind::Symbolic:
          throw KindMismatchError("symbolic carrier admits only Zero/One literals");
      }
  }
  return CarrierValue();
}

std::string CarrierLit::to_string() const {
  switch (tag) {
    case Tag::Zero: return "0";
    case Tag::One: return "1";
    case Tag::Q: return q.to_string();
  }
  return "?";
}

uint64_t NatValue::to_u64_clamped() const {
  if (kind_ == NatKind::U64) return u64_;
  return big_.fits_uint64() ? big_.to_uint64() : ~0ull;
}

Result<NatValue> nat_from_nat(const BigInt& n, NatKind kind) {
  if (n.is_negative()) return Result<NatValue>::err(ErrKind::RangeError, "negative natural");
  if (kind == NatKind::BigNat) return NatValue::big(n);
  if (!n.fits_uint64())
    return Result<NatValue>::err(ErrKind::NatOverflow, "natural " + n.to_decimal() + " does not fit 64 bits");
  return NatValue::u64(n.to_uint64());
}

NatValue nat_from_usize(uint64_t n, NatKind kind) {
  return kind == NatKind::U64 ? NatValue::u64(n) : NatValue::big(BigInt::from_u64(n));
}

Result<NatValue> nat_arith(NatOp op, const NatValue& a, const NatValue& b) {
  if (a.kind() != b.kind())
    return Result<NatValue>::err(ErrKind::KindMismatch, "nat_arith: operand kinds differ");
  if (a.kind() == NatKind::U64) {
    uint64_t x = a.to_u64_clamped(), y = b.to_u64_clamped();
    switch (op) {
      case NatOp::Plus: return NatValue::u64(x + y);
      case NatOp::Minus: return NatValue::u64(x - y);  // wraps modulo 2^64
      case NatOp::Mult: return NatValue::u64(x * y);
      case NatOp::Div:
        if (y == 0) return Result<NatValue>::err(ErrKind::DivByZero, "Division by 0");
        return NatValue::u64(x / y);
      case NatOp::Mod:
        if (y == 0) return Result<NatValue>::err(ErrKind::DivByZero, "Mod by 0");
        return NatValue::u64(x % y);
      case NatOp::Min: return NatValue::u64(x < y ? x : y);
      case NatOp::Max: return NatValue::u64(x < y ? y : x);
    }
  } else {
    BigInt x = a.to_nat(), y = b.to_nat();
    switch (op) {
      case NatOp::Plus: return NatValue::big(x + y);
      case NatOp::Minus: return NatValue::big(x < y ? BigInt() : x - y);  // truncated at 0
      case NatOp::Mult: return NatValue::big(x * y);
      case NatOp::Div:
        if (y.is_zero()) return Result<NatValue>::err(ErrKind::DivByZero, "Division by 0");
        return NatValue::big(x / y);
      case NatOp::Mod:
        if (y.is_zero()) return Result<NatValue>::err(ErrKind::DivByZero, "Mod by 0");
        return NatValue::big(x % y);
      case NatOp::Min: return NatValue::big(x < y ? x : y);
      case NatOp::Max: return NatValue::big(x < y ? y : x);
    }
  }
  return Result<NatValue>::err(ErrKind::KindMismatch, "nat_arith: bad op");
}

const char* err_kind_name(ErrKind k) {
  switch (k) {
    case ErrKind::DimMismatch: return "DimMismatch";
    case ErrKind::KindMismatch: return "KindMismatch";
    case ErrKind::RangeError: return "RangeError";
    case ErrKind::IllTyped: return "IllTyped";
    case ErrKind::MapNotInjective: return "MapNotInjective";
    case ErrKind::RewriteError: return "RewriteError";
    case ErrKind::SparseRead: return "SparseRead";
    case ErrKind::MergeCollision: return "MergeCollision";
    case ErrKind::KeyOutOfRange: return "KeyOutOfRange";
    case ErrKind::LookupError: return "LookupError";
    case ErrKind::TypeErrorInContext: return "TypeErrorInContext";
    case ErrKind::DivByZero: return "DivByZero";
    case ErrKind::IndexOOB: return "IndexOOB";
    case ErrKind::UnknownConstant: return "UnknownConstant";
    case ErrKind::NatOverflow: return "NatOverflow";
    case ErrKind::StructureMismatch: return "StructureMismatch";
    case ErrKind::Unsupported: return "Unsupported";
    case ErrKind::CompileError: return "CompileError";
    case ErrKind::NameCollision: return "NameCollision";
    case ErrKind::UnboundedRange: return "UnboundedRange";
    case ErrKind::ParseError: return "ParseError";
    case ErrKind::StageFailure: return "StageFailure";
    case ErrKind::SetupError: return "SetupError";
    case ErrKind::EvalError: return "EvalError";
  }
  return "?";
}

}  // namespace hcolc
