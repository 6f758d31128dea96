#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <variant>

namespace hcolc {

enum class ErrKind {
  DimMismatch,
  KindMismatch,
  RangeError,
  IllTyped,
  MapNotInjective,
  RewriteError,
  SparseRead,
  MergeCollision,
  KeyOutOfRange,
  LookupError,
  TypeErrorInContext,
  DivByZero,
  IndexOOB,
  UnknownConstant,
  NatOverflow,
  StructureMismatch,
  Unsupported,
  CompileError,
  NameCollision,
  UnboundedRange,
  ParseError,
  StageFailure,
  SetupError,
  EvalError,
};

struct Error {
  ErrKind kind;
  std::string message;
};

const char* err_kind_name(ErrKind k);

// Language-level failure channel: evaluators and translators return Result<T>
// instead of throwing, so tests can pattern-match on error kinds.
template <class T>
class Result {
 public:
  Result(T value) : data_(std::move(value)) {}
  Result(Error e) : data_(std::move(e)) {}
  static Result err(ErrKind kind, std::string msg) { return Result(Error{kind, std::move(msg)}); }

  bool ok() const { return std::holds_alternative<T>(data_); }
  explicit operator bool() const { return ok(); }

  const T& value() const& {
    if (!ok()) throw std::logic_error("Result::value on error: " + error().message);
    return std::get<T>(data_);
  }
  T& value() & {
    if (!ok()) throw std::logic_error("Result::value on error: " + error().message);
    return std::get<T>(data_);
  }
  T&& take() && {
    if (!ok()) throw std::logic_error("Result::take on error: " + error().message);
    return std::get<T>(std::move(data_));
  }
  const Error& error() const { return std::get<Error>(data_); }

 private:
  std::variant<T, Error> data_;
};

struct Unit {};

}  // namespace hcolc
