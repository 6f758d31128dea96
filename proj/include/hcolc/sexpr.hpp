#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hcolc::sym {

enum class SOp : uint8_t { Zero, One, Var, Plus, Sub, Mult, Abs, Min, Max, ZLess };

struct SNode {
  SOp op;
  uint32_t var = 0;  // for Var
  uint32_t a = 0;    // child indices into the arena
  uint32_t b = 0;
};

// Append-only arena of arithmetic S-expression nodes. Node 0 is reserved (Zero).
class SexprArena {
 public:
  SexprArena() { nodes_.push_back({SOp::Zero, 0, 0, 0}); }

  uint32_t zero() { return 0; }
  uint32_t one() {
    if (one_ == 0) one_ = push({SOp::One, 0, 0, 0});
    return one_;
  }
  uint32_t var(uint32_t id) { return push({SOp::Var, id, 0, 0}); }
  uint32_t unary(SOp op, uint32_t a) { return push({op, 0, a, 0}); }
  uint32_t binary(SOp op, uint32_t a, uint32_t b) { return push({op, 0, a, b}); }

  const SNode& at(uint32_t i) const { return nodes_[i]; }
  size_t size() const { return nodes_.size(); }

  std::string to_string(uint32_t i) const;

  // Structural equality up to a consistent renaming of variable ids.
  static bool alpha_equivalent(const SexprArena& x, uint32_t i, const SexprArena& y, uint32_t j);
  // Exact structural equality, including variable ids.
  static bool equal(const SexprArena& x, uint32_t i, const SexprArena& y, uint32_t j);

 private:
  uint32_t push(SNode n) {
    nodes_.push_back(n);
    return static_cast<uint32_t>(nodes_.size() - 1);
  }
  std::vector<SNode> nodes_;
  uint32_t one_ = 0;
};

}  // namespace hcolc::sym
