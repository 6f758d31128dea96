#pragma once

#include <map>
#include <optional>
#include <set>

#include "hcolc/sigma.hpp"

namespace hcolc::mshcol {

// Finite map offset -> value; an absent key is an uninitialized cell and
// reading it is an error at this level.
class MemBlock {
 public:
  std::optional<CarrierValue> lookup(uint64_t k) const {
    auto it = cells_.find(k);
    if (it == cells_.end()) return std::nullopt;
    return it->second;
  }
  void set(uint64_t k, CarrierValue v) { cells_[k] = std::move(v); }
  void erase(uint64_t k) { cells_.erase(k); }
  bool contains(uint64_t k) const { return cells_.count(k) > 0; }
  size_t size() const { return cells_.size(); }
  const std::map<uint64_t, CarrierValue>& cells() const { return cells_; }

  bool equals(const MemBlock& o) const;

 private:
  std::map<uint64_t, CarrierValue> cells_;
};

// Finite map address -> block; memory_next_key returns a fresh address.
class Memory {
 public:
  std::optional<MemBlock> lookup(uint64_t addr) const {
    auto it = blocks_.find(addr);
    if (it == blocks_.end()) return std::nullopt;
    return it->second;
  }
  const MemBlock* lookup_ref(uint64_t addr) const {
    auto it = blocks_.find(addr);
    return it == blocks_.end() ? nullptr : &it->second;
  }
  void set(uint64_t addr, MemBlock b) { blocks_[addr] = std::move(b); }
  void remove(uint64_t addr) { blocks_.erase(addr); }
  bool exists(uint64_t addr) const { return blocks_.count(addr) > 0; }
  uint64_t next_key() const { return blocks_.empty() ? 0 : blocks_.rbegin()->first + 1; }
  const std::map<uint64_t, MemBlock>& blocks() const { return blocks_; }

 private:
  std::map<uint64_t, MemBlock> blocks_;
};

enum class MOp : uint8_t {
  Embed,
  Pick,
  Pointwise,
  BinOp,
  Inductor,
  Apply2Union,
  Compose,
  IReduction,
  IUnion,
};

struct MSHExpr;
using MSHExprPtr = std::shared_ptr<const MSHExpr>;

struct MFamily {
  size_t size = 0;
  MSHExprPtr body;
};

struct MSHExpr {
  MOp op;
  size_t n = 0;     // size parameter
  IndexExpr b;      // Embed/Pick position
  ScalarFun fn;     // Pointwise/BinOp/Inductor
  IndexExpr count;  // Inductor iterations
  CarrierLit z;     // Inductor initial / IReduction initial
  ScalarFun dot;    // Apply2Union/IReduction
  MSHExprPtr f, g;
  MFamily fam;
};

MSHExprPtr msh_embed(size_t n, IndexExpr b);
MSHExprPtr msh_pick(size_t n, IndexExpr b);
MSHExprPtr msh_pointwise(size_t n, ScalarFun f);
MSHExprPtr msh_binop(size_t n, ScalarFun f);
MSHExprPtr msh_inductor(IndexExpr count, ScalarFun f, CarrierLit z);
MSHExprPtr msh_apply2union(ScalarFun dot, MSHExprPtr f, MSHExprPtr g);
MSHExprPtr msh_compose(MSHExprPtr f, MSHExprPtr g);
MSHExprPtr msh_ireduction(CarrierLit z, ScalarFun dot, size_t size, MSHExprPtr body);
MSHExprPtr msh_iunion(size_t size, MSHExprPtr body);

Result<hcol::Dims> dims(const MSHExprPtr& e);
Result<sigma::SparsityContract> msh_contract(const MSHExprPtr& e);

struct MEvalOpts {
  CarrierKind kind = CarrierKind::Rational;
  sym::SexprArena* arena = nullptr;
};

Result<MemBlock> eval_mshcol(const MSHExprPtr& e, const MemBlock& x, const ParamEnv& env,
                             const MEvalOpts& opts = {});

MemBlock svector_to_mem_block(const sigma::SparseVector& v);
Result<sigma::SparseVector> mem_block_to_svector(const MemBlock& b, size_t n, const CarrierValue& s);

sigma::FactsReport msh_facts_check(const MSHExprPtr& e, size_t samples, uint64_t seed = 1,
                                   const std::map<std::string, size_t>& params = {});

struct CompatVerdict {
  bool ok = true;
  std::string detail;
};

// Some(svector_to_mem_block(sh out)) == msh out, on sparse inputs dense on the
// input index set.
CompatVerdict check_sh_msh_compat(const sigma::SHExprPtr& se, const MSHExprPtr& me, size_t samples,
                                  uint64_t seed = 1, const std::map<std::string, size_t>& params = {});

std::string to_string(const MSHExprPtr& e);

}  // namespace hcolc::mshcol
