#pragma once

#include "hcolc/dhcol.hpp"

namespace hcolc::llvmgen {

// ---- minimal IR AST ------------------------------------------------------------

struct Instr {
  enum class K : uint8_t {
    AllocaI64,
    AllocaArr,  // [n x double]
    LoadF64,
    LoadI64,
    StoreF64,
    StoreI64,
    Gep,  // element pointer into [n x double]
    FAdd,
    FSub,
    FMul,
    FCmpOlt,
    SelF64,
    SelI64,
    Fabs,
    Add,
    Sub,
    Mul,
    UDiv,
    URem,
    ICmpUlt,
    CallOp,      // call void @fn(ptr, ptr)
    PrintF64,    // call printf("%a ", v)
    PrintNl,
  };
  K k;
  std::string res;      // result register (empty for void)
  std::string a, b, c;  // operands (registers or literals)
  uint64_t n = 0;       // array length for AllocaArr/Gep
  std::string callee;
  uint64_t in_size = 0, out_size = 0;  // CallOp pointer types
};

struct Terminator {
  enum class K : uint8_t { Br, CondBr, RetVoid, RetI32 } k = K::Br;
  std::string cond, target, target2;
};

struct BasicBlock {
  std::string label;
  std::vector<Instr> body;
  Terminator term;
};

// non-empty list of blocks plus its entry label
struct Segment {
  std::string entry;
  std::vector<BasicBlock> blocks;
};

struct GlobalDef {
  std::string name;
  uint64_t size = 0;
  std::vector<double> init;
  bool internal = true;
  bool zero = false;
};

struct Function {
  std::string name;
  bool returns_i32 = false;
  // operator functions take ([i x double]*, [o x double]*)
  bool takes_ptrs = false;
  uint64_t in_size = 0, out_size = 0;
  std::vector<BasicBlock> blocks;
};

struct LlvmModule {
  std::vector<GlobalDef> globals;
  std::vector<Function> functions;
  bool needs_fabs = false;
  bool needs_printf = false;
};

// ---- codegen state --------------------------------------------------------------

struct GammaEntry {
  enum class Kind : uint8_t { BlockPtr, I64Slot, F64Val } kind = Kind::BlockPtr;
  std::string name;   // register or global symbol
  uint64_t size = 0;  // BlockPtr array length
};

struct IRState {
  uint64_t block_count = 0;
  uint64_t local_count = 0;
  uint64_t void_count = 0;
  std::vector<GammaEntry> gamma;  // parallel to the evaluation context

  std::string fresh_local() { return "%l" + std::to_string(local_count++); }
  std::string fresh_block(const std::string& prefix) {
    return prefix + ".b" + std::to_string(block_count++);
  }
  const GammaEntry* lookup(size_t de_bruijn) const {
    if (de_bruijn >= gamma.size()) return nullptr;
    return &gamma[gamma.size() - 1 - de_bruijn];
  }
};

// ---- generators -------------------------------------------------------------------

// Canonical counted-loop skeleton: entry (init, bound check), body splice,
// loop continuation block (increment, compare, back edge).
Segment gen_while_loop(const std::string& prefix, const std::string& from, const std::string& to,
                       const std::string& loopvar_slot, const std::string& loopcont,
                       const std::string& body_entry, std::vector<BasicBlock> body_blocks,
                       std::vector<Instr> init_code, const std::string& nextblock, IRState& st);

// Destination-passing operator compiler: the produced segment transfers
// control to nextblock.
Result<Segment> gen_ir(const dhcol::DshPtr& op, const std::string& nextblock, IRState& st);

struct FSHCOLProgram {
  uint64_t input_dim = 0, output_dim = 0;
  std::string name;
  std::vector<std::pair<std::string, uint64_t>> globals;  // name, block size
  dhcol::DshPtr op;
  // test builds keep randomly initialized globals internal; external linkage
  // exposes them to a surrounding program
  bool internal_globals = true;
};

// Self-enclosed module: initialized globals, the operator function, and a
// main that runs it and prints the output block as hex floats.
Result<LlvmModule> compile_w_main(const FSHCOLProgram& p, std::span<const double> data,
                                  IRState st = {});

std::string emit_text(const LlvmModule& m);

// bit-exact double literal (LLVM hex form)
std::string double_literal(double v);

}  // namespace hcolc::llvmgen
