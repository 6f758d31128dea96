#pragma once

#include "hcolc/dhcol.hpp"
#include "hcolc/rng.hpp"
#include "hcolc/sigma.hpp"

namespace hcolc::gen {

// Random well-scoped DHCOL programs plus a matching context and memory.
// Evaluation may err (division by zero, sparse reads); it must never run out
// of estimated fuel.
struct DGenOpts {
  size_t max_depth = 6;
  uint64_t max_loop = 8;
  size_t blocks = 3;
  uint64_t block_size = 4;
  bool dense_blocks = true;
};

struct DProgram {
  dhcol::DshPtr op;
  dhcol::EvalContext ctx;
  dhcol::Memory mem;
};

DProgram random_dsh_program(Rng& rng, const DGenOpts& opts = {});

// Random well-formed operators in the final Σ-HCOL subset (no Scatter, Gather
// or lifted operators), constructed to pass facts_check so they survive the
// whole lowering chain.
sigma::SHExprPtr random_final_shexpr(Rng& rng, size_t input_dim, size_t depth);

}  // namespace hcolc::gen
