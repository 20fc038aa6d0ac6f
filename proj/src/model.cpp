#include "nsesmc/model.hpp"

#include <stdexcept>

namespace nsesmc {

void BlockLikelihood::evaluate(ChainState& state, int n) const {
  if (n < 0 || n > horizon()) throw std::out_of_range("block index out of range");
  state.log_liks.assign(static_cast<std::size_t>(n), 0.0);
  state.evolved = state.field;
  for (int s = 0; s < n; ++s) state.log_liks[s] = advance_block(state.evolved, s);
  if (n > 0) {
    evolve_calls_.fetch_add(1, std::memory_order_relaxed);
    block_solves_.fetch_add(static_cast<std::uint64_t>(n), std::memory_order_relaxed);
  }
}

void BlockLikelihood::extend(ChainState& state) const {
  const int from = state.blocks();
  if (from >= horizon()) throw std::out_of_range("no further blocks to assimilate");
  state.log_liks.push_back(advance_block(state.evolved, from));
  evolve_calls_.fetch_add(1, std::memory_order_relaxed);
  block_solves_.fetch_add(1, std::memory_order_relaxed);
}

}  // namespace nsesmc
