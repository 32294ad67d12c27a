#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ro/circuit.hpp"

namespace ro::rank_select {

enum class Variant { scan, blocked };

// w = ceil(log2(N+1)): width of the nth / counter / out registers.
unsigned width_for(std::uint64_t n);

// Position of the r-th set bit (0-indexed) or the sentinel mask.size().
std::uint64_t select_semantics(const std::vector<bool>& mask, std::uint64_t r);
// Same, for masks packed in the low n bits of `mask` (bit i = position i).
std::uint64_t select_semantics(std::uint64_t mask, unsigned n, std::uint64_t r);

// Prefix of length t with its `weight` ones packed to the left, followed by n - t ones.
std::vector<bool> canonical_mask(std::uint64_t n, std::uint64_t t, std::uint64_t weight);

struct ScanScratch {
  std::span<const Qubit> rank;  // w, clean
  std::span<const Qubit> eq;    // w, clean
  Qubit match;                  // clean
};

// out ^= select(mask, nth) using the scan construction. `nth` may be narrower than out
// (missing high bits read as zero). All scratch returns to zero.
void emit_scan(Builder& b, std::span<const Qubit> mask, std::span<const Qubit> nth, std::span<const Qubit> out,
               const ScanScratch& s);

struct BlockedScratch {
  std::span<const Qubit> u;    // w + 1, clean
  std::span<const Qubit> cnt;  // ceil(log2(B+1)), clean
  std::span<const Qubit> lam;  // same width as cnt, clean
  Qubit carry;
  Qubit take;
};

void emit_blocked(Builder& b, std::span<const Qubit> mask, std::span<const Qubit> nth, std::span<const Qubit> out,
                  const BlockedScratch& s, unsigned block);

// Standalone circuits with registers mask[N], nth[w] (role rank), scratch (role ancilla),
// out[w] (role output); layout is declaration order.
Circuit build_scan(unsigned n);
Circuit build_blocked(unsigned n, unsigned block = 0);  // block 0 means B = w
Circuit build(Variant v, unsigned n);

// Ancilla qubits used by the scan construction inside a larger circuit.
inline unsigned scan_scratch_qubits(unsigned w) { return 2 * w + 1; }

}  // namespace ro::rank_select
