#pragma once

#include <span>
#include <vector>

#include "ro/circuit.hpp"

namespace ro::arith {

// reg += 1 (mod 2^|reg|) when every control holds. MCX cascade, |reg| gates, no scratch.
void increment(Builder& b, std::span<const Control> ctrl, std::span<const Qubit> reg);
// reg -= 1 under the same controls (the cascade in reverse order).
void decrement(Builder& b, std::span<const Control> ctrl, std::span<const Qubit> reg);

// Cuccaro ripple-carry adder: acc += a (mod 2^|acc|), |a| <= |acc|. `carry` is a clean
// ancilla restored to 0; `a` is restored. Bits of acc above |a| receive the carry through
// an MCX cascade.
void add(Builder& b, std::span<const Qubit> a, std::span<const Qubit> acc, Qubit carry);
void sub(Builder& b, std::span<const Qubit> a, std::span<const Qubit> acc, Qubit carry);

// flag ^= [a < b] AND all `extra` controls hold. |a| == |b|; `carry` clean ancilla.
// The gate sequence is its own inverse, so emitting it twice clears the flag again.
void less_than(Builder& b, std::span<const Qubit> a, std::span<const Qubit> bb, Qubit carry,
               std::span<const Control> extra, Qubit flag);

// Smallest width able to hold the values 0..n.
unsigned bits_for(std::uint64_t n);

}  // namespace ro::arith
