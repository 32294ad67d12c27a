#include "ro/arith.hpp"

#include <stdexcept>

namespace ro::arith {

unsigned bits_for(std::uint64_t n) {
  unsigned w = 0;
  while (w < 64 && (std::uint64_t{1} << w) <= n) ++w;
  return w == 0 ? 1 : w;
}

void increment(Builder& b, std::span<const Control> ctrl, std::span<const Qubit> reg) {
  std::vector<Control> c;
  c.reserve(ctrl.size() + reg.size());
  for (std::size_t i = reg.size(); i-- > 0;) {
    c.assign(ctrl.begin(), ctrl.end());
    for (std::size_t j = 0; j < i; ++j) c.push_back({reg[j], true});
    b.mcx(c, reg[i]);
  }
}

void decrement(Builder& b, std::span<const Control> ctrl, std::span<const Qubit> reg) {
  std::vector<Control> c;
  c.reserve(ctrl.size() + reg.size());
  for (std::size_t i = 0; i < reg.size(); ++i) {
    c.assign(ctrl.begin(), ctrl.end());
    for (std::size_t j = 0; j < i; ++j) c.push_back({reg[j], true});
    b.mcx(c, reg[i]);
  }
}

namespace {
void maj(Builder& b, Qubit x, Qubit y, Qubit z) {
  b.cx(z, y);
  b.cx(z, x);
  b.ccx(x, y, z);
}
void maj_inv(Builder& b, Qubit x, Qubit y, Qubit z) {
  b.ccx(x, y, z);
  b.cx(z, x);
  b.cx(z, y);
}
void uma(Builder& b, Qubit x, Qubit y, Qubit z) {
  b.ccx(x, y, z);
  b.cx(z, x);
  b.cx(x, y);
}
}  // namespace

void add(Builder& b, std::span<const Qubit> a, std::span<const Qubit> acc, Qubit carry) {
  const std::size_t n = a.size();
  if (n == 0) return;
  if (n > acc.size()) throw std::invalid_argument("arith::add: addend wider than accumulator");
  maj(b, carry, acc[0], a[0]);
  for (std::size_t i = 1; i < n; ++i) maj(b, a[i - 1], acc[i], a[i]);
  if (acc.size() > n) {
    Control c{a[n - 1], true};
    increment(b, std::span(&c, 1), acc.subspan(n));
  }
  for (std::size_t i = n; i-- > 1;) uma(b, a[i - 1], acc[i], a[i]);
  uma(b, carry, acc[0], a[0]);
}

void sub(Builder& b, std::span<const Qubit> a, std::span<const Qubit> acc, Qubit carry) {
  const auto m = b.mark();
  add(b, a, acc, carry);
  b.reverse_since(m);
}

void less_than(Builder& b, std::span<const Qubit> a, std::span<const Qubit> bb, Qubit carry,
               std::span<const Control> extra, Qubit flag) {
  const std::size_t n = a.size();
  if (n == 0 || bb.size() != n) throw std::invalid_argument("arith::less_than: operand widths differ");
  for (auto q : a) b.x(q);
  maj(b, carry, bb[0], a[0]);
  for (std::size_t i = 1; i < n; ++i) maj(b, a[i - 1], bb[i], a[i]);
  std::vector<Control> c{{a[n - 1], true}};
  c.insert(c.end(), extra.begin(), extra.end());
  b.mcx(c, flag);
  for (std::size_t i = n; i-- > 1;) maj_inv(b, a[i - 1], bb[i], a[i]);
  maj_inv(b, carry, bb[0], a[0]);
  for (auto q : a) b.x(q);
}

}  // namespace ro::arith
