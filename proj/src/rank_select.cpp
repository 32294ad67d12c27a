#include "ro/rank_select.hpp"

#include <stdexcept>

#include "ro/arith.hpp"

namespace ro::rank_select {

unsigned width_for(std::uint64_t n) { return arith::bits_for(n); }

std::uint64_t select_semantics(const std::vector<bool>& mask, std::uint64_t r) {
  std::uint64_t seen = 0;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i] && seen++ == r) return i;
  return mask.size();
}

std::uint64_t select_semantics(std::uint64_t mask, unsigned n, std::uint64_t r) {
  std::uint64_t seen = 0;
  for (unsigned i = 0; i < n; ++i)
    if (((mask >> i) & 1u) && seen++ == r) return i;
  return n;
}

std::vector<bool> canonical_mask(std::uint64_t n, std::uint64_t t, std::uint64_t weight) {
  if (t < 1 || t > n) throw std::invalid_argument("canonical_mask: need 1 <= t <= N");
  const std::uint64_t lo = 2 * t > n ? 2 * t - n : 0;
  if (weight < lo || weight > t - 1) throw std::invalid_argument("canonical_mask: weight outside S_t");
  std::vector<bool> m(n, false);
  for (std::uint64_t i = 0; i < weight; ++i) m[i] = true;
  for (std::uint64_t i = t; i < n; ++i) m[i] = true;
  return m;
}

namespace {
std::vector<Qubit> value_targets(std::span<const Qubit> out, std::uint64_t v) {
  std::vector<Qubit> t;
  for (std::size_t b = 0; b < out.size(); ++b)
    if ((v >> b) & 1u) t.push_back(out[b]);
  return t;
}

void preload(Builder& b, std::span<const Qubit> out, std::uint64_t n) {
  for (auto q : value_targets(out, n)) b.x(q);
}
}  // namespace

void emit_scan(Builder& b, std::span<const Qubit> mask, std::span<const Qubit> nth, std::span<const Qubit> out,
               const ScanScratch& s) {
  const std::uint64_t n = mask.size();
  const std::size_t w = out.size();
  if (s.rank.size() != w || s.eq.size() != w || nth.size() > w)
    throw std::invalid_argument("emit_scan: register widths disagree");
  preload(b, out, n);
  b.live(static_cast<std::int64_t>(w));
  std::vector<Control> ctl;
  for (std::uint64_t i = 0; i < n; ++i) {
    b.live(static_cast<std::int64_t>(w) + 1);
    for (std::size_t k = 0; k < w; ++k) {
      b.cx(s.rank[k], s.eq[k]);
      if (k < nth.size()) b.cx(nth[k], s.eq[k]);
    }
    ctl.assign(1, Control{mask[i], true});
    for (auto q : s.eq) ctl.push_back({q, false});
    b.mcx(ctl, s.match);
    const Control m1{s.match, true};
    b.mcx(std::span(&m1, 1), value_targets(out, i ^ n));
    b.mcx(ctl, s.match);
    for (std::size_t k = w; k-- > 0;) {
      if (k < nth.size()) b.cx(nth[k], s.eq[k]);
      b.cx(s.rank[k], s.eq[k]);
    }
    b.live(-static_cast<std::int64_t>(w) - 1);
    const Control v{mask[i], true};
    arith::increment(b, std::span(&v, 1), s.rank);
  }
  for (std::uint64_t i = n; i-- > 0;) {
    const Control v{mask[i], true};
    arith::decrement(b, std::span(&v, 1), s.rank);
  }
  b.live(-static_cast<std::int64_t>(w));
}

void emit_blocked(Builder& b, std::span<const Qubit> mask, std::span<const Qubit> nth, std::span<const Qubit> out,
                  const BlockedScratch& s, unsigned block) {
  const std::uint64_t n = mask.size();
  const std::size_t w = out.size();
  const std::size_t k = s.cnt.size();
  if (block == 0 || s.u.size() != w + 1 || s.lam.size() != k || k != arith::bits_for(block) || nth.size() > w ||
      k > w)
    throw std::invalid_argument("emit_blocked: register widths disagree");
  auto u_low = s.u.first(k);
  std::vector<Control> high_zero;
  for (std::size_t j = k; j < s.u.size(); ++j) high_zero.push_back({s.u[j], false});

  preload(b, out, n);
  b.live(static_cast<std::int64_t>(w) + 1);
  for (std::size_t j = 0; j < nth.size(); ++j) b.cx(nth[j], s.u[j]);

  auto popcount = [&](std::uint64_t lo, std::uint64_t hi, bool undo) {
    if (!undo) {
      for (auto i = lo; i < hi; ++i) {
        const Control v{mask[i], true};
        arith::increment(b, std::span(&v, 1), s.cnt);
      }
    } else {
      for (auto i = hi; i-- > lo;) {
        const Control v{mask[i], true};
        arith::decrement(b, std::span(&v, 1), s.cnt);
      }
    }
  };

  const std::uint64_t blocks = (n + block - 1) / block;
  std::vector<Control> ctl;
  for (std::uint64_t q = 0; q < blocks; ++q) {
    const std::uint64_t lo = q * block, hi = std::min<std::uint64_t>(n, lo + block);
    b.live(static_cast<std::int64_t>(k));
    popcount(lo, hi, false);
    b.live(1);
    arith::less_than(b, u_low, s.cnt, s.carry, high_zero, s.take);
    b.live(static_cast<std::int64_t>(k));
    for (auto i = lo; i < hi; ++i) {
      for (std::size_t j = 0; j < k; ++j) b.cx(s.u[j], s.lam[j]);
      ctl.assign({Control{s.take, true}, Control{mask[i], true}});
      for (auto x : s.lam) ctl.push_back({x, false});
      b.mcx(ctl, value_targets(out, i ^ n));
      for (std::size_t j = 0; j < k; ++j) b.cx(s.u[j], s.lam[j]);
      const Control v{mask[i], true};
      arith::increment(b, std::span(&v, 1), s.lam);
    }
    for (auto i = hi; i-- > lo;) {
      const Control v{mask[i], true};
      arith::decrement(b, std::span(&v, 1), s.lam);
    }
    b.live(-static_cast<std::int64_t>(k));
    arith::less_than(b, u_low, s.cnt, s.carry, high_zero, s.take);
    b.live(-1);
    arith::sub(b, s.cnt, s.u, s.carry);
    popcount(lo, hi, true);
    b.live(-static_cast<std::int64_t>(k));
  }
  for (std::uint64_t q = blocks; q-- > 0;) {
    const std::uint64_t lo = q * block, hi = std::min<std::uint64_t>(n, lo + block);
    b.live(static_cast<std::int64_t>(k));
    popcount(lo, hi, false);
    arith::add(b, s.cnt, s.u, s.carry);
    popcount(lo, hi, true);
    b.live(-static_cast<std::int64_t>(k));
  }
  for (std::size_t j = 0; j < nth.size(); ++j) b.cx(nth[j], s.u[j]);
  b.live(-static_cast<std::int64_t>(w) - 1);
}

Circuit build_scan(unsigned n) {
  if (n < 1) throw std::invalid_argument("build_scan: N must be >= 1");
  const unsigned w = width_for(n);
  Builder b;
  auto mask = b.add_register("mask", n, Role::mask);
  auto nth = b.add_register("nth", w, Role::rank);
  auto rank = b.add_register("counter", w, Role::ancilla);
  auto eq = b.add_register("eq", w, Role::ancilla);
  auto match = b.add_register("match", 1, Role::ancilla);
  auto out = b.add_register("out", w, Role::output);
  emit_scan(b, mask, nth, out, ScanScratch{rank, eq, match[0]});
  return std::move(b).finish();
}

Circuit build_blocked(unsigned n, unsigned block) {
  if (n < 1) throw std::invalid_argument("build_blocked: N must be >= 1");
  const unsigned w = width_for(n);
  if (block == 0) block = w;
  block = std::min(block, n);
  const unsigned k = arith::bits_for(block);
  Builder b;
  auto mask = b.add_register("mask", n, Role::mask);
  auto nth = b.add_register("nth", w, Role::rank);
  auto u = b.add_register("u", w + 1, Role::ancilla);
  auto cnt = b.add_register("count", k, Role::ancilla);
  auto carry = b.add_register("carry", 1, Role::ancilla);
  auto lam = b.add_register("local", k, Role::ancilla);
  auto take = b.add_register("take", 1, Role::ancilla);
  auto out = b.add_register("out", w, Role::output);
  emit_blocked(b, mask, nth, out, BlockedScratch{u, cnt, lam, carry[0], take[0]}, block);
  return std::move(b).finish();
}

Circuit build(Variant v, unsigned n) { return v == Variant::scan ? build_scan(n) : build_blocked(n); }

}  // namespace ro::rank_select
