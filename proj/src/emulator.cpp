#include "ro/emulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <unordered_map>
#include <unordered_set>

namespace ro {

std::uint64_t BasisState::read(std::span<const Qubit> qs) const {
  if (qs.size() > 64) throw std::invalid_argument("BasisState::read: more than 64 qubits");
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < qs.size(); ++i) v |= std::uint64_t{get(qs[i])} << i;
  return v;
}

void BasisState::write(std::span<const Qubit> qs, std::uint64_t value) {
  if (qs.size() > 64) throw std::invalid_argument("BasisState::write: more than 64 qubits");
  for (std::size_t i = 0; i < qs.size(); ++i) set(qs[i], (value >> i) & 1u);
}

std::string BasisState::to_string() const {
  std::string s(n_, '0');
  for (std::size_t q = 0; q < n_; ++q)
    if (get(static_cast<Qubit>(q))) s[q] = '1';
  return s;
}

Program::Program(const Circuit& c) : n_(c.total_qubits()) {
  const bool small = n_ <= 64;
  ops_.reserve(c.gate_count());
  std::unordered_map<std::uint32_t, std::size_t> slot;
  for (std::size_t i = 0; i < c.gate_count(); ++i) {
    auto g = c.gates()[i];
    Op op{};
    op.cbeg = static_cast<std::uint32_t>(cterms_.size());
    slot.clear();
    std::uint64_t cm = 0, cv = 0, tm = 0;
    for (auto w : g.controls) {
      auto u = unpack(w);
      auto word = u.q >> 6;
      auto bit = std::uint64_t{1} << (u.q & 63);
      auto [it, fresh] = slot.try_emplace(word, cterms_.size());
      if (fresh) cterms_.push_back({word, 0, 0});
      cterms_[it->second].mask |= bit;
      if (u.positive) cterms_[it->second].value |= bit;
      if (small) {
        cm |= bit;
        if (u.positive) cv |= bit;
      }
    }
    op.cend = static_cast<std::uint32_t>(cterms_.size());
    op.tbeg = static_cast<std::uint32_t>(tterms_.size());
    slot.clear();
    for (auto q : g.targets) {
      auto word = q >> 6;
      auto bit = std::uint64_t{1} << (q & 63);
      auto [it, fresh] = slot.try_emplace(word, tterms_.size());
      if (fresh) tterms_.push_back({word, 0, 0});
      tterms_[it->second].mask |= bit;
      if (small) tm |= bit;
    }
    op.tend = static_cast<std::uint32_t>(tterms_.size());
    ops_.push_back(op);
    if (small) {
      cm64_.push_back(cm);
      cv64_.push_back(cv);
      tm64_.push_back(tm);
    }
  }
}

inline void Program::step(const Op& op, BasisState& s) const {
  auto& w = s.words();
  for (auto k = op.cbeg; k < op.cend; ++k) {
    const auto& t = cterms_[k];
    if ((w[t.word] & t.mask) != t.value) return;
  }
  for (auto k = op.tbeg; k < op.tend; ++k) w[tterms_[k].word] ^= tterms_[k].mask;
}

void Program::run(BasisState& s) const {
  if (s.size() != n_) throw CircuitError("basis state length does not match circuit");
  for (const auto& op : ops_) step(op, s);
}

void Program::run_inverse(BasisState& s) const {
  if (s.size() != n_) throw CircuitError("basis state length does not match circuit");
  for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) step(*it, s);
}

std::uint64_t Program::run64(std::uint64_t s) const {
  const std::size_t n = cm64_.size();
  const std::uint64_t* cm = cm64_.data();
  const std::uint64_t* cv = cv64_.data();
  const std::uint64_t* tm = tm64_.data();
  for (std::size_t i = 0; i < n; ++i) s ^= ((s & cm[i]) == cv[i]) ? tm[i] : 0;
  return s;
}

BasisState apply(const Circuit& c, BasisState b) {
  Program(c).run(b);
  return b;
}

namespace {
BasisState from_u64(std::uint64_t v, std::size_t n) {
  BasisState s(n);
  if (n > 0) s.words()[0] = v;
  return s;
}

struct WordsHash {
  std::size_t operator()(const std::vector<std::uint64_t>& v) const {
    std::uint64_t h = 0x12345;
    for (auto x : v) h = splitmix64(h ^ x);
    return static_cast<std::size_t>(h);
  }
};
}  // namespace

BijectivityResult check_bijective(const Circuit& c, const BijectivityOptions& opt) {
  BijectivityResult res;
  Program prog(c);
  const std::size_t n = c.total_qubits();
  if (n <= opt.exhaustive_limit && n <= 40) {
    res.exhaustive = true;
    const std::uint64_t total = std::uint64_t{1} << n;
    std::vector<std::uint64_t> seen((total + 63) / 64, 0);
    for (std::uint64_t x = 0; x < total; ++x) {
      auto y = prog.run64(x);
      auto& word = seen[y >> 6];
      auto bit = std::uint64_t{1} << (y & 63);
      if (word & bit) {
        for (std::uint64_t z = 0; z < x; ++z)
          if (prog.run64(z) == y) {
            res.ok = false;
            res.witness = std::make_pair(from_u64(z, n), from_u64(x, n));
            break;
          }
        res.checked = x + 1;
        return res;
      }
      word |= bit;
    }
    res.checked = total;
    return res;
  }
  Rng rng(opt.seed);
  std::unordered_map<std::vector<std::uint64_t>, std::vector<std::uint64_t>, WordsHash> image;
  std::unordered_set<std::vector<std::uint64_t>, WordsHash> inputs;
  for (std::uint64_t i = 0; i < opt.samples; ++i) {
    BasisState x(n);
    for (std::size_t q = 0; q < n; q += 64) x.words()[q >> 6] = rng.next();
    if (n % 64) x.words().back() &= (std::uint64_t{1} << (n % 64)) - 1;
    if (!inputs.insert(x.words()).second) continue;
    BasisState y = x;
    prog.run(y);
    BasisState back = y;
    prog.run_inverse(back);
    ++res.checked;
    if (!(back == x)) {
      res.ok = false;
      res.witness = std::make_pair(x, back);
      return res;
    }
    auto [it, fresh] = image.try_emplace(y.words(), x.words());
    if (!fresh) {
      res.ok = false;
      BasisState other(n);
      other.words() = it->second;
      res.witness = std::make_pair(other, x);
      return res;
    }
  }
  return res;
}

Fixed Fixed::of(std::uint64_t v, std::size_t width) {
  Fixed f;
  f.bits.resize(width);
  for (std::size_t i = 0; i < width; ++i) f.bits[i] = i < 64 && ((v >> i) & 1u);
  if (width < 64 && (v >> width) != 0) throw std::invalid_argument("fixed value does not fit register width");
  return f;
}

InputDistribution& InputDistribution::fix(const std::string& reg, std::uint64_t value, std::size_t width) {
  entries_[reg] = Fixed::of(value, width);
  return *this;
}

InputDistribution& InputDistribution::fix_bits(const std::string& reg, std::vector<bool> bits) {
  entries_[reg] = Fixed{std::move(bits)};
  return *this;
}

InputDistribution& InputDistribution::uniform(const std::string& reg, std::uint64_t faces, std::uint32_t chunk_bits) {
  if (faces < 1) throw std::invalid_argument("uniform distribution needs at least one face");
  entries_[reg] = UniformChunks{chunk_bits, faces};
  return *this;
}

namespace {
struct Chunk {
  std::vector<Qubit> qubits;
  std::uint64_t faces;
};

struct Lowered {
  BasisState base;
  std::vector<Chunk> chunks;
};

Lowered lower(const Circuit& c, const InputDistribution& dist) {
  dist.validate(c);
  Lowered l{BasisState(c.total_qubits()), {}};
  for (auto& [name, d] : dist.entries()) {
    auto qs = c.qubits(name);
    if (auto f = std::get_if<Fixed>(&d)) {
      for (std::size_t i = 0; i < qs.size(); ++i) l.base.set(qs[i], f->bits[i]);
    } else {
      auto& u = std::get<UniformChunks>(d);
      const std::size_t cb = u.chunk_bits == 0 ? qs.size() : u.chunk_bits;
      for (std::size_t off = 0; off < qs.size(); off += cb)
        l.chunks.push_back({std::vector<Qubit>(qs.begin() + off, qs.begin() + off + cb), u.faces});
    }
  }
  return l;
}

// Support size, saturating at UINT64_MAX.
std::uint64_t support(const Lowered& l) {
  std::uint64_t s = 1;
  for (auto& ch : l.chunks) {
    if (ch.faces != 0 && s > UINT64_MAX / ch.faces) return UINT64_MAX;
    s *= ch.faces;
  }
  return s;
}

// Calls f(state) for every point of the support in odometer order.
template <class F>
void enumerate(const Lowered& l, F&& f) {
  BasisState s = l.base;
  std::vector<std::uint64_t> digit(l.chunks.size(), 0);
  for (auto& ch : l.chunks) s.write(ch.qubits, 0);
  while (true) {
    f(s);
    std::size_t i = 0;
    for (; i < l.chunks.size(); ++i) {
      if (++digit[i] < l.chunks[i].faces) {
        s.write(l.chunks[i].qubits, digit[i]);
        break;
      }
      digit[i] = 0;
      s.write(l.chunks[i].qubits, 0);
    }
    if (i == l.chunks.size()) return;
  }
}

void draw(const Lowered& l, BasisState& s, Rng& rng) {
  s = l.base;
  for (auto& ch : l.chunks) s.write(ch.qubits, rng.below(ch.faces));
}
}  // namespace

void InputDistribution::validate(const Circuit& c) const {
  for (auto& [name, d] : entries_) {
    auto& r = c.reg(name);
    if (auto f = std::get_if<Fixed>(&d)) {
      if (f->bits.size() != r.width) throw std::invalid_argument("fixed value width mismatch for '" + name + "'");
    } else {
      auto& u = std::get<UniformChunks>(d);
      const std::uint32_t cb = u.chunk_bits == 0 ? r.width : u.chunk_bits;
      if (r.width % cb != 0) throw std::invalid_argument("chunk size does not divide register '" + name + "'");
      if (cb > 63) throw std::invalid_argument("uniform chunk wider than 63 bits in '" + name + "'");
      if (u.faces > (std::uint64_t{1} << cb)) throw std::invalid_argument("more faces than chunk states in '" + name + "'");
    }
  }
}

void sample_input(const Circuit& c, const InputDistribution& dist, BasisState& s, Rng& rng) {
  draw(lower(c, dist), s, rng);
}

CleanResult check_ancilla_clean(const Circuit& c, const InputDistribution& dist, std::uint64_t budget,
                                std::uint64_t samples, std::uint64_t seed) {
  auto anc = c.qubits_with_role(Role::ancilla);
  for (auto& r : c.registers()) {
    if (r.role != Role::ancilla) continue;
    auto it = dist.entries().find(r.name);
    if (it == dist.entries().end()) continue;
    auto f = std::get_if<Fixed>(&it->second);
    if (!f || std::any_of(f->bits.begin(), f->bits.end(), [](bool b) { return b; }))
      throw std::invalid_argument("ancilla register '" + r.name + "' must be fixed to zero");
  }
  Program prog(c);
  auto l = lower(c, dist);
  CleanResult res;
  auto check = [&](const BasisState& in) {
    if (!res.ok) return;
    BasisState s = in;
    prog.run(s);
    ++res.checked;
    for (auto q : anc)
      if (s.get(q)) {
        res.ok = false;
        res.witness = in;
        return;
      }
  };
  if (support(l) <= budget) {
    enumerate(l, check);
  } else {
    Rng rng(seed);
    BasisState s;
    for (std::uint64_t i = 0; i < samples && res.ok; ++i) {
      draw(l, s, rng);
      check(s);
    }
  }
  return res;
}

std::uint64_t exact_budget_default() {
  if (const char* e = std::getenv("RO_EXACT_BUDGET")) {
    char* end = nullptr;
    auto v = std::strtoull(e, &end, 10);
    if (end && *end == '\0' && v > 0) return v;
  }
  return std::uint64_t{1} << 24;
}

std::pair<double, double> wilson95(std::uint64_t hits, std::uint64_t total) {
  if (total == 0) return {0.0, 1.0};
  const double z = 1.959963984540054;
  const double n = static_cast<double>(total);
  const double p = static_cast<double>(hits) / n;
  const double den = 1 + z * z / n;
  const double mid = (p + z * z / (2 * n)) / den;
  const double half = z * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / den;
  return {std::max(0.0, mid - half), std::min(1.0, mid + half)};
}

PayoffEstimate payoff_probability(const Circuit& c, const InputDistribution& dist,
                                  std::variant<ExactMode, MonteCarloMode> mode) {
  auto pay = c.qubits_with_role(Role::payoff);
  if (pay.size() != 1) throw std::invalid_argument("payoff_probability needs exactly one payoff qubit");
  const Qubit pq = pay[0];
  Program prog(c);
  auto l = lower(c, dist);
  PayoffEstimate est;
  if (auto ex = std::get_if<ExactMode>(&mode)) {
    const std::uint64_t budget = ex->budget ? ex->budget : exact_budget_default();
    const std::uint64_t size = support(l);
    if (size > budget)
      throw std::runtime_error("exact enumeration needs " + std::to_string(size) + " inputs, budget is " +
                               std::to_string(budget));
    enumerate(l, [&](const BasisState& in) {
      BasisState s = in;
      prog.run(s);
      est.hits += s.get(pq);
      ++est.total;
    });
    est.exact = true;
    est.p = static_cast<double>(est.hits) / static_cast<double>(est.total);
    est.ci_lo = est.ci_hi = est.p;
    return est;
  }
  auto& mc = std::get<MonteCarloMode>(mode);
  BasisState s;
  for (std::uint64_t shot = 0; shot < mc.shots; ++shot) {
    Rng rng(derive_seed(mc.seed, shot));
    draw(l, s, rng);
    prog.run(s);
    est.hits += s.get(pq);
  }
  est.total = mc.shots;
  est.p = mc.shots ? static_cast<double>(est.hits) / static_cast<double>(mc.shots) : 0.0;
  std::tie(est.ci_lo, est.ci_hi) = wilson95(est.hits, est.total);
  return est;
}

}  // namespace ro
