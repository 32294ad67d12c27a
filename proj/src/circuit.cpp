#include "ro/circuit.hpp"

#include <algorithm>
#include <array>
#include <unordered_set>

#include "json.hpp"

namespace ro {

namespace {
constexpr std::array<std::pair<Role, std::string_view>, 9> kRoles{{
    {Role::config, "config"},
    {Role::selector, "selector"},
    {Role::dice, "dice"},
    {Role::ancilla, "ancilla"},
    {Role::payoff, "payoff"},
    {Role::arm, "arm"},
    {Role::mask, "mask"},
    {Role::rank, "rank"},
    {Role::output, "output"},
}};
}  // namespace

std::string_view role_name(Role r) {
  for (auto& [role, name] : kRoles)
    if (role == r) return name;
  return "?";
}

std::optional<Role> parse_role(std::string_view s) {
  for (auto& [role, name] : kRoles)
    if (name == s) return role;
  return std::nullopt;
}

Gate GateView::to_gate() const {
  Gate g;
  for (auto w : controls) g.controls.push_back(unpack(w));
  g.targets.assign(targets.begin(), targets.end());
  return g;
}

void GateList::push(std::span<const Control> controls, std::span<const Qubit> targets) {
  for (auto c : controls) ctrls_.push_back(pack(c));
  tgts_.insert(tgts_.end(), targets.begin(), targets.end());
  ctrl_off_.push_back(static_cast<std::uint32_t>(ctrls_.size()));
  tgt_off_.push_back(static_cast<std::uint32_t>(tgts_.size()));
}

void GateList::push_packed(std::span<const std::uint32_t> controls, std::span<const Qubit> targets) {
  ctrls_.insert(ctrls_.end(), controls.begin(), controls.end());
  tgts_.insert(tgts_.end(), targets.begin(), targets.end());
  ctrl_off_.push_back(static_cast<std::uint32_t>(ctrls_.size()));
  tgt_off_.push_back(static_cast<std::uint32_t>(tgts_.size()));
}

void GateList::append_reversed(std::size_t from, std::size_t to) {
  for (std::size_t i = to; i-- > from;) {
    // Copy first: push may reallocate the storage the view points into.
    auto v = (*this)[i];
    std::vector<std::uint32_t> c(v.controls.begin(), v.controls.end());
    std::vector<Qubit> t(v.targets.begin(), v.targets.end());
    push_packed(c, t);
  }
}

void GateList::append(const GateList& other) {
  for (std::size_t i = 0; i < other.size(); ++i) {
    auto v = other[i];
    push_packed(v.controls, v.targets);
  }
}

void GateList::truncate(std::size_t n) {
  if (n >= size()) return;
  ctrl_off_.resize(n + 1);
  tgt_off_.resize(n + 1);
  ctrls_.resize(ctrl_off_.back());
  tgts_.resize(tgt_off_.back());
}

void GateList::reserve(std::size_t gates, std::size_t ctrls, std::size_t tgts) {
  ctrl_off_.reserve(gates + 1);
  tgt_off_.reserve(gates + 1);
  ctrls_.reserve(ctrls);
  tgts_.reserve(tgts);
}

Circuit Circuit::build(std::vector<RegisterDecl> registers, const std::vector<Gate>& gates,
                       std::vector<Qubit> layout, std::vector<LiveEvent> live) {
  GateList list;
  for (auto& g : gates) list.push(g);
  return build(std::move(registers), std::move(list), std::move(layout), std::move(live));
}

Circuit Circuit::build(std::vector<RegisterDecl> registers, GateList gates, std::vector<Qubit> layout,
                       std::vector<LiveEvent> live) {
  Circuit c;
  std::unordered_set<std::string> names;
  std::uint32_t off = 0;
  for (auto& r : registers) {
    if (r.width == 0) throw CircuitError("register '" + r.name + "' has zero width");
    if (!names.insert(r.name).second) throw CircuitError("duplicate register name '" + r.name + "'");
    r.offset = off;
    off += r.width;
  }
  c.total_ = off;
  std::vector<std::size_t> stamp(c.total_, 0);
  for (std::size_t i = 0; i < gates.size(); ++i) {
    auto g = gates[i];
    if (g.targets.empty()) throw CircuitError("gate " + std::to_string(i) + " has no target");
    const std::size_t s = i + 1;
    auto touch = [&](Qubit q) {
      if (q >= c.total_)
        throw CircuitError("gate " + std::to_string(i) + " index " + std::to_string(q) + " out of range");
      if (stamp[q] == s)
        throw CircuitError("gate " + std::to_string(i) + " repeats qubit " + std::to_string(q) +
                           " (controls and targets must be disjoint)");
      stamp[q] = s;
    };
    for (auto w : g.controls) touch(unpack(w).q);
    for (auto q : g.targets) touch(q);
  }
  if (layout.empty()) {
    layout.resize(c.total_);
    for (std::size_t q = 0; q < c.total_; ++q) layout[q] = static_cast<Qubit>(q);
  }
  if (layout.size() != c.total_) throw CircuitError("layout length does not match qubit count");
  std::vector<char> seen(c.total_, 0);
  for (auto q : layout) {
    if (q >= c.total_ || seen[q]) throw CircuitError("layout is not a permutation of the qubits");
    seen[q] = 1;
  }
  for (auto& e : live)
    if (e.at > gates.size()) throw CircuitError("liveness marker beyond the gate list");
  c.registers_ = std::move(registers);
  c.gates_ = std::move(gates);
  c.layout_ = std::move(layout);
  c.live_ = std::move(live);
  return c;
}

bool Circuit::has_register(std::string_view name) const {
  return std::any_of(registers_.begin(), registers_.end(), [&](auto& r) { return r.name == name; });
}

const RegisterDecl& Circuit::reg(std::string_view name) const {
  for (auto& r : registers_)
    if (r.name == name) return r;
  throw CircuitError("no register named '" + std::string(name) + "'");
}

std::vector<Qubit> Circuit::qubits(std::string_view name) const {
  auto& r = reg(name);
  std::vector<Qubit> out(r.width);
  for (std::uint32_t i = 0; i < r.width; ++i) out[i] = r.offset + i;
  return out;
}

std::vector<Qubit> Circuit::qubits_with_role(Role role) const {
  std::vector<Qubit> out;
  for (auto& r : registers_)
    if (r.role == role)
      for (std::uint32_t i = 0; i < r.width; ++i) out.push_back(r.offset + i);
  return out;
}

std::vector<std::size_t> Circuit::positions() const {
  std::vector<std::size_t> pos(total_);
  for (std::size_t i = 0; i < layout_.size(); ++i) pos[layout_[i]] = i;
  return pos;
}

Circuit invert(const Circuit& c) {
  GateList g;
  g.append(c.gates());
  GateList rev;
  rev.reserve(c.gate_count(), 0, 0);
  for (std::size_t i = c.gate_count(); i-- > 0;) {
    auto v = g[i];
    rev.push_packed(v.controls, v.targets);
  }
  std::vector<LiveEvent> live;
  const std::size_t n = c.gate_count();
  for (auto it = c.live_events().rbegin(); it != c.live_events().rend(); ++it)
    live.push_back({n - it->at, -it->delta});
  return Circuit::build(c.registers(), std::move(rev), c.layout(), std::move(live));
}

std::size_t depth(const Circuit& c) {
  std::vector<std::size_t> level(c.total_qubits(), 0);
  std::size_t d = 0;
  for (std::size_t i = 0; i < c.gate_count(); ++i) {
    auto g = c.gates()[i];
    std::size_t l = 0;
    for (auto w : g.controls) l = std::max(l, level[w & ~kNegBit]);
    for (auto q : g.targets) l = std::max(l, level[q]);
    ++l;
    for (auto w : g.controls) level[w & ~kNegBit] = l;
    for (auto q : g.targets) level[q] = l;
    d = std::max(d, l);
  }
  return d;
}

CostReport cost(const Circuit& c) {
  CostReport r;
  r.gate_count = c.gate_count();
  r.depth = depth(c);
  r.qubit_count = c.total_qubits();
  for (std::size_t i = 0; i < c.gate_count(); ++i) r.max_fan_in = std::max(r.max_fan_in, c.gates()[i].fan_in());
  std::vector<LiveEvent> ev = c.live_events();
  std::stable_sort(ev.begin(), ev.end(), [](auto& a, auto& b) { return a.at < b.at; });
  std::int64_t live = 0, best = 0;
  for (std::size_t i = 0; i < ev.size();) {
    std::size_t j = i;
    while (j < ev.size() && ev[j].at == ev[i].at) live += ev[j++].delta;
    best = std::max(best, live);
    i = j;
  }
  r.max_live_ancilla = static_cast<std::size_t>(best);
  return r;
}

std::vector<Qubit> light_cone(const Circuit& c, std::span<const Qubit> outputs) {
  std::vector<char> in(c.total_qubits(), 0);
  for (auto q : outputs) {
    if (q >= c.total_qubits()) throw CircuitError("light_cone: output qubit out of range");
    in[q] = 1;
  }
  for (std::size_t i = c.gate_count(); i-- > 0;) {
    auto g = c.gates()[i];
    bool hit = false;
    for (auto q : g.targets) hit = hit || in[q];
    if (hit)
      for (auto w : g.controls) in[w & ~kNegBit] = 1;
  }
  std::vector<Qubit> out;
  for (std::size_t q = 0; q < in.size(); ++q)
    if (in[q]) out.push_back(static_cast<Qubit>(q));
  return out;
}

namespace {
std::pair<std::size_t, std::size_t> extent(GateView g, const std::vector<std::size_t>& pos) {
  std::size_t lo = SIZE_MAX, hi = 0;
  for (auto w : g.controls) {
    auto p = pos[w & ~kNegBit];
    lo = std::min(lo, p);
    hi = std::max(hi, p);
  }
  for (auto q : g.targets) {
    lo = std::min(lo, pos[q]);
    hi = std::max(hi, pos[q]);
  }
  return {lo, hi};
}
}  // namespace

std::vector<std::size_t> crossing_profile(const Circuit& c) {
  const std::size_t n = c.total_qubits();
  if (n < 2) return {};
  auto pos = c.positions();
  std::vector<std::int64_t> diff(n + 1, 0);
  for (std::size_t i = 0; i < c.gate_count(); ++i) {
    auto [lo, hi] = extent(c.gates()[i], pos);
    if (hi > lo) {
      diff[lo + 1] += 1;
      diff[hi + 1] -= 1;
    }
  }
  std::vector<std::size_t> out(n - 1);
  std::int64_t run = 0;
  for (std::size_t t = 1; t < n; ++t) {
    run += diff[t];
    out[t - 1] = static_cast<std::size_t>(run);
  }
  return out;
}

std::size_t crossing_count(const Circuit& c, std::size_t cut) {
  if (cut < 1 || cut >= c.total_qubits())
    throw CircuitError("cut position must lie in [1, total_qubits - 1]");
  auto pos = c.positions();
  std::size_t count = 0;
  for (std::size_t i = 0; i < c.gate_count(); ++i) {
    auto [lo, hi] = extent(c.gates()[i], pos);
    if (lo < cut && cut <= hi) ++count;
  }
  return count;
}

SpanProfile span_profile(const Circuit& c) {
  SpanProfile sp;
  auto pos = c.positions();
  sp.spans.reserve(c.gate_count());
  for (std::size_t i = 0; i < c.gate_count(); ++i) {
    auto [lo, hi] = extent(c.gates()[i], pos);
    sp.spans.push_back(hi - lo);
    sp.total_prefix_span += hi - lo;
    sp.max_span = std::max(sp.max_span, hi - lo);
  }
  return sp;
}

std::string to_json(const Circuit& c) {
  using nlohmann::json;
  json j;
  j["format"] = "ro-circuit/1";
  j["registers"] = json::array();
  for (auto& r : c.registers())
    j["registers"].push_back({{"name", r.name}, {"width", r.width}, {"role", role_name(r.role)}});
  json gates = json::array();
  for (std::size_t i = 0; i < c.gate_count(); ++i) {
    auto g = c.gates()[i];
    json ctrl = json::array();
    for (auto w : g.controls) {
      auto u = unpack(w);
      ctrl.push_back(u.positive ? static_cast<std::int64_t>(u.q) : -static_cast<std::int64_t>(u.q) - 1);
    }
    gates.push_back(json::array({ctrl, json(std::vector<Qubit>(g.targets.begin(), g.targets.end()))}));
  }
  j["gates"] = std::move(gates);
  j["layout"] = c.layout();
  json live = json::array();
  for (auto& e : c.live_events()) live.push_back(json::array({e.at, e.delta}));
  j["live"] = std::move(live);
  return j.dump();
}

Circuit from_json(std::string_view text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw CircuitError(std::string("circuit json: ") + e.what());
  }
  if (j.value("format", "") != "ro-circuit/1") throw CircuitError("circuit json: unknown format tag");
  std::vector<RegisterDecl> regs;
  for (auto& r : j.at("registers")) {
    auto role = parse_role(r.at("role").get<std::string>());
    if (!role) throw CircuitError("circuit json: unknown role");
    regs.push_back({r.at("name").get<std::string>(), r.at("width").get<std::uint32_t>(), *role, 0});
  }
  GateList gates;
  std::vector<Control> ctrl;
  std::vector<Qubit> tgt;
  for (auto& g : j.at("gates")) {
    ctrl.clear();
    for (auto& v : g.at(0)) {
      auto x = v.get<std::int64_t>();
      ctrl.push_back(x >= 0 ? Control{static_cast<Qubit>(x), true} : Control{static_cast<Qubit>(-x - 1), false});
    }
    tgt = g.at(1).get<std::vector<Qubit>>();
    gates.push(ctrl, tgt);
  }
  std::vector<LiveEvent> live;
  for (auto& e : j.value("live", json::array())) live.push_back({e.at(0).get<std::size_t>(), e.at(1).get<std::int64_t>()});
  return Circuit::build(std::move(regs), std::move(gates), j.at("layout").get<std::vector<Qubit>>(), std::move(live));
}

std::vector<Qubit> Builder::add_register(std::string name, std::uint32_t width, Role role) {
  for (auto& r : regs_)
    if (r.name == name) throw CircuitError("duplicate register name '" + name + "'");
  if (width == 0) throw CircuitError("register '" + name + "' has zero width");
  regs_.push_back({std::move(name), width, role, next_});
  std::vector<Qubit> q(width);
  for (std::uint32_t i = 0; i < width; ++i) q[i] = next_ + i;
  next_ += width;
  return q;
}

void Builder::x(Qubit t) { gates_.push(std::span<const Control>{}, std::span(&t, 1)); }

void Builder::cx(Qubit c, Qubit t) {
  Control ctl{c, true};
  gates_.push(std::span(&ctl, 1), std::span(&t, 1));
}

void Builder::ccx(Qubit a, Qubit b, Qubit t) {
  std::array<Control, 2> ctl{Control{a, true}, Control{b, true}};
  gates_.push(ctl, std::span(&t, 1));
}

void Builder::mcx(std::span<const Control> controls, std::span<const Qubit> targets) {
  gates_.push(controls, targets);
}

void Builder::mcx(std::initializer_list<Control> controls, Qubit target) {
  gates_.push(std::span(controls.begin(), controls.size()), std::span(&target, 1));
}

void Builder::undo_since(std::size_t m) {
  const std::size_t end = gates_.size();
  gates_.append_reversed(m, end);
}

void Builder::reverse_since(std::size_t m) {
  const std::size_t end = gates_.size();
  GateList tail;
  for (std::size_t i = end; i-- > m;) {
    auto v = gates_[i];
    tail.push_packed(v.controls, v.targets);
  }
  gates_.truncate(m);
  gates_.append(tail);
}

Circuit Builder::finish(std::vector<Qubit> layout) && {
  return Circuit::build(std::move(regs_), std::move(gates_), std::move(layout), std::move(live_));
}

std::vector<Control> equals_const(std::span<const Qubit> reg, std::uint64_t value) {
  std::vector<Control> out;
  out.reserve(reg.size());
  for (std::size_t i = 0; i < reg.size(); ++i) out.push_back({reg[i], ((value >> i) & 1u) != 0});
  return out;
}

std::vector<Control> join(std::span<const Control> a, std::span<const Control> b) {
  std::vector<Control> out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace ro
