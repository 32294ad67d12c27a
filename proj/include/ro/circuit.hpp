#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ro {

using Qubit = std::uint32_t;

enum class Role { config, selector, dice, ancilla, payoff, arm, mask, rank, output };

std::string_view role_name(Role r);
std::optional<Role> parse_role(std::string_view s);

struct RegisterDecl {
  std::string name;
  std::uint32_t width = 0;
  Role role = Role::ancilla;
  std::uint32_t offset = 0;  // index of the first qubit; assigned by Circuit::build
};

struct Control {
  Qubit q = 0;
  bool positive = true;
  friend bool operator==(const Control&, const Control&) = default;
};

// Owning gate value used at API boundaries. Inside a Circuit gates live in flat arrays.
struct Gate {
  std::vector<Control> controls;
  std::vector<Qubit> targets;
  std::size_t fan_in() const { return controls.size() + targets.size(); }
  friend bool operator==(const Gate&, const Gate&) = default;
};

class CircuitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Control words pack the qubit index in the low 31 bits and a negative-polarity flag in bit 31.
inline constexpr std::uint32_t kNegBit = 0x80000000u;
inline std::uint32_t pack(Control c) { return c.q | (c.positive ? 0u : kNegBit); }
inline Control unpack(std::uint32_t w) { return Control{w & ~kNegBit, (w & kNegBit) == 0}; }

struct GateView {
  std::span<const std::uint32_t> controls;  // packed
  std::span<const Qubit> targets;
  std::size_t fan_in() const { return controls.size() + targets.size(); }
  Gate to_gate() const;
};

class GateList {
 public:
  GateList() { ctrl_off_.push_back(0); tgt_off_.push_back(0); }
  void push(std::span<const Control> controls, std::span<const Qubit> targets);
  void push_packed(std::span<const std::uint32_t> controls, std::span<const Qubit> targets);
  void push(const Gate& g) { push(g.controls, g.targets); }
  std::size_t size() const { return ctrl_off_.size() - 1; }
  bool empty() const { return size() == 0; }
  GateView operator[](std::size_t i) const {
    return GateView{std::span(ctrls_).subspan(ctrl_off_[i], ctrl_off_[i + 1] - ctrl_off_[i]),
                    std::span(tgts_).subspan(tgt_off_[i], tgt_off_[i + 1] - tgt_off_[i])};
  }
  // Appends gates [from, to) of this list in reverse order.
  void append_reversed(std::size_t from, std::size_t to);
  void append(const GateList& other);
  void truncate(std::size_t n);
  void reserve(std::size_t gates, std::size_t ctrls, std::size_t tgts);

 private:
  std::vector<std::uint32_t> ctrl_off_, tgt_off_;
  std::vector<std::uint32_t> ctrls_;
  std::vector<Qubit> tgts_;
};

// Liveness marker: before gate `at`, `delta` ancilla qubits become live (+) or are released (-).
struct LiveEvent {
  std::size_t at = 0;
  std::int64_t delta = 0;
  friend bool operator==(const LiveEvent&, const LiveEvent&) = default;
};

class Circuit {
 public:
  static Circuit build(std::vector<RegisterDecl> registers, const std::vector<Gate>& gates,
                       std::vector<Qubit> layout = {}, std::vector<LiveEvent> live = {});
  static Circuit build(std::vector<RegisterDecl> registers, GateList gates,
                       std::vector<Qubit> layout = {}, std::vector<LiveEvent> live = {});

  const std::vector<RegisterDecl>& registers() const { return registers_; }
  const GateList& gates() const { return gates_; }
  const std::vector<Qubit>& layout() const { return layout_; }
  const std::vector<LiveEvent>& live_events() const { return live_; }
  std::size_t total_qubits() const { return total_; }
  std::size_t gate_count() const { return gates_.size(); }

  bool has_register(std::string_view name) const;
  const RegisterDecl& reg(std::string_view name) const;
  std::vector<Qubit> qubits(std::string_view name) const;
  std::vector<Qubit> qubits_with_role(Role r) const;
  // position[q] = index of qubit q in the layout
  std::vector<std::size_t> positions() const;

 private:
  std::vector<RegisterDecl> registers_;
  GateList gates_;
  std::vector<Qubit> layout_;
  std::vector<LiveEvent> live_;
  std::size_t total_ = 0;
};

struct CostReport {
  std::size_t gate_count = 0;
  std::size_t depth = 0;
  std::size_t qubit_count = 0;
  std::size_t max_fan_in = 0;
  std::size_t max_live_ancilla = 0;
  friend bool operator==(const CostReport&, const CostReport&) = default;
};

Circuit invert(const Circuit& c);
CostReport cost(const Circuit& c);
std::size_t depth(const Circuit& c);
std::vector<Qubit> light_cone(const Circuit& c, std::span<const Qubit> outputs);
std::size_t crossing_count(const Circuit& c, std::size_t cut);
std::vector<std::size_t> crossing_profile(const Circuit& c);  // entry t-1 is the count at cut t

struct SpanProfile {
  std::vector<std::size_t> spans;
  std::size_t total_prefix_span = 0;
  std::size_t max_span = 0;
};
SpanProfile span_profile(const Circuit& c);

std::string to_json(const Circuit& c);
Circuit from_json(std::string_view text);

// Incremental construction helper used by every builder in the library.
class Builder {
 public:
  std::vector<Qubit> add_register(std::string name, std::uint32_t width, Role role);

  void x(Qubit t);
  void cx(Qubit c, Qubit t);
  void ccx(Qubit a, Qubit b, Qubit t);
  void mcx(std::span<const Control> controls, std::span<const Qubit> targets);
  void mcx(std::span<const Control> controls, Qubit target) { mcx(controls, std::span(&target, 1)); }
  void mcx(std::initializer_list<Control> controls, Qubit target);

  std::size_t mark() const { return gates_.size(); }
  // Appends the inverse (reversed order) of the gates emitted since `m`.
  void undo_since(std::size_t m);
  // Replaces the gates emitted since `m` by their inverse.
  void reverse_since(std::size_t m);
  // Appends the inverse of gates [from, to).
  void undo_range(std::size_t from, std::size_t to) { gates_.append_reversed(from, to); }
  GateView gate(std::size_t i) const { return gates_[i]; }
  void live(std::int64_t delta) { live_.push_back({gates_.size(), delta}); }

  std::size_t gate_count() const { return gates_.size(); }
  std::size_t total_qubits() const { return next_; }
  const std::vector<RegisterDecl>& registers() const { return regs_; }

  Circuit finish(std::vector<Qubit> layout = {}) &&;

 private:
  std::vector<RegisterDecl> regs_;
  GateList gates_;
  std::vector<LiveEvent> live_;
  std::uint32_t next_ = 0;
};

// Controls that fire iff `reg` (little-endian) equals `value`.
std::vector<Control> equals_const(std::span<const Qubit> reg, std::uint64_t value);
// Concatenate control lists.
std::vector<Control> join(std::span<const Control> a, std::span<const Control> b);

}  // namespace ro
