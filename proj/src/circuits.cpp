#include "bpdiag/circuits.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace bpdiag {

namespace {

double bound_angle(const Binding& binding, std::span<const double> params) {
  if (const auto* s = std::get_if<SymbolicParam>(&binding)) return params[s->index];
  if (const auto* f = std::get_if<FixedAngle>(&binding)) return f->angle;
  throw std::logic_error("rotation gate bound to a Haar block");
}

QubitSet range_of(int first, int count) {
  QubitSet out(static_cast<std::size_t>(count));
  std::iota(out.begin(), out.end(), first);
  return out;
}

}  // namespace

GateSpec GateSpec::rotation(int n_qubits, Axis axis, int qubit, Binding binding) {
  GateSpec g;
  g.kind = GateKind::Rotation;
  g.qubits = {qubit};
  g.binding = binding;
  g.axis = axis;
  g.generator = PauliString::single(n_qubits, qubit, axis_char(axis));
  g.shift_constant_u = 0.5;
  return g;
}

GateSpec GateSpec::rxx(int n_qubits, int q1, int q2, Binding binding) {
  if (q1 == q2) throw std::invalid_argument("rxx: coincident qubits");
  GateSpec g;
  g.kind = GateKind::Rxx;
  g.qubits = {q1, q2};
  g.binding = binding;
  g.generator = PauliString(n_qubits, mask_of({std::min(q1, q2), std::max(q1, q2)}), 0);
  g.shift_constant_u = 1.0;
  return g;
}

GateSpec GateSpec::pauli_rotation(const PauliString& generator, Binding binding) {
  if (generator.is_identity()) throw std::invalid_argument("pauli_rotation: identity generator");
  GateSpec g;
  g.kind = GateKind::PauliRotation;
  g.qubits = generator.support();
  g.binding = binding;
  g.generator = generator;
  g.shift_constant_u = 1.0;
  return g;
}

GateSpec GateSpec::dense_block(QubitSet qubits, HaarBlock block) {
  GateSpec g;
  g.kind = GateKind::DenseBlock;
  g.qubits = std::move(qubits);
  g.binding = block;
  g.shift_constant_u = 0.0;
  return g;
}

std::size_t Circuit::probe_gate() const {
  for (std::size_t i = 0; i < gates.size(); ++i) {
    const auto* s = std::get_if<SymbolicParam>(&gates[i].binding);
    if (s && s->index == probe_index) return i;
  }
  throw std::invalid_argument("circuit has no gate bound to the probe parameter");
}

void Circuit::validate() const {
  if (n_qubits < 1 || n_qubits > StateVector::kMaxQubits) throw std::invalid_argument("circuit: bad qubit count");
  std::size_t probe_refs = 0;
  for (const auto& g : gates) {
    for (int q : g.qubits) {
      if (q < 0 || q >= n_qubits) throw std::invalid_argument("circuit: gate qubit out of range");
    }
    if (const auto* s = std::get_if<SymbolicParam>(&g.binding)) {
      if (s->index >= param_count) throw std::invalid_argument("circuit: symbolic index out of range");
      if (s->index == probe_index) ++probe_refs;
    }
    if (g.kind == GateKind::DenseBlock && !std::holds_alternative<HaarBlock>(g.binding)) {
      throw std::invalid_argument("circuit: dense block without Haar binding");
    }
    const double expected_u = g.kind == GateKind::Rotation ? 0.5 : (g.kind == GateKind::DenseBlock ? 0.0 : 1.0);
    if (g.shift_constant_u != expected_u) throw std::invalid_argument("circuit: shift constant does not match gate kind");
  }
  if (probe_refs != 1) throw std::invalid_argument("circuit: probe parameter must bind exactly one gate");
  if (!probe().has_shift_rule()) throw std::invalid_argument("circuit: probe gate has no Pauli generator");
  for (const auto& t : observable) {
    if (t.pauli.n_qubits() != n_qubits) throw std::invalid_argument("circuit: observable width mismatch");
  }
}

HaarBlocks resolve_haar_blocks(const Circuit& circuit, Rng& rng) {
  std::map<int, int> dims;
  for (const auto& g : circuit.gates) {
    if (const auto* h = std::get_if<HaarBlock>(&g.binding)) {
      const int dim = 1 << g.qubits.size();
      auto [it, inserted] = dims.emplace(h->tag, dim);
      if (!inserted && it->second != dim) throw std::invalid_argument("Haar tag reused with a different width");
    }
  }
  HaarBlocks blocks;
  for (const auto& [tag, dim] : dims) blocks.emplace(tag, sample_haar(dim, rng));
  return blocks;
}

void apply_gate(StateVector& state, const GateSpec& gate, std::span<const double> params, const HaarBlocks& blocks) {
  switch (gate.kind) {
    case GateKind::Rotation:
      apply_rotation_1q(state, gate.axis, gate.qubits[0], bound_angle(gate.binding, params));
      break;
    case GateKind::Rxx:
      apply_pauli_rotation(state, gate.generator, bound_angle(gate.binding, params));
      break;
    case GateKind::PauliRotation:
      apply_pauli_rotation(state, gate.generator, bound_angle(gate.binding, params));
      break;
    case GateKind::DenseBlock: {
      const auto& h = std::get<HaarBlock>(gate.binding);
      const auto it = blocks.find(h.tag);
      if (it == blocks.end()) throw std::invalid_argument("unresolved Haar tag");
      if (h.adjoint) {
        apply_dense(state, it->second.adjoint(), gate.qubits);
      } else {
        apply_dense(state, it->second, gate.qubits);
      }
      break;
    }
  }
}

void apply_gates(StateVector& state, const Circuit& circuit, std::span<const double> params, const HaarBlocks& blocks,
                 std::size_t first, std::size_t last) {
  if (params.size() != circuit.param_count) throw std::invalid_argument("parameter vector length mismatch");
  for (std::size_t i = first; i < last; ++i) apply_gate(state, circuit.gates[i], params, blocks);
}

StateVector run_circuit(const Circuit& circuit, std::span<const double> params, const HaarBlocks& blocks) {
  StateVector state = StateVector::zero(circuit.n_qubits);
  apply_gates(state, circuit, params, blocks, 0, circuit.gates.size());
  return state;
}

double evaluate_cost(const Circuit& circuit, std::span<const double> params, const HaarBlocks& blocks) {
  return expect_observable(run_circuit(circuit, params, blocks), circuit.observable);
}

double evaluate_cost(const Circuit& circuit, std::span<const double> params, Rng& rng) {
  return evaluate_cost(circuit, params, resolve_haar_blocks(circuit, rng));
}

Circuit build_tree_circuit(int n, Rng& axis_rng) {
  if (n < 3) throw std::invalid_argument("tree circuit needs n >= 3");
  if (n > StateVector::kMaxQubits) throw std::invalid_argument("tree circuit: too many qubits");
  const int layers = n - 1;
  const int probe = (layers + 1) / 2;
  constexpr Axis axes[3] = {Axis::X, Axis::Y, Axis::Z};
  auto qubit_of = [n](int site) { return n - site; };

  Circuit c;
  c.n_qubits = n;
  std::size_t param = 0;
  auto add_rotation = [&](int layer, int site) {
    GateSpec g = GateSpec::rotation(n, axes[axis_rng.below(3)], qubit_of(site), SymbolicParam{param});
    g.layer = layer;
    g.site = site;
    if (layer == probe && site == probe) c.probe_index = param;
    c.gates.push_back(std::move(g));
    ++param;
  };
  for (int k = 1; k <= layers; ++k) {
    for (int j = 1; j <= layers - k + 2; ++j) add_rotation(k, j);
    for (int j = 1; j <= layers - k + 1; ++j) {
      GateSpec g = GateSpec::rxx(n, qubit_of(j), qubit_of(j + 1), SymbolicParam{param++});
      g.layer = k;
      g.site = j;
      c.gates.push_back(std::move(g));
    }
  }
  add_rotation(layers + 1, 1);
  c.param_count = param;
  c.observable = {PauliTerm{1.0, PauliString::single(n, n - 1, 'Z')}};
  c.validate();
  return c;
}

QubitSet Example1Layout::h1() const { return range_of(0, n1); }
QubitSet Example1Layout::h2() const { return range_of(n1, n2); }
QubitSet Example1Layout::h3() const { return range_of(n1 + n2, n3); }

PauliString example1_default_generator(const Example1Layout& layout) {
  return PauliString::single(layout.total(), layout.n1, 'Z');
}

PauliString example1_default_observable(const Example1Layout& layout) {
  const int n = layout.total();
  return PauliString(n, 0, mask_of({layout.n1, layout.n1 + layout.n2}));
}

Circuit build_example1(int n1, int n2, int n3, const PauliString& generator, const PauliString& observable) {
  if (n1 < 1 || n2 < 1 || n3 < 1) throw std::invalid_argument("example1: every register needs a qubit");
  const Example1Layout layout{n1, n2, n3};
  const int n = layout.total();
  if (n > 14) throw std::invalid_argument("example1: n1 + n2 + n3 must be <= 14");
  if (generator.n_qubits() != n || observable.n_qubits() != n) throw std::invalid_argument("example1: Pauli width mismatch");
  const std::uint64_t h2 = mask_of(layout.h2());
  const std::uint64_t h23 = h2 | mask_of(layout.h3());
  if (generator.is_identity() || (generator.support_mask() & ~h2) != 0) {
    throw std::invalid_argument("example1: generator must be supported on H2");
  }
  if ((observable.support_mask() & ~h23) != 0) throw std::invalid_argument("example1: observable must be supported on H2 H3");

  QubitSet h12 = layout.h1();
  for (int q : layout.h2()) h12.push_back(q);
  QubitSet h23q = layout.h2();
  for (int q : layout.h3()) h23q.push_back(q);

  Circuit c;
  c.n_qubits = n;
  c.gates.push_back(GateSpec::dense_block(h12, HaarBlock{0, false}));
  c.gates.push_back(GateSpec::pauli_rotation(generator, SymbolicParam{0}));
  c.gates.push_back(GateSpec::dense_block(h23q, HaarBlock{1, false}));
  c.param_count = 1;
  c.probe_index = 0;
  c.observable = {PauliTerm{1.0, observable}};
  c.validate();
  return c;
}

PauliString example2_default_generator(int n) { return PauliString::single(n, 0, 'Z'); }
PauliString example2_default_observable(int n) { return PauliString::single(n, n - 1, 'Z'); }

StateVector example2_input_state(int n) {
  StateVector s = StateVector::zero(n);
  apply_rotation_1q(s, Axis::Y, n - 1, kExample2InputTilt);
  return s;
}

Circuit build_example2(int n, const PauliString& generator, const PauliString& observable) {
  if (n < 1 || n > 7) throw std::invalid_argument("example2: n must be in [1, 7]");
  if (generator.n_qubits() != n || observable.n_qubits() != n) throw std::invalid_argument("example2: Pauli width mismatch");
  QubitSet all = range_of(0, n);
  Circuit c;
  c.n_qubits = n;
  c.gates.push_back(GateSpec::rotation(n, Axis::Y, n - 1, FixedAngle{kExample2InputTilt}));
  c.gates.push_back(GateSpec::dense_block(all, HaarBlock{0, false}));
  c.gates.push_back(GateSpec::pauli_rotation(generator, SymbolicParam{0}));
  c.gates.push_back(GateSpec::dense_block(all, HaarBlock{0, true}));
  c.param_count = 1;
  c.probe_index = 0;
  c.observable = {PauliTerm{1.0, observable}};
  c.validate();
  return c;
}

QubitSet light_cone(const Circuit& circuit, const QubitSet& support, std::size_t cut) {
  if (cut > circuit.gates.size()) throw std::invalid_argument("light_cone: cut beyond circuit end");
  std::uint64_t running = mask_of(support);
  for (std::size_t i = circuit.gates.size(); i > cut; --i) {
    const std::uint64_t gate_mask = mask_of(circuit.gates[i - 1].qubits);
    if (gate_mask & running) running |= gate_mask;
  }
  return qubits_of(running);
}

}  // namespace bpdiag
