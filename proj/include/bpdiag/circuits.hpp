#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "bpdiag/pauli.hpp"
#include "bpdiag/randomness.hpp"
#include "bpdiag/simulator.hpp"

namespace bpdiag {

enum class GateKind {
  Rotation,       // exp(-i theta P/2), P in {X,Y,Z}
  Rxx,            // exp(-i theta X X)
  PauliRotation,  // exp(-i theta G), G an arbitrary Pauli string
  DenseBlock,     // Haar-random block resolved per sample
};

struct SymbolicParam {
  std::size_t index = 0;
};
struct FixedAngle {
  double angle = 0.0;
};
/// Haar block drawn once per sample and shared by every gate with the same tag.
struct HaarBlock {
  int tag = 0;
  bool adjoint = false;
};
using Binding = std::variant<SymbolicParam, FixedAngle, HaarBlock>;

struct GateSpec {
  GateKind kind = GateKind::Rotation;
  QubitSet qubits;
  Binding binding;
  Axis axis = Axis::Z;
  /// Pauli generator of the rotation kinds (full register width).
  PauliString generator;
  /// Parameter-shift constant: 1/2 for Rotation, 1 for Rxx and PauliRotation, 0 for dense blocks.
  double shift_constant_u = 0.0;
  /// Tree coordinates (1-based layer and site); zero for other families.
  int layer = 0;
  int site = 0;

  bool has_shift_rule() const { return kind != GateKind::DenseBlock; }

  static GateSpec rotation(int n_qubits, Axis axis, int qubit, Binding binding);
  static GateSpec rxx(int n_qubits, int q1, int q2, Binding binding);
  static GateSpec pauli_rotation(const PauliString& generator, Binding binding);
  static GateSpec dense_block(QubitSet qubits, HaarBlock block);
};

struct Circuit {
  int n_qubits = 0;
  std::vector<GateSpec> gates;
  std::size_t param_count = 0;
  std::vector<PauliTerm> observable;
  std::size_t probe_index = 0;

  /// Position in `gates` of the gate bound to the probe parameter.
  std::size_t probe_gate() const;
  const GateSpec& probe() const { return gates[probe_gate()]; }
  /// Throws std::invalid_argument on any violated invariant.
  void validate() const;
};

using HaarBlocks = std::map<int, Eigen::MatrixXcd>;

/// Draws one Haar unitary per distinct tag, in increasing tag order.
HaarBlocks resolve_haar_blocks(const Circuit& circuit, Rng& rng);

void apply_gate(StateVector& state, const GateSpec& gate, std::span<const double> params, const HaarBlocks& blocks);
/// Applies gates[first, last).
void apply_gates(StateVector& state, const Circuit& circuit, std::span<const double> params, const HaarBlocks& blocks,
                 std::size_t first, std::size_t last);

/// Final state from |0...0>.
StateVector run_circuit(const Circuit& circuit, std::span<const double> params, const HaarBlocks& blocks);
double evaluate_cost(const Circuit& circuit, std::span<const double> params, const HaarBlocks& blocks);
/// Resolves Haar tags from `rng` first.
double evaluate_cost(const Circuit& circuit, std::span<const double> params, Rng& rng);

/// Hierarchical tree circuit on n qubits with L = n - 1 layers.
///
/// Layer k holds rotations on sites 1..L-k+2 followed by RXX on neighbouring
/// sites (j, j+1) for j = 1..L-k+1; a final layer holds one rotation on site 1.
/// Site j lives on qubit n - j, so the layers funnel into qubit n - 1, which
/// carries the Z observable. Rotation axes are drawn from `axis_rng`. The probe
/// is the rotation at (layer, site) = (ceil(L/2), ceil(L/2)).
Circuit build_tree_circuit(int n, Rng& axis_rng);

/// Qubit ranges of the three registers of the information-loss circuit.
struct Example1Layout {
  int n1 = 1, n2 = 1, n3 = 1;
  int total() const { return n1 + n2 + n3; }
  QubitSet h1() const;
  QubitSet h2() const;
  QubitSet h3() const;
};
/// Z on the first qubit of H2.
PauliString example1_default_generator(const Example1Layout& layout);
/// Z (x) Z on the first qubits of H2 and H3.
PauliString example1_default_observable(const Example1Layout& layout);

/// V (Haar on H1 H2), exp(-i theta G) with G on H2, U (Haar on H2 H3); observable g.
Circuit build_example1(int n1, int n2, int n3, const PauliString& generator, const PauliString& observable);

/// Z on qubit 0.
PauliString example2_default_generator(int n);
/// Z on qubit n - 1.
PauliString example2_default_observable(int n);

/// Tilt of the input state in the scrambled-rotation circuit. The input must be
/// neither an eigenstate of g (t_+ = t_- identically) nor unbiased (<g> concentrates).
inline constexpr double kExample2InputTilt = 0.39269908169872414;  // pi / 8

/// RY(kExample2InputTilt)|0...0> on qubit n - 1.
StateVector example2_input_state(int n);

/// Fixed RY(kExample2InputTilt) on qubit n - 1, then U, exp(-i theta G), U^dagger with
/// the same Haar draw; observable g.
Circuit build_example2(int n, const PauliString& generator, const PauliString& observable);

/// Back-propagates `support` from the circuit end through gates[cut, end):
/// any gate touching the running set merges its qubits in.
QubitSet light_cone(const Circuit& circuit, const QubitSet& support, std::size_t cut);

}  // namespace bpdiag
