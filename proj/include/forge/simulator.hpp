#pragma once

#include <cstdint>
#include <vector>

#include "forge/pauli.hpp"
#include "forge/rng.hpp"

namespace forge {

using Statevector = std::vector<cplx>;

enum class GateKind { Rx, Ry, Rz, Phase, X, CNOT, CZ };

// Conventions: Rz(g) = diag(e^{-ig/2}, e^{ig/2}),
// Ry(w) = [[cos w/2, -sin w/2], [sin w/2, cos w/2]],
// Rx(a) = [[cos a/2, -i sin a/2], [-i sin a/2, cos a/2]],
// Phase(f) = diag(1, e^{if}).
struct Gate {
  GateKind kind;
  int q0 = 0;
  int q1 = -1;       // second qubit for CNOT (control=q0, target=q1) and CZ
  double angle = 0;  // rotation kinds only
  // Index into the ansatz parameter vector, -1 for fixed gates.
  int param_index = -1;
};

Statevector basis_state(int n_qubits, std::uint64_t sigma);
double norm2(const Statevector& v);

void apply_gate(const Gate& g, Statevector& v);
void apply_circuit(const std::vector<Gate>& gates, Statevector& v);
// Applies the exact inverse (gates reversed, rotation angles negated).
void apply_circuit_adjoint(const std::vector<Gate>& gates, Statevector& v);

double expectation(const Statevector& v, const PauliSum& obs);

// Distribution over measurement outcomes s' of C applied in the rotated
// basis: entry s' = |<s'|Udag C U|s>|^2. The clifford must be unitary.
std::vector<double> conditional_distribution(std::uint64_t sigma,
                                             const std::vector<Gate>& circuit,
                                             const PauliSum& clifford);

std::vector<std::uint64_t> sample_conditional(std::uint64_t sigma,
                                              const std::vector<Gate>& circuit,
                                              const PauliSum& clifford, int shots,
                                              Rng& rng);

// Draws one index from an explicit probability vector by CDF scan.
std::uint64_t sample_index(const std::vector<double>& probs, Rng& rng);

}  // namespace forge
