#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "forge/simulator.hpp"

namespace forge {

// Layered circuit: per layer, Rz-Ry-Rz Euler rotations on every qubit
// (3 parameters each, applied phi then omega then gamma) followed by a
// brick wall of CNOTs with wrap-around. Even layers put controls on even
// qubits, odd layers on odd qubits; the target is (control+1) mod N.
struct AnsatzCircuit {
  int n_qubits = 0;
  int n_layers = 0;
  std::vector<Gate> gates;

  int n_params() const { return 3 * n_qubits * n_layers; }
};

AnsatzCircuit build_ansatz(int n_qubits, int n_layers);

// Gate list with rotation angles filled in from the parameter vector.
std::vector<Gate> bind_params(const AnsatzCircuit& c, std::span<const double> omega);

Statevector run(const AnsatzCircuit& c, std::span<const double> omega,
                std::uint64_t sigma);

// Parameters of the entrywise complex conjugate of U: Rz angles negate,
// Ry angles are real and stay, CNOTs are real.
std::vector<double> conjugate_params(std::span<const double> omega);

// Dense unitary, column b = U|b>.
Eigen::MatrixXcd circuit_matrix(const AnsatzCircuit& c, std::span<const double> omega);

// Two-point shift rule, exact when scalar_fn is a single-frequency
// trigonometric polynomial in each parameter (one rotation per parameter,
// generator eigenvalues +-1/2).
std::vector<double> parameter_shift_grad(
    std::span<const double> omega,
    const std::function<double(std::span<const double>)>& scalar_fn);

// Four-point shift rule, exact for frequency components up to 2 per
// parameter. Needed for quantities quadratic in the circuit matrix
// entries twice over, like the conjugated-pair kernels. Evaluations run
// in parallel, so scalar_fn must be safe to call concurrently.
std::vector<double> parameter_shift_grad4(
    std::span<const double> omega,
    const std::function<double(std::span<const double>)>& scalar_fn);

}  // namespace forge
