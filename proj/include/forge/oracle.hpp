#pragma once

#include <vector>

#include <Eigen/Dense>

#include "forge/hamiltonian.hpp"

namespace forge {

// Dense reference implementations used to cross-check the estimator and
// the trainer. Everything here builds full 2^(2N) objects, so it is only
// usable for small systems.

// Full Hamiltonian on 2N qubits. Register A occupies the low index bits,
// register B the high bits; a cross class contributes
// multiplicity * coefficient * (op_a x op_b) as written.
Eigen::MatrixXcd dense_hamiltonian(const HamiltonianPartition& p);

struct GroundState {
  double energy = 0;
  Eigen::VectorXcd state;
};

GroundState exact_ground_state(const HamiltonianPartition& p);

// State sum_sigma lambda_sigma (U|sigma>)_A (U|sigma>)_B from the dense
// subsystem unitary and the amplitude list.
Eigen::VectorXcd reconstruct_forged_state(const Eigen::MatrixXcd& u,
                                          const std::vector<double>& lambdas);

// Singular values of the A|B reshaping of the state, descending.
std::vector<double> schmidt_values(const Eigen::VectorXcd& state, int n_sub);

// <Z_i Z_j> for all global qubit pairs, diagonal set to 1.
Eigen::MatrixXd exact_zz_correlators(const Eigen::VectorXcd& state, int n_total);

}  // namespace forge
