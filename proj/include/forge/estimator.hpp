#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "forge/ansatz.hpp"
#include "forge/arnn.hpp"
#include "forge/hamiltonian.hpp"
#include "forge/rng.hpp"

namespace forge {

// Unitary C built from two commuting Hermitian words:
// C = (I + (-1)^alpha A + (-1)^beta B - (-1)^(alpha+beta) AB) / 2.
// Stored as its 4-term Pauli combination; applying C costs four word
// applications.
struct CliffordOperator {
  PauliString op_a;
  PauliString op_b;
  int alpha = 0;
  int beta = 0;
  PauliSum representation;
};

CliffordOperator build_clifford(const PauliString& op_a, const PauliString& op_b,
                                int alpha, int beta);

// Gate realization of the same unitary for single-Z words  Z_p, Z_q.
// Anything else throws ArgumentError; use build_clifford instead.
std::vector<Gate> clifford_gate_sequence(const PauliString& op_a,
                                         const PauliString& op_b, int alpha,
                                         int beta);

// Coefficients of the operator identity
//   A x B + B x A = a0 (AB x I + I x AB) + sum_ab a_ab C*_ab x C_ab,
// solved by least squares on the joint support of the two words.
// a is indexed a[2*alpha + beta].
struct DecompositionCoefficients {
  double a0 = 0;
  std::array<double, 4> a{};
  double residual = 0;
};

DecompositionCoefficients solve_coefficients(const PauliString& op_a,
                                             const PauliString& op_b);

struct SampleConfig {
  int n_sigma = 512;
  int shots = 128;
};

struct EstimatorMode {
  enum class Kind { Exact, Sampled };
  Kind kind = Kind::Exact;
  SampleConfig sample;

  static EstimatorMode exact() { return {}; }
  static EstimatorMode sampled(int n_sigma = 512, int shots = 128) {
    return {Kind::Sampled, {n_sigma, shots}};
  }
};

// The variational state: one circuit U shared by both registers and the
// autoregressive model over the Schmidt amplitudes.
struct ForgedModel {
  ArnnModel arnn;
  AnsatzCircuit circuit;
  std::vector<double> omega;
  HamiltonianPartition partition;
};

ForgedModel make_model(const HamiltonianPartition& partition, int n_layers,
                       int hidden_width, std::uint64_t seed);

// Checks the width invariants shared by every estimator entry point.
void validate_model(const ForgedModel& m);

// <obs x I> = <I x obs> = sum_sigma p(sigma) <sigma|U' obs U|sigma>.
// Sampled mode averages over sigma drawn from the autoregressive model;
// rng is required then and unused in exact mode.
double estimate_diagonal(const ForgedModel& m, const PauliSum& obs,
                         const EstimatorMode& mode, Rng* rng = nullptr);

// <psi| C* x C |psi> for the forged state.
double estimate_mu_alpha_beta(const ForgedModel& m, const CliffordOperator& c,
                              const EstimatorMode& mode, Rng* rng = nullptr);

// Swap-symmetrized boundary expectation (<A x B> + <B x A>) / 2 via the
// a0 product term plus the four mu values (term.multiplicity is NOT
// applied here).
double estimate_cross(const ForgedModel& m, const CrossTerm& term,
                      const EstimatorMode& mode, Rng* rng = nullptr);

// 2 <H_A> + sum over cross classes of multiplicity * coefficient * cross.
double energy(const ForgedModel& m, const EstimatorMode& mode,
              Rng* rng = nullptr);

// Enumeration backend shared by the exact energy and the score-function
// gradient. local(sigma) collects every sigma-diagonal contribution
// (2 <sigma|U'h_aU|sigma> plus the weighted a0 product terms); kernel is
// the amplitude quadratic form from all mu terms, weights folded in.
// Exact energy = sum_sigma p(sigma) local(sigma) + lam' kernel lam.
struct ExactEnergyParts {
  Eigen::VectorXd local;
  Eigen::MatrixXd kernel;
};

ExactEnergyParts exact_energy_parts(const ForgedModel& m);

// w = U' C U |sigma> and the conjugate-circuit counterpart. |w|^2 is the
// conditional distribution over sigma'; Re(w~ conj(w))/|w|^2 corrects the
// sampled amplitude-ratio weight at each drawn sigma'.
struct ConditionalAmplitudes {
  Statevector w;
  Statevector w_conj;
};

ConditionalAmplitudes conditional_amplitudes(const ForgedModel& m,
                                             const PauliSum& representation,
                                             std::uint64_t sigma);

// <Z_i Z_j> over all 2N global qubit pairs; symmetric, unit diagonal.
Eigen::MatrixXd correlators(const ForgedModel& m, const EstimatorMode& mode,
                            Rng* rng = nullptr);

}  // namespace forge
