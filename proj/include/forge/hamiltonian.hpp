#pragma once

#include <string>
#include <vector>

#include "forge/pauli.hpp"

namespace forge {

// One boundary interaction class between the two registers. multiplicity 1
// means the single term coefficient * (op_a on A) x (op_b on B);
// multiplicity 2 means the swap orbit, coefficient * (op_a x op_b +
// op_b x op_a).
struct CrossTerm {
  double coefficient = 0;
  PauliString op_a;
  PauliString op_b;
  int multiplicity = 1;
};

// Hamiltonian of a 2N-qubit system split into registers A (qubits 0..N-1
// of the global index, low bits) and B (qubits N..2N-1). h_a and h_b act
// locally on their register; cross holds the boundary terms.
struct HamiltonianPartition {
  std::string name;
  int n_sub = 0;
  PauliSum h_a;
  PauliSum h_b;
  std::vector<CrossTerm> cross;

  int n_total() const { return 2 * n_sub; }
};

// Transverse-field Ising ring of n_total spins, ZZ couplings of strength 1
// and field h on X. The cut produces one bond per seam, listed in both
// orientations.
HamiltonianPartition build_tfim_1d(int n_total, double h);

// Transverse-field Ising model on a 2x4 grid, periodic along the length-4
// direction, split into two 2x2 blocks. Local qubit order: 0,1 top row,
// 2,3 bottom row.
HamiltonianPartition build_tfim_2d(int rows, int cols, double h);

// Spinless fermions on a 2x2 plaquette with hopping t and
// nearest-neighbour interaction v, Jordan-Wigner mapped, split into two
// 2-site halves. Constant energy shifts are dropped.
HamiltonianPartition build_tv_2x2(double t, double v);

// Throws ArgumentError naming the offending term if any operator has the
// wrong width, is non-Hermitian, fails to commute with its partner, has a
// non-positive multiplicity, or a non-finite coefficient.
void validate_partition(const HamiltonianPartition& p);

}  // namespace forge
