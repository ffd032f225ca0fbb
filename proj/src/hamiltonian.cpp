#include "forge/hamiltonian.hpp"

#include <cmath>

#include "forge/errors.hpp"

namespace forge {

namespace {

PauliString z_at(int n, int q) { return PauliString::single(n, q, 'Z'); }

PauliString zz(int n, int q0, int q1) {
  PauliString w = PauliString::identity(n);
  w.z = (std::uint64_t{1} << q0) | (std::uint64_t{1} << q1);
  return w;
}

}  // namespace

HamiltonianPartition build_tfim_1d(int n_total, double h) {
  if (n_total < 4 || n_total % 2 != 0)
    throw ArgumentError("total qubit count must be even and at least 4");
  int n = n_total / 2;
  HamiltonianPartition p;
  p.name = "tfim1d";
  p.n_sub = n;
  p.h_a = PauliSum(n);
  for (int i = 0; i + 1 < n; ++i) p.h_a.add(1.0, zz(n, i, i + 1));
  for (int i = 0; i < n; ++i) p.h_a.add(h, PauliString::single(n, i, 'X'));
  p.h_a.canonicalize();
  p.h_b = p.h_a;
  // Ring bonds (N-1, N) and (2N-1, 0), one per orientation.
  p.cross.push_back({1.0, z_at(n, n - 1), z_at(n, 0), 1});
  p.cross.push_back({1.0, z_at(n, 0), z_at(n, n - 1), 1});
  return p;
}

HamiltonianPartition build_tfim_2d(int rows, int cols, double h) {
  if (rows != 2 || cols != 4)
    throw ArgumentError("only the 2x4 grid is supported");
  HamiltonianPartition p;
  p.name = "tfim2d";
  p.n_sub = 4;
  p.h_a = PauliSum(4);
  p.h_a.add(1.0, zz(4, 0, 1));
  p.h_a.add(1.0, zz(4, 2, 3));
  p.h_a.add(1.0, zz(4, 0, 2));
  p.h_a.add(1.0, zz(4, 1, 3));
  for (int i = 0; i < 4; ++i) p.h_a.add(h, PauliString::single(4, i, 'X'));
  p.h_a.canonicalize();
  p.h_b = p.h_a;
  // Two seams between the blocks (the grid wraps along its length), two
  // bonds each; mirrored bonds fold into one class of multiplicity 2.
  p.cross.push_back({1.0, z_at(4, 1), z_at(4, 0), 2});
  p.cross.push_back({1.0, z_at(4, 3), z_at(4, 2), 2});
  return p;
}

HamiltonianPartition build_tv_2x2(double t, double v) {
  HamiltonianPartition p;
  p.name = "tv2x2";
  p.n_sub = 2;
  p.h_a = PauliSum(2);
  p.h_a.add(t / 2, PauliString::from_text("XX"));
  p.h_a.add(t / 2, PauliString::from_text("YY"));
  p.h_a.add(v / 4, PauliString::from_text("ZZ"));
  p.h_a.canonicalize();
  p.h_b = p.h_a;
  // Jordan-Wigner strings for the two hops crossing the cut, plus the two
  // density-density bonds across it.
  p.cross.push_back({t / 2, PauliString::from_text("XZ"), PauliString::from_text("XI"), 1});
  p.cross.push_back({t / 2, PauliString::from_text("YZ"), PauliString::from_text("YI"), 1});
  p.cross.push_back({t / 2, PauliString::from_text("IX"), PauliString::from_text("ZX"), 1});
  p.cross.push_back({t / 2, PauliString::from_text("IY"), PauliString::from_text("ZY"), 1});
  p.cross.push_back({v / 4, PauliString::from_text("ZI"), PauliString::from_text("ZI"), 1});
  p.cross.push_back({v / 4, PauliString::from_text("IZ"), PauliString::from_text("IZ"), 1});
  return p;
}

void validate_partition(const HamiltonianPartition& p) {
  if (p.n_sub < 1) throw ArgumentError("partition has no qubits");
  if (p.h_a.n_qubits != p.n_sub || p.h_b.n_qubits != p.n_sub)
    throw ArgumentError("local Hamiltonian width does not match the partition");
  PauliSum a = p.h_a, b = p.h_b;
  a.canonicalize();
  b.canonicalize();
  if (!(a == b))
    throw ArgumentError("local Hamiltonians differ between the registers");
  for (std::size_t k = 0; k < p.cross.size(); ++k) {
    const auto& t = p.cross[k];
    std::string where = "cross term " + std::to_string(k) + " (" + t.op_a.text() +
                        ", " + t.op_b.text() + ")";
    if (t.op_a.n_qubits != p.n_sub || t.op_b.n_qubits != p.n_sub)
      throw ArgumentError(where + ": operator width does not match the partition");
    if (!t.op_a.is_hermitian() || !t.op_b.is_hermitian())
      throw ArgumentError(where + ": operators must be Hermitian words");
    if (!commutes(t.op_a, t.op_b))
      throw ArgumentError(where + ": operators do not commute");
    if (t.multiplicity != 1 && t.multiplicity != 2)
      throw ArgumentError(where + ": multiplicity must be 1 or 2");
    if (!std::isfinite(t.coefficient))
      throw ArgumentError(where + ": coefficient is not finite");
  }
}

}  // namespace forge
