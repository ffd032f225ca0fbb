#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace forge {

using cplx = std::complex<double>;

inline constexpr int kDenseQubitLimit = 12;

// Pauli word on n qubits stored as X/Z bitmasks plus a power of i.
// Qubit 0 is the least-significant bit of every basis-state integer.
// The operator is i^phase_k * prod_q X_q^{x bit} Z_q^{z bit}; a Y factor
// is encoded as x=z=1 with one extra factor of i folded into phase_k.
struct PauliString {
  int n_qubits = 0;
  std::uint64_t x = 0;
  std::uint64_t z = 0;
  int phase_k = 0;  // phase = i^phase_k, 0..3

  static PauliString identity(int n);
  static PauliString single(int n, int qubit, char label);
  // Text form: one char per qubit, leftmost = qubit 0, with an optional
  // leading sign/phase: "ZIIZ", "-iXY", "+XX".
  static PauliString from_text(std::string_view text);

  char label_at(int qubit) const;
  std::string text() const;
  cplx phase() const;
  bool is_identity_word() const { return x == 0 && z == 0; }
  // True when phase * word is Hermitian (phase cancels the Y bookkeeping).
  bool is_hermitian() const;

  bool same_word(const PauliString& o) const {
    return n_qubits == o.n_qubits && x == o.x && z == o.z;
  }
  bool operator==(const PauliString& o) const {
    return same_word(o) && phase_k == o.phase_k;
  }
};

PauliString pauli_mul(const PauliString& p1, const PauliString& p2);
bool commutes(const PauliString& p1, const PauliString& p2);

// p * v without materializing a matrix.
std::vector<cplx> apply_pauli(const PauliString& p, const std::vector<cplx>& v);

Eigen::MatrixXcd dense_matrix(const PauliString& p);

// Real linear combination of Pauli words; words are kept phase-free
// (Hermitian form), merged and sorted on construction.
struct PauliSum {
  int n_qubits = 0;
  std::vector<std::pair<double, PauliString>> terms;

  explicit PauliSum(int n = 0) : n_qubits(n) {}

  // Folds the word's phase into the coefficient; rejects terms whose
  // phase*coefficient is not real (the sum must stay Hermitian).
  void add(double coefficient, const PauliString& word);
  void canonicalize();

  bool operator==(const PauliSum& o) const;
};

std::vector<cplx> apply_sum(const PauliSum& s, const std::vector<cplx>& v);
Eigen::MatrixXcd dense_matrix(const PauliSum& s);

}  // namespace forge
