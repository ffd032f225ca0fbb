#include "forge/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "forge/errors.hpp"

namespace forge {

namespace {

void check_qubit_count(int n) {
  if (n < 1 || n > 63) throw ArgumentError("qubit count out of range: " + std::to_string(n));
}

constexpr cplx kPhases[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

}  // namespace

PauliString PauliString::identity(int n) {
  check_qubit_count(n);
  PauliString p;
  p.n_qubits = n;
  return p;
}

PauliString PauliString::single(int n, int qubit, char label) {
  check_qubit_count(n);
  if (qubit < 0 || qubit >= n) throw ArgumentError("qubit index out of range");
  PauliString p;
  p.n_qubits = n;
  std::uint64_t bit = std::uint64_t{1} << qubit;
  switch (label) {
    case 'I': break;
    case 'X': p.x = bit; break;
    case 'Z': p.z = bit; break;
    case 'Y':
      p.x = bit;
      p.z = bit;
      p.phase_k = 1;
      break;
    default: throw ArgumentError(std::string("invalid Pauli label: ") + label);
  }
  return p;
}

PauliString PauliString::from_text(std::string_view text) {
  int k = 0;
  if (!text.empty() && (text[0] == '+' || text[0] == '-')) {
    bool neg = text[0] == '-';
    text.remove_prefix(1);
    if (!text.empty() && text[0] == 'i') {
      k = neg ? 3 : 1;
      text.remove_prefix(1);
    } else if (neg) {
      k = 2;
    }
  } else if (!text.empty() && text[0] == 'i') {
    k = 1;
    text.remove_prefix(1);
  }
  if (text.empty()) throw ArgumentError("empty Pauli word");
  check_qubit_count(static_cast<int>(text.size()));
  PauliString p;
  p.n_qubits = static_cast<int>(text.size());
  p.phase_k = k;
  for (int q = 0; q < p.n_qubits; ++q) {
    std::uint64_t bit = std::uint64_t{1} << q;
    switch (text[q]) {
      case 'I': break;
      case 'X': p.x |= bit; break;
      case 'Z': p.z |= bit; break;
      case 'Y':
        p.x |= bit;
        p.z |= bit;
        p.phase_k = (p.phase_k + 1) & 3;
        break;
      default: throw ArgumentError(std::string("invalid Pauli label: ") + text[q]);
    }
  }
  return p;
}

char PauliString::label_at(int qubit) const {
  std::uint64_t bit = std::uint64_t{1} << qubit;
  bool bx = x & bit, bz = z & bit;
  if (bx && bz) return 'Y';
  if (bx) return 'X';
  if (bz) return 'Z';
  return 'I';
}

std::string PauliString::text() const {
  // Display phase relative to the Y-labelled word, undoing the i per Y.
  int ny = std::popcount(x & z);
  int k = ((phase_k - ny) % 4 + 4) % 4;
  std::string out;
  switch (k) {
    case 0: break;
    case 1: out = "i"; break;
    case 2: out = "-"; break;
    case 3: out = "-i"; break;
  }
  for (int q = 0; q < n_qubits; ++q) out += label_at(q);
  return out;
}

cplx PauliString::phase() const { return kPhases[phase_k & 3]; }

bool PauliString::is_hermitian() const {
  int ny = std::popcount(x & z);
  return ((phase_k - ny) % 4 + 4) % 4 % 2 == 0;
}

PauliString pauli_mul(const PauliString& p1, const PauliString& p2) {
  if (p1.n_qubits != p2.n_qubits) throw ArgumentError("Pauli size mismatch");
  PauliString r;
  r.n_qubits = p1.n_qubits;
  r.x = p1.x ^ p2.x;
  r.z = p1.z ^ p2.z;
  // Moving each Z of p1 past each X of p2 on the same qubit gives a -1.
  r.phase_k = (p1.phase_k + p2.phase_k + 2 * std::popcount(p1.z & p2.x)) & 3;
  return r;
}

bool commutes(const PauliString& p1, const PauliString& p2) {
  if (p1.n_qubits != p2.n_qubits) throw ArgumentError("Pauli size mismatch");
  return ((std::popcount(p1.x & p2.z) + std::popcount(p1.z & p2.x)) & 1) == 0;
}

std::vector<cplx> apply_pauli(const PauliString& p, const std::vector<cplx>& v) {
  std::size_t dim = std::size_t{1} << p.n_qubits;
  if (v.size() != dim) throw ArgumentError("statevector dimension mismatch");
  std::vector<cplx> out(dim);
  cplx ph = p.phase();
  for (std::size_t b = 0; b < dim; ++b) {
    cplx a = ph * v[b];
    if (std::popcount(b & p.z) & 1) a = -a;
    out[b ^ p.x] = a;
  }
  return out;
}

Eigen::MatrixXcd dense_matrix(const PauliString& p) {
  if (p.n_qubits > kDenseQubitLimit)
    throw ResourceError("dense matrix over qubit limit");
  std::size_t dim = std::size_t{1} << p.n_qubits;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  cplx ph = p.phase();
  for (std::size_t b = 0; b < dim; ++b) {
    cplx a = ph;
    if (std::popcount(b & p.z) & 1) a = -a;
    m(b ^ p.x, b) = a;
  }
  return m;
}

void PauliSum::add(double coefficient, const PauliString& word) {
  if (n_qubits == 0) n_qubits = word.n_qubits;
  if (word.n_qubits != n_qubits) throw ArgumentError("PauliSum size mismatch");
  int ny = std::popcount(word.x & word.z);
  int rel = ((word.phase_k - ny) % 4 + 4) % 4;
  if (rel % 2 != 0) throw ArgumentError("imaginary-phase term in PauliSum: " + word.text());
  double c = rel == 0 ? coefficient : -coefficient;
  PauliString w = word;
  w.phase_k = ny & 3;
  terms.emplace_back(c, w);
}

void PauliSum::canonicalize() {
  std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) {
    return std::tie(a.second.x, a.second.z) < std::tie(b.second.x, b.second.z);
  });
  std::vector<std::pair<double, PauliString>> merged;
  for (const auto& [c, w] : terms) {
    if (!merged.empty() && merged.back().second.same_word(w))
      merged.back().first += c;
    else
      merged.emplace_back(c, w);
  }
  std::erase_if(merged, [](const auto& t) { return std::abs(t.first) < 1e-14; });
  terms = std::move(merged);
}

bool PauliSum::operator==(const PauliSum& o) const {
  if (n_qubits != o.n_qubits || terms.size() != o.terms.size()) return false;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (!terms[i].second.same_word(o.terms[i].second)) return false;
    if (std::abs(terms[i].first - o.terms[i].first) > 1e-12) return false;
  }
  return true;
}

std::vector<cplx> apply_sum(const PauliSum& s, const std::vector<cplx>& v) {
  std::vector<cplx> out(v.size(), cplx{0, 0});
  for (const auto& [c, w] : s.terms) {
    std::vector<cplx> t = apply_pauli(w, v);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += c * t[i];
  }
  return out;
}

Eigen::MatrixXcd dense_matrix(const PauliSum& s) {
  if (s.n_qubits > kDenseQubitLimit)
    throw ResourceError("dense matrix over qubit limit");
  std::size_t dim = std::size_t{1} << s.n_qubits;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& [c, w] : s.terms) m += c * dense_matrix(w);
  return m;
}

}  // namespace forge
