#include "forge/simulator.hpp"

#include <cmath>

#include "forge/errors.hpp"

namespace forge {

Statevector basis_state(int n_qubits, std::uint64_t sigma) {
  if (n_qubits < 1 || n_qubits > kDenseQubitLimit)
    throw ArgumentError("qubit count out of range");
  Statevector v(std::size_t{1} << n_qubits, cplx{0, 0});
  if (sigma >= v.size()) throw ArgumentError("basis index out of range");
  v[sigma] = 1.0;
  return v;
}

double norm2(const Statevector& v) {
  double s = 0;
  for (const auto& a : v) s += std::norm(a);
  return s;
}

namespace {

void check_target(const Statevector& v, int q) {
  if (q < 0 || (std::size_t{1} << (q + 1)) > v.size())
    throw ArgumentError("gate target out of range");
}

inline void single_qubit_rotation(Statevector& v, int q, cplx m00, cplx m01, cplx m10,
                                  cplx m11) {
  const std::size_t bit = std::size_t{1} << q;
  const std::size_t dim = v.size();
  for (std::size_t base = 0; base < dim; base += 2 * bit) {
    for (std::size_t off = 0; off < bit; ++off) {
      std::size_t i0 = base + off, i1 = i0 + bit;
      cplx a = v[i0], b = v[i1];
      v[i0] = m00 * a + m01 * b;
      v[i1] = m10 * a + m11 * b;
    }
  }
}

}  // namespace

void apply_gate(const Gate& g, Statevector& v) {
  check_target(v, g.q0);
  const std::size_t bit0 = std::size_t{1} << g.q0;
  switch (g.kind) {
    case GateKind::Rz: {
      cplx e0 = std::polar(1.0, -g.angle / 2), e1 = std::polar(1.0, g.angle / 2);
      for (std::size_t b = 0; b < v.size(); ++b) v[b] *= (b & bit0) ? e1 : e0;
      return;
    }
    case GateKind::Ry: {
      double c = std::cos(g.angle / 2), s = std::sin(g.angle / 2);
      single_qubit_rotation(v, g.q0, c, -s, s, c);
      return;
    }
    case GateKind::Rx: {
      double c = std::cos(g.angle / 2), s = std::sin(g.angle / 2);
      single_qubit_rotation(v, g.q0, c, cplx(0, -s), cplx(0, -s), c);
      return;
    }
    case GateKind::Phase: {
      cplx e = std::polar(1.0, g.angle);
      for (std::size_t b = 0; b < v.size(); ++b)
        if (b & bit0) v[b] *= e;
      return;
    }
    case GateKind::X: {
      for (std::size_t b = 0; b < v.size(); ++b)
        if (!(b & bit0)) std::swap(v[b], v[b | bit0]);
      return;
    }
    case GateKind::CNOT: {
      check_target(v, g.q1);
      if (g.q0 == g.q1) throw ArgumentError("CNOT targets must differ");
      const std::size_t bit1 = std::size_t{1} << g.q1;
      for (std::size_t b = 0; b < v.size(); ++b)
        if ((b & bit0) && !(b & bit1)) std::swap(v[b], v[b | bit1]);
      return;
    }
    case GateKind::CZ: {
      check_target(v, g.q1);
      if (g.q0 == g.q1) throw ArgumentError("CZ targets must differ");
      const std::size_t bit1 = std::size_t{1} << g.q1;
      for (std::size_t b = 0; b < v.size(); ++b)
        if ((b & bit0) && (b & bit1)) v[b] = -v[b];
      return;
    }
  }
  throw ArgumentError("unknown gate kind");
}

void apply_circuit(const std::vector<Gate>& gates, Statevector& v) {
  for (const auto& g : gates) apply_gate(g, v);
}

void apply_circuit_adjoint(const std::vector<Gate>& gates, Statevector& v) {
  for (auto it = gates.rbegin(); it != gates.rend(); ++it) {
    Gate g = *it;
    switch (g.kind) {
      case GateKind::Rx:
      case GateKind::Ry:
      case GateKind::Rz:
      case GateKind::Phase:
        g.angle = -g.angle;
        break;
      default:
        break;  // X, CNOT, CZ are involutions
    }
    apply_gate(g, v);
  }
}

double expectation(const Statevector& v, const PauliSum& obs) {
  if (v.size() != (std::size_t{1} << obs.n_qubits))
    throw ArgumentError("statevector dimension mismatch");
  cplx acc{0, 0};
  for (const auto& [c, w] : obs.terms) {
    std::vector<cplx> pv = apply_pauli(w, v);
    cplx dot{0, 0};
    for (std::size_t i = 0; i < v.size(); ++i) dot += std::conj(v[i]) * pv[i];
    acc += c * dot;
  }
  if (std::abs(acc.imag()) > 1e-10)
    throw InternalError("non-Hermitian expectation: imaginary part " +
                        std::to_string(acc.imag()));
  return acc.real();
}

std::vector<double> conditional_distribution(std::uint64_t sigma,
                                             const std::vector<Gate>& circuit,
                                             const PauliSum& clifford) {
  Statevector v = basis_state(clifford.n_qubits, sigma);
  apply_circuit(circuit, v);
  v = apply_sum(clifford, v);
  apply_circuit_adjoint(circuit, v);
  std::vector<double> p(v.size());
  double total = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    p[i] = std::norm(v[i]);
    total += p[i];
  }
  if (std::abs(total - 1.0) > 1e-10)
    throw InternalError("conditional distribution does not sum to 1 (non-unitary operator?)");
  return p;
}

std::uint64_t sample_index(const std::vector<double>& probs, Rng& rng) {
  double u = uniform01(rng);
  double acc = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return i;
  }
  return probs.size() - 1;
}

std::vector<std::uint64_t> sample_conditional(std::uint64_t sigma,
                                              const std::vector<Gate>& circuit,
                                              const PauliSum& clifford, int shots,
                                              Rng& rng) {
  if (shots < 1) throw ArgumentError("shots must be positive");
  std::vector<double> p = conditional_distribution(sigma, circuit, clifford);
  std::vector<std::uint64_t> out(static_cast<std::size_t>(shots));
  for (auto& s : out) s = sample_index(p, rng);
  return out;
}

}  // namespace forge
