#include "forge/ansatz.hpp"

#include <numbers>

#include "forge/errors.hpp"
#include "forge/parallel.hpp"

namespace forge {

AnsatzCircuit build_ansatz(int n_qubits, int n_layers) {
  if (n_qubits < 2) throw ArgumentError("ansatz needs at least 2 qubits");
  if (n_layers < 0) throw ArgumentError("negative layer count");
  AnsatzCircuit c;
  c.n_qubits = n_qubits;
  c.n_layers = n_layers;
  for (int l = 0; l < n_layers; ++l) {
    for (int q = 0; q < n_qubits; ++q) {
      int base = 3 * (l * n_qubits + q);
      c.gates.push_back({GateKind::Rz, q, -1, 0, base});
      c.gates.push_back({GateKind::Ry, q, -1, 0, base + 1});
      c.gates.push_back({GateKind::Rz, q, -1, 0, base + 2});
    }
    for (int i = l % 2; i < n_qubits; i += 2)
      c.gates.push_back({GateKind::CNOT, i, (i + 1) % n_qubits, 0, -1});
  }
  return c;
}

std::vector<Gate> bind_params(const AnsatzCircuit& c, std::span<const double> omega) {
  if (static_cast<int>(omega.size()) != c.n_params())
    throw ArgumentError("parameter count mismatch");
  std::vector<Gate> gates = c.gates;
  for (auto& g : gates)
    if (g.param_index >= 0) g.angle = omega[static_cast<std::size_t>(g.param_index)];
  return gates;
}

Statevector run(const AnsatzCircuit& c, std::span<const double> omega,
                std::uint64_t sigma) {
  Statevector v = basis_state(c.n_qubits, sigma);
  auto gates = bind_params(c, omega);
  apply_circuit(gates, v);
  return v;
}

std::vector<double> conjugate_params(std::span<const double> omega) {
  std::vector<double> out(omega.begin(), omega.end());
  for (std::size_t i = 0; i < out.size(); i += 3) {
    out[i] = -out[i];
    if (i + 2 < out.size()) out[i + 2] = -out[i + 2];
  }
  return out;
}

Eigen::MatrixXcd circuit_matrix(const AnsatzCircuit& c, std::span<const double> omega) {
  const std::size_t dim = std::size_t{1} << c.n_qubits;
  auto gates = bind_params(c, omega);
  Eigen::MatrixXcd u(dim, dim);
  for (std::size_t b = 0; b < dim; ++b) {
    Statevector v = basis_state(c.n_qubits, b);
    apply_circuit(gates, v);
    for (std::size_t i = 0; i < dim; ++i) u(i, b) = v[i];
  }
  return u;
}

std::vector<double> parameter_shift_grad(
    std::span<const double> omega,
    const std::function<double(std::span<const double>)>& scalar_fn) {
  constexpr double half_pi = std::numbers::pi / 2;
  std::vector<double> work(omega.begin(), omega.end());
  std::vector<double> grad(work.size());
  for (std::size_t k = 0; k < work.size(); ++k) {
    double saved = work[k];
    work[k] = saved + half_pi;
    double plus = scalar_fn(work);
    work[k] = saved - half_pi;
    double minus = scalar_fn(work);
    work[k] = saved;
    grad[k] = (plus - minus) / 2;
  }
  return grad;
}

std::vector<double> parameter_shift_grad4(
    std::span<const double> omega,
    const std::function<double(std::span<const double>)>& scalar_fn) {
  constexpr double quarter_pi = std::numbers::pi / 4;
  constexpr double half_pi = std::numbers::pi / 2;
  const double outer = (1.0 - std::numbers::sqrt2) / 2.0;
  std::vector<double> grad(omega.size());
  parallel_for(static_cast<int>(omega.size()), [&](int j) {
    std::vector<double> work(omega.begin(), omega.end());
    auto k = static_cast<std::size_t>(j);
    auto at = [&](double shift) {
      work[k] = omega[k] + shift;
      return scalar_fn(work);
    };
    grad[k] = at(quarter_pi) - at(-quarter_pi) +
              outer * (at(half_pi) - at(-half_pi));
  });
  return grad;
}

}  // namespace forge
