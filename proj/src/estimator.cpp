#include "forge/estimator.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include <unsupported/Eigen/KroneckerProduct>

#include "forge/errors.hpp"
#include "forge/simulator.hpp"

namespace forge {

namespace {

constexpr double kSolveTolerance = 1e-10;

void require_pair(const PauliString& op_a, const PauliString& op_b) {
  if (op_a.n_qubits != op_b.n_qubits)
    throw ArgumentError("operator pair acts on different widths");
  if (!op_a.is_hermitian() || !op_b.is_hermitian())
    throw ArgumentError("operator pair must be Hermitian words");
  if (!commutes(op_a, op_b))
    throw ArgumentError("operator pair must commute");
}

// Restriction of a word to the qubits selected by mask, relabeled 0..k-1.
PauliString restrict_to(const PauliString& w, std::uint64_t mask, int n_kept) {
  PauliString out = PauliString::identity(n_kept);
  out.phase_k = w.phase_k;
  int k = 0;
  for (int q = 0; q < w.n_qubits; ++q) {
    if (!((mask >> q) & 1)) continue;
    out.x |= ((w.x >> q) & 1) << k;
    out.z |= ((w.z >> q) & 1) << k;
    ++k;
  }
  return out;
}

Eigen::VectorXcd to_vector(const Statevector& v) {
  return Eigen::Map<const Eigen::VectorXcd>(v.data(),
                                            static_cast<Eigen::Index>(v.size()));
}

Statevector to_state(const Eigen::VectorXcd& v) {
  return Statevector(v.data(), v.data() + v.size());
}

// ---- exact-mode workspace ----

struct ExactWork {
  int n = 0;
  Eigen::MatrixXcd u;   // circuit unitary
  Eigen::MatrixXcd uc;  // entrywise conjugate, from negated Rz angles
  std::vector<double> p;
  Eigen::VectorXd lam;
};

ExactWork make_exact_work(const ForgedModel& m) {
  validate_model(m);
  if (m.partition.n_sub > kDenseQubitLimit)
    throw ResourceError("subsystem too large for exact enumeration");
  ExactWork w;
  w.n = m.partition.n_sub;
  w.u = circuit_matrix(m.circuit, m.omega);
  w.uc = circuit_matrix(m.circuit, conjugate_params(m.omega));
  w.p = m.arnn.enumerate_probs();
  w.lam.resize(static_cast<Eigen::Index>(w.p.size()));
  for (std::size_t s = 0; s < w.p.size(); ++s)
    w.lam(static_cast<Eigen::Index>(s)) = std::sqrt(w.p[s]);
  return w;
}

// <sigma|U' obs U|sigma> for every sigma.
Eigen::VectorXd diagonal_values(const ExactWork& w, const PauliSum& obs) {
  const Eigen::Index dim = w.u.cols();
  Eigen::VectorXd d(dim);
  for (Eigen::Index s = 0; s < dim; ++s) {
    Statevector col = to_state(w.u.col(s));
    Statevector hv = apply_sum(obs, col);
    cplx acc = 0;
    for (std::size_t i = 0; i < col.size(); ++i)
      acc += std::conj(col[i]) * hv[i];
    d(s) = std::real(acc);
  }
  return d;
}

// M = U' C U columns computed through the 4-word representation.
Eigen::MatrixXcd conjugated_matrix(const Eigen::MatrixXcd& u, const PauliSum& rep) {
  const Eigen::Index dim = u.cols();
  Eigen::MatrixXcd cu(dim, dim);
  for (Eigen::Index s = 0; s < dim; ++s) {
    Statevector col = to_state(u.col(s));
    cu.col(s) = to_vector(apply_sum(rep, col));
  }
  return u.adjoint() * cu;
}

// K(sigma', sigma) = Re[ conj(M~) .* M ] where M~ uses the conjugate
// circuit. lam' K lam is <psi| C* x C |psi> on the forged state.
Eigen::MatrixXd mu_kernel(const ExactWork& w, const PauliSum& rep) {
  Eigen::MatrixXcd m = conjugated_matrix(w.u, rep);
  Eigen::MatrixXcd mt = conjugated_matrix(w.uc, rep);
  return (mt.conjugate().cwiseProduct(m)).real();
}

PauliSum product_observable(const PauliString& op_a, const PauliString& op_b) {
  PauliSum s(op_a.n_qubits);
  s.add(1.0, pauli_mul(op_a, op_b));
  s.canonicalize();
  return s;
}

double cross_exact(const ExactWork& w, const CrossTerm& t) {
  auto coeffs = solve_coefficients(t.op_a, t.op_b);
  Eigen::VectorXd pd = diagonal_values(w, product_observable(t.op_a, t.op_b));
  double value = 0;
  for (std::size_t s = 0; s < w.p.size(); ++s)
    value += coeffs.a0 * w.p[s] * pd(static_cast<Eigen::Index>(s));
  for (int alpha = 0; alpha < 2; ++alpha)
    for (int beta = 0; beta < 2; ++beta) {
      auto c = build_clifford(t.op_a, t.op_b, alpha, beta);
      Eigen::MatrixXd k = mu_kernel(w, c.representation);
      value += coeffs.a[static_cast<std::size_t>(2 * alpha + beta)] / 2 *
               w.lam.dot(k * w.lam);
    }
  return value;
}

// ---- sampled-mode workspace ----

struct SampledWork {
  int n = 0;
  std::vector<Gate> bound;
  std::vector<Gate> bound_conj;
  std::vector<std::uint64_t> sigmas;
  std::unordered_map<std::uint64_t, Statevector> ua;
  std::unordered_map<std::uint64_t, Statevector> uca;
};

SampledWork make_sampled_work(const ForgedModel& m, const EstimatorMode& mode,
                              Rng* rng) {
  validate_model(m);
  if (rng == nullptr)
    throw ArgumentError("sampled mode needs a random number generator");
  if (mode.sample.n_sigma < 1 || mode.sample.shots < 1)
    throw ArgumentError("sample budgets must be positive");
  SampledWork w;
  w.n = m.partition.n_sub;
  w.bound = bind_params(m.circuit, m.omega);
  auto conj = conjugate_params(m.omega);
  w.bound_conj = bind_params(m.circuit, conj);
  w.sigmas.reserve(static_cast<std::size_t>(mode.sample.n_sigma));
  for (int i = 0; i < mode.sample.n_sigma; ++i)
    w.sigmas.push_back(m.arnn.sample(*rng));
  return w;
}

const Statevector& circuit_state(SampledWork& w, std::uint64_t sigma, bool conj) {
  auto& cache = conj ? w.uca : w.ua;
  auto it = cache.find(sigma);
  if (it != cache.end()) return it->second;
  Statevector v = basis_state(w.n, sigma);
  apply_circuit(conj ? w.bound_conj : w.bound, v);
  return cache.emplace(sigma, std::move(v)).first->second;
}

double diag_sampled(SampledWork& w, const PauliSum& obs) {
  double acc = 0;
  for (auto sigma : w.sigmas) acc += expectation(circuit_state(w, sigma, false), obs);
  return acc / static_cast<double>(w.sigmas.size());
}

// One outer sample's contribution to mu: draw sigma' from |w|^2 and weight
// by the amplitude ratio times the conjugate-circuit correction.
double mu_single_sigma(SampledWork& w, const ForgedModel& m, const PauliSum& rep,
                       std::uint64_t sigma, int shots, Rng& rng) {
  Statevector wv = circuit_state(w, sigma, false);
  Statevector wtv = circuit_state(w, sigma, true);
  wv = apply_sum(rep, wv);
  wtv = apply_sum(rep, wtv);
  apply_circuit_adjoint(w.bound, wv);
  apply_circuit_adjoint(w.bound_conj, wtv);

  std::vector<double> prob(wv.size());
  for (std::size_t i = 0; i < wv.size(); ++i) prob[i] = std::norm(wv[i]);

  double acc = 0;
  for (int shot = 0; shot < shots; ++shot) {
    std::uint64_t sp = sample_index(prob, rng);
    double correction =
        std::real(wtv[sp] * std::conj(wv[sp])) / std::norm(wv[sp]);
    acc += m.arnn.lambda_ratio(sigma, sp) * correction;
  }
  return acc / shots;
}

double mu_sampled(SampledWork& w, const ForgedModel& m, const PauliSum& rep,
                  int shots, Rng& rng) {
  double acc = 0;
  for (auto sigma : w.sigmas) acc += mu_single_sigma(w, m, rep, sigma, shots, rng);
  return acc / static_cast<double>(w.sigmas.size());
}

double cross_sampled(SampledWork& w, const ForgedModel& m, const CrossTerm& t,
                     int shots, Rng& rng) {
  auto coeffs = solve_coefficients(t.op_a, t.op_b);
  double value = coeffs.a0 * diag_sampled(w, product_observable(t.op_a, t.op_b));
  for (int alpha = 0; alpha < 2; ++alpha)
    for (int beta = 0; beta < 2; ++beta) {
      auto c = build_clifford(t.op_a, t.op_b, alpha, beta);
      value += coeffs.a[static_cast<std::size_t>(2 * alpha + beta)] / 2 *
               mu_sampled(w, m, c.representation, shots, rng);
    }
  return value;
}

}  // namespace

CliffordOperator build_clifford(const PauliString& op_a, const PauliString& op_b,
                                int alpha, int beta) {
  require_pair(op_a, op_b);
  if ((alpha & ~1) || (beta & ~1)) throw ArgumentError("alpha, beta must be 0 or 1");
  double sa = alpha ? -0.5 : 0.5;
  double sb = beta ? -0.5 : 0.5;
  double sab = ((alpha + beta) % 2) ? 0.5 : -0.5;
  CliffordOperator c;
  c.op_a = op_a;
  c.op_b = op_b;
  c.alpha = alpha;
  c.beta = beta;
  c.representation = PauliSum(op_a.n_qubits);
  c.representation.add(0.5, PauliString::identity(op_a.n_qubits));
  c.representation.add(sa, op_a);
  c.representation.add(sb, op_b);
  c.representation.add(sab, pauli_mul(op_a, op_b));
  c.representation.canonicalize();
  return c;
}

std::vector<Gate> clifford_gate_sequence(const PauliString& op_a,
                                         const PauliString& op_b, int alpha,
                                         int beta) {
  require_pair(op_a, op_b);
  bool single_z_a = op_a.x == 0 && std::popcount(op_a.z) == 1;
  bool single_z_b = op_b.x == 0 && std::popcount(op_b.z) == 1;
  if (!single_z_a || !single_z_b)
    throw ArgumentError(
        "gate form only covers single-Z word pairs; use the 4-term "
        "representation instead");
  int p = std::countr_zero(op_a.z);
  int q = std::countr_zero(op_b.z);
  std::vector<Gate> gates;
  if (p == q) {
    if ((alpha + beta) % 2 == 1) return gates;
    if (alpha) gates.push_back({GateKind::X, p, -1, 0, -1});
    gates.push_back({GateKind::Phase, p, -1, -std::numbers::pi, -1});
    if (alpha) gates.push_back({GateKind::X, p, -1, 0, -1});
    return gates;
  }
  if (alpha) gates.push_back({GateKind::X, p, -1, 0, -1});
  if (beta) gates.push_back({GateKind::X, q, -1, 0, -1});
  gates.push_back({GateKind::CZ, p, q, 0, -1});
  if (beta) gates.push_back({GateKind::X, q, -1, 0, -1});
  if (alpha) gates.push_back({GateKind::X, p, -1, 0, -1});
  return gates;
}

DecompositionCoefficients solve_coefficients(const PauliString& op_a,
                                             const PauliString& op_b) {
  require_pair(op_a, op_b);
  std::uint64_t mask = op_a.x | op_a.z | op_b.x | op_b.z;
  if (mask == 0) mask = 1;
  int kept = std::popcount(mask);
  PauliString a = restrict_to(op_a, mask, kept);
  PauliString b = restrict_to(op_b, mask, kept);

  Eigen::MatrixXcd da = dense_matrix(a);
  Eigen::MatrixXcd db = dense_matrix(b);
  const Eigen::Index sub = da.rows();
  Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(sub, sub);
  Eigen::MatrixXcd ab = da * db;

  // embed(x on A, y on B) = kron(y, x): register A is the low index bits.
  auto embed = [](const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& y) {
    return Eigen::MatrixXcd(Eigen::kroneckerProduct(y, x));
  };

  Eigen::MatrixXcd target = embed(da, db) + embed(db, da);
  std::vector<Eigen::MatrixXcd> cols;
  cols.push_back(embed(ab, eye) + embed(eye, ab));
  for (int alpha = 0; alpha < 2; ++alpha)
    for (int beta = 0; beta < 2; ++beta) {
      Eigen::MatrixXcd c = 0.5 * (eye + (alpha ? -1.0 : 1.0) * da +
                                  (beta ? -1.0 : 1.0) * db +
                                  ((alpha + beta) % 2 ? 1.0 : -1.0) * ab);
      cols.push_back(embed(c.conjugate(), c));
    }

  const Eigen::Index entries = target.size();
  Eigen::MatrixXd lhs(2 * entries, 5);
  Eigen::VectorXd rhs(2 * entries);
  for (int j = 0; j < 5; ++j) {
    Eigen::Map<const Eigen::VectorXcd> v(cols[static_cast<std::size_t>(j)].data(),
                                         entries);
    lhs.col(j).head(entries) = v.real();
    lhs.col(j).tail(entries) = v.imag();
  }
  Eigen::Map<const Eigen::VectorXcd> tv(target.data(), entries);
  rhs.head(entries) = tv.real();
  rhs.tail(entries) = tv.imag();

  Eigen::VectorXd x =
      lhs.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(rhs);

  DecompositionCoefficients out;
  out.a0 = x(0);
  for (int k = 0; k < 4; ++k) out.a[static_cast<std::size_t>(k)] = x(k + 1);
  out.residual = (lhs * x - rhs).cwiseAbs().maxCoeff();
  if (out.residual >= kSolveTolerance)
    throw DecompositionError("operator pair (" + op_a.text() + ", " +
                             op_b.text() + ") has no valid decomposition");
  for (double v : {out.a0, out.a[0], out.a[1], out.a[2], out.a[3]})
    if (std::abs(v) > 1.0 + 1e-12)
      throw DecompositionError("decomposition coefficient out of range");
  return out;
}

ForgedModel make_model(const HamiltonianPartition& partition, int n_layers,
                       int hidden_width, std::uint64_t seed) {
  validate_partition(partition);
  ForgedModel m{ArnnModel(partition.n_sub, hidden_width, seed),
                build_ansatz(partition.n_sub, n_layers),
                {},
                partition};
  Rng rng = task_rng(seed, 1);
  m.omega.resize(static_cast<std::size_t>(m.circuit.n_params()));
  for (auto& w : m.omega) w = 0.02 * uniform01(rng) - 0.01;
  return m;
}

void validate_model(const ForgedModel& m) {
  if (m.arnn.n_bits() != m.circuit.n_qubits ||
      m.circuit.n_qubits != m.partition.n_sub)
    throw ArgumentError("model widths are inconsistent");
  if (static_cast<int>(m.omega.size()) != m.circuit.n_params())
    throw ArgumentError("circuit parameter count mismatch");
}

double estimate_diagonal(const ForgedModel& m, const PauliSum& obs,
                         const EstimatorMode& mode, Rng* rng) {
  if (obs.n_qubits != m.partition.n_sub)
    throw ArgumentError("observable width does not match the subsystem");
  if (mode.kind == EstimatorMode::Kind::Exact) {
    ExactWork w = make_exact_work(m);
    Eigen::VectorXd d = diagonal_values(w, obs);
    double e = 0;
    for (std::size_t s = 0; s < w.p.size(); ++s)
      e += w.p[s] * d(static_cast<Eigen::Index>(s));
    return e;
  }
  SampledWork w = make_sampled_work(m, mode, rng);
  return diag_sampled(w, obs);
}

double estimate_mu_alpha_beta(const ForgedModel& m, const CliffordOperator& c,
                              const EstimatorMode& mode, Rng* rng) {
  if (c.representation.n_qubits != m.partition.n_sub)
    throw ArgumentError("operator width does not match the subsystem");
  if (mode.kind == EstimatorMode::Kind::Exact) {
    ExactWork w = make_exact_work(m);
    Eigen::MatrixXd k = mu_kernel(w, c.representation);
    return w.lam.dot(k * w.lam);
  }
  SampledWork w = make_sampled_work(m, mode, rng);
  return mu_sampled(w, m, c.representation, mode.sample.shots, *rng);
}

double estimate_cross(const ForgedModel& m, const CrossTerm& t,
                      const EstimatorMode& mode, Rng* rng) {
  if (mode.kind == EstimatorMode::Kind::Exact) {
    ExactWork w = make_exact_work(m);
    return cross_exact(w, t);
  }
  SampledWork w = make_sampled_work(m, mode, rng);
  return cross_sampled(w, m, t, mode.sample.shots, *rng);
}

ExactEnergyParts exact_energy_parts(const ForgedModel& m) {
  validate_partition(m.partition);
  ExactWork w = make_exact_work(m);
  const Eigen::Index dim = w.u.cols();
  ExactEnergyParts parts;
  parts.local = 2 * diagonal_values(w, m.partition.h_a);
  parts.kernel = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& t : m.partition.cross) {
    double weight = t.multiplicity * t.coefficient;
    auto coeffs = solve_coefficients(t.op_a, t.op_b);
    parts.local +=
        weight * coeffs.a0 * diagonal_values(w, product_observable(t.op_a, t.op_b));
    for (int alpha = 0; alpha < 2; ++alpha)
      for (int beta = 0; beta < 2; ++beta) {
        auto c = build_clifford(t.op_a, t.op_b, alpha, beta);
        parts.kernel += weight *
                        coeffs.a[static_cast<std::size_t>(2 * alpha + beta)] / 2 *
                        mu_kernel(w, c.representation);
      }
  }
  return parts;
}

ConditionalAmplitudes conditional_amplitudes(const ForgedModel& m,
                                             const PauliSum& representation,
                                             std::uint64_t sigma) {
  validate_model(m);
  ConditionalAmplitudes out;
  out.w = basis_state(m.partition.n_sub, sigma);
  auto bound = bind_params(m.circuit, m.omega);
  apply_circuit(bound, out.w);
  out.w = apply_sum(representation, out.w);
  apply_circuit_adjoint(bound, out.w);

  out.w_conj = basis_state(m.partition.n_sub, sigma);
  auto conj = conjugate_params(m.omega);
  auto bound_conj = bind_params(m.circuit, conj);
  apply_circuit(bound_conj, out.w_conj);
  out.w_conj = apply_sum(representation, out.w_conj);
  apply_circuit_adjoint(bound_conj, out.w_conj);
  return out;
}

double energy(const ForgedModel& m, const EstimatorMode& mode, Rng* rng) {
  validate_partition(m.partition);
  if (mode.kind == EstimatorMode::Kind::Exact) {
    ExactEnergyParts parts = exact_energy_parts(m);
    auto p = m.arnn.enumerate_probs();
    Eigen::VectorXd lam(static_cast<Eigen::Index>(p.size()));
    double e = 0;
    for (std::size_t s = 0; s < p.size(); ++s) {
      e += p[s] * parts.local(static_cast<Eigen::Index>(s));
      lam(static_cast<Eigen::Index>(s)) = std::sqrt(p[s]);
    }
    return e + lam.dot(parts.kernel * lam);
  }
  // One sigma sample set shared by every term of the energy.
  SampledWork w = make_sampled_work(m, mode, rng);
  double e = 2 * diag_sampled(w, m.partition.h_a);
  for (const auto& t : m.partition.cross)
    e += t.multiplicity * t.coefficient *
         cross_sampled(w, m, t, mode.sample.shots, *rng);
  return e;
}

Eigen::MatrixXd correlators(const ForgedModel& m, const EstimatorMode& mode,
                            Rng* rng) {
  validate_model(m);
  const int n = m.partition.n_sub;
  const int total = 2 * n;
  Eigen::MatrixXd c = Eigen::MatrixXd::Identity(total, total);

  auto local_zz = [&](int i, int j) {
    PauliSum s(n);
    PauliString w = PauliString::identity(n);
    w.z = (std::uint64_t{1} << i) | (std::uint64_t{1} << j);
    s.add(1.0, w);
    s.canonicalize();
    return s;
  };

  for (int i = 0; i < total; ++i)
    for (int j = i + 1; j < total; ++j) {
      double v;
      if (j < n) {
        v = estimate_diagonal(m, local_zz(i, j), mode, rng);
      } else if (i >= n) {
        v = estimate_diagonal(m, local_zz(i - n, j - n), mode, rng);
      } else {
        CrossTerm t{1.0, PauliString::single(n, i, 'Z'),
                    PauliString::single(n, j - n, 'Z'), 1};
        v = estimate_cross(m, t, mode, rng);
      }
      c(i, j) = c(j, i) = v;
    }
  return c;
}

}  // namespace forge
