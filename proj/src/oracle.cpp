#include "forge/oracle.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include "forge/errors.hpp"

namespace forge {

namespace {

// op on one register, identity on the other; A is the low-bit factor.
Eigen::MatrixXcd embed(const Eigen::MatrixXcd& a_op, const Eigen::MatrixXcd& b_op) {
  return Eigen::kroneckerProduct(b_op, a_op);
}

}  // namespace

Eigen::MatrixXcd dense_hamiltonian(const HamiltonianPartition& p) {
  validate_partition(p);
  if (p.n_total() > kDenseQubitLimit)
    throw ResourceError("dense Hamiltonian too large");
  const Eigen::Index sub = Eigen::Index{1} << p.n_sub;
  const Eigen::Index dim = sub * sub;
  Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(sub, sub);
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  h += embed(dense_matrix(p.h_a), eye);
  h += embed(eye, dense_matrix(p.h_b));
  for (const auto& t : p.cross) {
    Eigen::MatrixXcd a = dense_matrix(t.op_a);
    Eigen::MatrixXcd b = dense_matrix(t.op_b);
    // A class of multiplicity 2 stands for the swap orbit {a x b, b x a}.
    h += t.coefficient * embed(a, b);
    if (t.multiplicity == 2) h += t.coefficient * embed(b, a);
  }
  return h;
}

GroundState exact_ground_state(const HamiltonianPartition& p) {
  Eigen::MatrixXcd h = dense_hamiltonian(p);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
  if (solver.info() != Eigen::Success)
    throw InternalError("eigensolver failed to converge");
  GroundState g;
  g.energy = solver.eigenvalues()(0);
  g.state = solver.eigenvectors().col(0);
  return g;
}

Eigen::VectorXcd reconstruct_forged_state(const Eigen::MatrixXcd& u,
                                          const std::vector<double>& lambdas) {
  const Eigen::Index sub = u.rows();
  if (u.cols() != sub || static_cast<Eigen::Index>(lambdas.size()) != sub)
    throw ArgumentError("amplitude count does not match the unitary");
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(sub * sub);
  for (Eigen::Index s = 0; s < sub; ++s) {
    if (lambdas[static_cast<std::size_t>(s)] == 0) continue;
    Eigen::VectorXcd col = u.col(s);
    for (Eigen::Index b = 0; b < sub; ++b)
      psi.segment(b * sub, sub) +=
          lambdas[static_cast<std::size_t>(s)] * col(b) * col;
  }
  return psi;
}

std::vector<double> schmidt_values(const Eigen::VectorXcd& state, int n_sub) {
  const Eigen::Index sub = Eigen::Index{1} << n_sub;
  if (state.size() != sub * sub)
    throw ArgumentError("state size does not match the partition");
  // M(a, b) = psi[a + (b << n_sub)]
  Eigen::MatrixXcd m = Eigen::Map<const Eigen::MatrixXcd>(state.data(), sub, sub);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  std::vector<double> out(static_cast<std::size_t>(sub));
  for (Eigen::Index k = 0; k < sub; ++k)
    out[static_cast<std::size_t>(k)] = svd.singularValues()(k);
  return out;
}

Eigen::MatrixXd exact_zz_correlators(const Eigen::VectorXcd& state, int n_total) {
  const Eigen::Index dim = Eigen::Index{1} << n_total;
  if (state.size() != dim) throw ArgumentError("state size mismatch");
  Eigen::MatrixXd c = Eigen::MatrixXd::Identity(n_total, n_total);
  for (int i = 0; i < n_total; ++i)
    for (int j = i + 1; j < n_total; ++j) {
      double v = 0;
      for (Eigen::Index g = 0; g < dim; ++g) {
        int si = (g >> i) & 1, sj = (g >> j) & 1;
        double sign = (si == sj) ? 1.0 : -1.0;
        v += sign * std::norm(state(g));
      }
      c(i, j) = c(j, i) = v;
    }
  return c;
}

}  // namespace forge
