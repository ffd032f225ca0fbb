#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>

#include "forge/errors.hpp"
#include "forge/oracle.hpp"
#include "test_util.hpp"

using namespace forge;

namespace {

Eigen::MatrixXcd random_unitary(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = cplx(g(rng), g(rng));
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(m);
  return qr.householderQ();
}

std::vector<double> random_simplex_sqrt(int dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.01, 1.0);
  std::vector<double> p(static_cast<std::size_t>(dim));
  double total = 0;
  for (auto& x : p) {
    x = u(rng);
    total += x;
  }
  for (auto& x : p) x = std::sqrt(x / total);
  return p;
}

}  // namespace

TEST_CASE("ground state of the classical ring") {
  auto g = exact_ground_state(build_tfim_1d(4, 0.0));
  CHECK(g.energy == doctest::Approx(-4.0).epsilon(1e-12));
}

TEST_CASE("ground state satisfies the eigenvalue equation") {
  for (const auto& p : {build_tfim_1d(6, 1.0), build_tv_2x2(1.0, 1.0)}) {
    auto h = dense_hamiltonian(p);
    auto g = exact_ground_state(p);
    CHECK((h * g.state - g.energy * g.state).norm() < 1e-10);
    CHECK(std::abs(g.state.norm() - 1.0) < 1e-12);
    double rayleigh = std::real(g.state.dot(h * g.state));
    CHECK(rayleigh == doctest::Approx(g.energy).epsilon(1e-12));
  }
}

TEST_CASE("4-spin ring at the critical field matches the known energy") {
  auto g = exact_ground_state(build_tfim_1d(4, 1.0));
  CHECK(g.energy == doctest::Approx(-5.226251859505506).epsilon(1e-10));
}

TEST_CASE("reconstruction from identity and flip unitaries") {
  Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(2, 2);
  auto psi = reconstruct_forged_state(eye, {1.0, 0.0});
  CHECK(std::abs(psi(0) - cplx{1, 0}) < 1e-14);

  double r = 1 / std::sqrt(2.0);
  psi = reconstruct_forged_state(eye, {r, r});
  CHECK(std::abs(psi(0) - cplx{r, 0}) < 1e-14);
  CHECK(std::abs(psi(3) - cplx{r, 0}) < 1e-14);
  CHECK(std::abs(psi(1)) < 1e-14);

  Eigen::MatrixXcd flip(2, 2);
  flip << 0, 1, 1, 0;
  psi = reconstruct_forged_state(flip, {0.6, 0.8});
  CHECK(std::abs(psi(3) - cplx{0.6, 0}) < 1e-14);
  CHECK(std::abs(psi(0) - cplx{0.8, 0}) < 1e-14);
}

TEST_CASE("reconstructed states are normalized and register symmetric") {
  std::mt19937_64 rng(3);
  for (int n_sub : {1, 2, 3}) {
    int sub = 1 << n_sub;
    auto u = random_unitary(sub, rng);
    auto lam = random_simplex_sqrt(sub, rng);
    auto psi = reconstruct_forged_state(u, lam);
    CHECK(std::abs(psi.norm() - 1.0) < 1e-12);
    for (int a = 0; a < sub; ++a)
      for (int b = 0; b < sub; ++b)
        CHECK(std::abs(psi(a + b * sub) - psi(b + a * sub)) < 1e-12);
  }
  CHECK_THROWS_AS(
      reconstruct_forged_state(Eigen::MatrixXcd::Identity(2, 2), {1.0}),
      ArgumentError);
}

TEST_CASE("Schmidt values recover the amplitude multiset") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 8; ++trial) {
    int n_sub = 1 + static_cast<int>(rng() % 3);
    int sub = 1 << n_sub;
    auto u = random_unitary(sub, rng);
    auto lam = random_simplex_sqrt(sub, rng);
    auto psi = reconstruct_forged_state(u, lam);

    auto sv = schmidt_values(psi, n_sub);
    auto want = lam;
    std::sort(want.begin(), want.end(), std::greater<>());
    REQUIRE(sv.size() == want.size());
    for (std::size_t k = 0; k < sv.size(); ++k)
      CHECK(sv[k] == doctest::Approx(want[k]).epsilon(1e-10));
  }
}

TEST_CASE("Schmidt values of product and Bell states") {
  Eigen::VectorXcd product = Eigen::VectorXcd::Zero(4);
  product(0) = 1;
  auto sv = schmidt_values(product, 1);
  CHECK(sv[0] == doctest::Approx(1.0));
  CHECK(sv[1] == doctest::Approx(0.0));

  Eigen::VectorXcd bell = Eigen::VectorXcd::Zero(4);
  bell(0) = bell(3) = 1 / std::sqrt(2.0);
  sv = schmidt_values(bell, 1);
  CHECK(sv[0] == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(sv[1] == doctest::Approx(1 / std::sqrt(2.0)));
}

TEST_CASE("pair correlators against dense word expectations") {
  std::mt19937_64 rng(11);
  int n = 4;
  auto state_vec = testutil::random_state(n, rng);
  Eigen::VectorXcd psi =
      Eigen::Map<const Eigen::VectorXcd>(state_vec.data(), 16);

  auto c = exact_zz_correlators(psi, n);
  for (int i = 0; i < n; ++i) {
    CHECK(c(i, i) == doctest::Approx(1.0));
    for (int j = i + 1; j < n; ++j) {
      std::string w(static_cast<std::size_t>(n), 'I');
      w[static_cast<std::size_t>(i)] = 'Z';
      w[static_cast<std::size_t>(j)] = 'Z';
      double want = std::real(psi.dot(testutil::word_dense(w) * psi));
      CHECK(c(i, j) == doctest::Approx(want).epsilon(1e-12));
      CHECK(c(j, i) == doctest::Approx(c(i, j)));
    }
  }

  // GHZ has all pair correlators equal to one.
  Eigen::VectorXcd ghz = Eigen::VectorXcd::Zero(16);
  ghz(0) = ghz(15) = 1 / std::sqrt(2.0);
  auto cg = exact_zz_correlators(ghz, 4);
  CHECK((cg.array() - 1.0).abs().maxCoeff() < 1e-12);
}
