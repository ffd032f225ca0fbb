#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "forge/errors.hpp"
#include "forge/pauli.hpp"
#include "test_util.hpp"

using namespace forge;
using testutil::max_abs_diff;
using testutil::word_dense;

TEST_CASE("single-qubit products carry exact phases") {
  auto X = PauliString::from_text("X");
  auto Y = PauliString::from_text("Y");
  auto Z = PauliString::from_text("Z");

  auto xy = pauli_mul(X, Y);
  CHECK(xy.text() == "iZ");
  auto yx = pauli_mul(Y, X);
  CHECK(yx.text() == "-iZ");
  auto zz = pauli_mul(Z, Z);
  CHECK(zz.text() == "I");
  auto zx = pauli_mul(Z, X);
  CHECK(zx.text() == "iY");
  auto xz = pauli_mul(X, Z);
  CHECK(xz.text() == "-iY");
}

TEST_CASE("two-qubit product with no cross-qubit phase") {
  auto p = pauli_mul(PauliString::from_text("XZ"), PauliString::from_text("XI"));
  CHECK(p.text() == "IZ");
}

TEST_CASE("size mismatch rejected") {
  CHECK_THROWS_AS(pauli_mul(PauliString::from_text("X"), PauliString::from_text("XX")),
                  ArgumentError);
  CHECK_THROWS_AS(commutes(PauliString::from_text("X"), PauliString::from_text("XX")),
                  ArgumentError);
}

TEST_CASE("text round-trip including phases") {
  for (const char* t : {"ZIIZ", "-iXY", "+XX", "Y", "-YZ", "iIX"}) {
    auto p = PauliString::from_text(t);
    std::string want = t;
    if (want[0] == '+') want = want.substr(1);
    CHECK(p.text() == want);
  }
}

TEST_CASE("commutation basics") {
  CHECK_FALSE(commutes(PauliString::from_text("X"), PauliString::from_text("Z")));
  CHECK(commutes(PauliString::from_text("XI"), PauliString::from_text("IZ")));
  CHECK(commutes(PauliString::from_text("XZ"), PauliString::from_text("XI")));
}

TEST_CASE("apply_pauli basis actions") {
  std::vector<cplx> v0 = {1, 0}, v1 = {0, 1};
  auto X = PauliString::from_text("X");
  auto Y = PauliString::from_text("Y");
  auto Z = PauliString::from_text("Z");
  CHECK(apply_pauli(X, v0)[1] == cplx{1, 0});
  CHECK(apply_pauli(Z, v1)[1] == cplx{-1, 0});
  CHECK(apply_pauli(Y, v0)[1] == cplx{0, 1});
  CHECK(apply_pauli(Y, v1)[0] == cplx{0, -1});
}

TEST_CASE("dense matrices of simple words") {
  CHECK(max_abs_diff(dense_matrix(PauliString::from_text("I")),
                     Eigen::MatrixXcd::Identity(2, 2)) == 0.0);

  Eigen::VectorXcd d(4);
  d << 1, -1, -1, 1;
  CHECK(max_abs_diff(dense_matrix(PauliString::from_text("ZZ")),
                     d.asDiagonal().toDenseMatrix()) == 0.0);
}

TEST_CASE("group closure against dense products") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    int n = 1 + static_cast<int>(rng() % 6);
    auto p1 = PauliString::from_text(testutil::random_word_text(n, rng));
    auto p2 = PauliString::from_text(testutil::random_word_text(n, rng));
    p1.phase_k = static_cast<int>(rng() % 4);
    p2.phase_k = static_cast<int>(rng() % 4);
    auto prod = pauli_mul(p1, p2);
    CHECK(max_abs_diff(dense_matrix(prod), dense_matrix(p1) * dense_matrix(p2)) < 1e-12);
  }
}

TEST_CASE("commutes agrees with dense commutator") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    int n = 1 + static_cast<int>(rng() % 4);
    auto p1 = PauliString::from_text(testutil::random_word_text(n, rng));
    auto p2 = PauliString::from_text(testutil::random_word_text(n, rng));
    Eigen::MatrixXcd m1 = dense_matrix(p1), m2 = dense_matrix(p2);
    double comm = (m1 * m2 - m2 * m1).cwiseAbs().maxCoeff();
    CHECK(commutes(p1, p2) == (comm < 1e-12));
  }
}

TEST_CASE("apply_pauli equals dense action on random states") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    int n = 1 + static_cast<int>(rng() % 8);
    auto text = testutil::random_word_text(n, rng);
    auto p = PauliString::from_text(text);
    auto v = testutil::random_state(n, rng);
    auto got = apply_pauli(p, v);
    Eigen::Map<const Eigen::VectorXcd> vv(v.data(), v.size());
    Eigen::VectorXcd want = word_dense(text) * vv;
    double err = 0;
    for (std::size_t i = 0; i < got.size(); ++i)
      err = std::max(err, std::abs(got[i] - want(static_cast<Eigen::Index>(i))));
    CHECK(err < 1e-12);
  }
}

TEST_CASE("dense word matches independent Kronecker construction") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    int n = 1 + static_cast<int>(rng() % 5);
    auto text = testutil::random_word_text(n, rng);
    CHECK(max_abs_diff(dense_matrix(PauliString::from_text(text)), word_dense(text)) < 1e-12);
  }
}

TEST_CASE("PauliSum merges duplicates and drops zeros") {
  PauliSum s(2);
  s.add(0.5, PauliString::from_text("ZZ"));
  s.add(0.5, PauliString::from_text("ZZ"));
  s.add(0.3, PauliString::from_text("XI"));
  s.add(-0.3, PauliString::from_text("XI"));
  s.canonicalize();
  REQUIRE(s.terms.size() == 1);
  CHECK(s.terms[0].first == doctest::Approx(1.0));
  CHECK(s.terms[0].second.same_word(PauliString::from_text("ZZ")));

  PauliSum t(2);
  t.add(1.0, PauliString::from_text("ZZ"));
  t.canonicalize();
  CHECK(s == t);
}

TEST_CASE("PauliSum folds word signs and rejects imaginary phases") {
  PauliSum s(1);
  s.add(2.0, PauliString::from_text("-Y"));
  s.canonicalize();
  CHECK(s.terms[0].first == doctest::Approx(-2.0));
  CHECK(max_abs_diff(dense_matrix(s), -2.0 * word_dense("Y")) < 1e-12);

  PauliSum bad(1);
  CHECK_THROWS_AS(bad.add(1.0, PauliString::from_text("iZ")), ArgumentError);
}

TEST_CASE("ring Hamiltonian eigenvalue matches independent dense build") {
  // 4-qubit ZZ ring plus transverse field, assembled once through PauliSum
  // and once through explicit Kronecker products.
  PauliSum h(4);
  for (int i = 0; i < 4; ++i) {
    std::string zz = "IIII", xs = "IIII";
    zz[i] = 'Z';
    zz[(i + 1) % 4] = 'Z';
    xs[i] = 'X';
    h.add(1.0, PauliString::from_text(zz));
    h.add(1.0, PauliString::from_text(xs));
  }
  h.canonicalize();

  Eigen::MatrixXcd ref = Eigen::MatrixXcd::Zero(16, 16);
  for (int i = 0; i < 4; ++i) {
    std::string zz = "IIII", xs = "IIII";
    zz[i] = 'Z';
    zz[(i + 1) % 4] = 'Z';
    xs[i] = 'X';
    ref += word_dense(zz) + word_dense(xs);
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> a(dense_matrix(h)), b(ref);
  CHECK(a.eigenvalues()(0) == doctest::Approx(b.eigenvalues()(0)).epsilon(1e-12));
  CHECK(max_abs_diff(dense_matrix(h), ref) < 1e-12);
}

TEST_CASE("dense limit enforced") {
  CHECK_THROWS_AS(dense_matrix(PauliString::identity(13)), ResourceError);
}
