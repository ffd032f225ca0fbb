#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "forge/errors.hpp"
#include "forge/oracle.hpp"
#include "forge/trainer.hpp"

using namespace forge;

namespace {

ForgedModel random_model(const HamiltonianPartition& part, int layers,
                         std::mt19937_64& rng) {
  auto m = make_model(part, layers, 8, rng());
  std::uniform_real_distribution<double> wide(-1.0, 1.0);
  std::vector<double> theta(static_cast<std::size_t>(m.arnn.n_params()));
  for (auto& v : theta) v = wide(rng);
  m.arnn.set_params(theta);
  for (auto& v : m.omega) v = 3.0 * wide(rng);
  return m;
}

std::vector<double> fd_theta(const ForgedModel& m, double h) {
  std::vector<double> grad(static_cast<std::size_t>(m.arnn.n_params()));
  auto base = m.arnn.params();
  std::vector<double> theta(base.begin(), base.end());
  for (std::size_t k = 0; k < grad.size(); ++k) {
    ForgedModel work = m;
    theta[k] = base[k] + h;
    work.arnn.set_params(theta);
    double plus = energy(work, EstimatorMode::exact());
    theta[k] = base[k] - h;
    work.arnn.set_params(theta);
    double minus = energy(work, EstimatorMode::exact());
    theta[k] = base[k];
    grad[k] = (plus - minus) / (2 * h);
  }
  return grad;
}

std::vector<double> fd_omega(const ForgedModel& m, double h) {
  std::vector<double> grad(m.omega.size());
  for (std::size_t k = 0; k < grad.size(); ++k) {
    ForgedModel work = m;
    work.omega[k] = m.omega[k] + h;
    double plus = energy(work, EstimatorMode::exact());
    work.omega[k] = m.omega[k] - h;
    double minus = energy(work, EstimatorMode::exact());
    grad[k] = (plus - minus) / (2 * h);
  }
  return grad;
}

double max_rel_err(const std::vector<double>& got,
                   const std::vector<double>& want) {
  REQUIRE(got.size() == want.size());
  double scale = 1e-8;
  for (double w : want) scale = std::max(scale, std::abs(w));
  double worst = 0;
  for (std::size_t k = 0; k < got.size(); ++k)
    worst = std::max(worst, std::abs(got[k] - want[k]) / scale);
  return worst;
}

HamiltonianPartition transverse_only(int n_sub) {
  HamiltonianPartition part;
  part.name = "x-field-only";
  part.n_sub = n_sub;
  part.h_a = PauliSum(n_sub);
  for (int i = 0; i < n_sub; ++i)
    part.h_a.add(1.0, PauliString::single(n_sub, i, 'X'));
  part.h_a.canonicalize();
  part.h_b = part.h_a;
  return part;
}

}  // namespace

TEST_CASE("theta gradient matches finite differences") {
  std::mt19937_64 rng(41);
  for (const auto& part : {build_tfim_1d(8, 1.0), build_tfim_2d(2, 4, 0.7),
                           build_tv_2x2(1.0, 1.0)}) {
    for (int trial = 0; trial < 3; ++trial) {
      auto m = random_model(part, 2, rng);
      auto got = grad_theta(m, EstimatorMode::exact());
      auto want = fd_theta(m, 1e-5);
      CHECK(max_rel_err(got, want) < 1e-4);
    }
  }
}

TEST_CASE("omega gradient matches finite differences") {
  std::mt19937_64 rng(43);
  for (const auto& part : {build_tfim_1d(8, 1.0), build_tfim_2d(2, 4, 0.7),
                           build_tv_2x2(1.0, 1.0)}) {
    for (int trial = 0; trial < 3; ++trial) {
      auto m = random_model(part, 2, rng);
      auto got = grad_omega(m, EstimatorMode::exact());
      auto want = fd_omega(m, 1e-5);
      CHECK(max_rel_err(got, want) < 1e-4);
    }
  }
}

TEST_CASE("score term vanishes when the local energy is flat") {
  std::mt19937_64 rng(47);
  auto part = transverse_only(3);
  auto m = random_model(part, 0, rng);
  auto g = grad_theta(m, EstimatorMode::exact());
  for (double v : g) CHECK(std::abs(v) < 1e-13);
}

TEST_CASE("baseline is neutral under enumeration") {
  std::mt19937_64 rng(53);
  auto m = random_model(build_tfim_1d(8, 1.0), 2, rng);
  auto on = grad_theta(m, EstimatorMode::exact(), true);
  auto off = grad_theta(m, EstimatorMode::exact(), false);
  for (std::size_t k = 0; k < on.size(); ++k)
    CHECK(std::abs(on[k] - off[k]) < 1e-12);
}

TEST_CASE("zero-depth circuit has an empty omega gradient") {
  auto m = make_model(build_tfim_1d(4, 1.0), 0, 8, 1);
  CHECK(grad_omega(m, EstimatorMode::exact()).empty());
}

TEST_CASE("sampled theta gradient agrees with exact on average") {
  std::mt19937_64 rng(59);
  auto m = random_model(build_tfim_1d(4, 1.0), 1, rng);
  auto exact = grad_theta(m, EstimatorMode::exact());

  const int runs = 40;
  auto mode = EstimatorMode::sampled(128, 16);
  std::vector<double> mean(exact.size(), 0.0), m2(exact.size(), 0.0);
  for (int r = 0; r < runs; ++r) {
    Rng g(4000 + static_cast<std::uint64_t>(r));
    auto s = grad_theta(m, mode, true, &g);
    for (std::size_t k = 0; k < s.size(); ++k) {
      double delta = s[k] - mean[k];
      mean[k] += delta / (r + 1);
      m2[k] += delta * (s[k] - mean[k]);
    }
  }
  for (std::size_t k = 0; k < exact.size(); ++k) {
    double se = std::sqrt(m2[k] / (runs - 1) / runs);
    CHECK(std::abs(mean[k] - exact[k]) < 5 * se + 1e-10);
  }
}

TEST_CASE("sampled omega gradient agrees with exact on average") {
  std::mt19937_64 rng(61);
  auto m = random_model(build_tfim_1d(4, 1.0), 1, rng);
  auto exact = grad_omega(m, EstimatorMode::exact());

  const int runs = 24;
  auto mode = EstimatorMode::sampled(128, 32);
  std::vector<double> mean(exact.size(), 0.0), m2(exact.size(), 0.0);
  for (int r = 0; r < runs; ++r) {
    Rng g(6000 + static_cast<std::uint64_t>(r));
    auto s = grad_omega(m, mode, &g);
    for (std::size_t k = 0; k < s.size(); ++k) {
      double delta = s[k] - mean[k];
      mean[k] += delta / (r + 1);
      m2[k] += delta * (s[k] - mean[k]);
    }
  }
  for (std::size_t k = 0; k < exact.size(); ++k) {
    double se = std::sqrt(m2[k] / (runs - 1) / runs);
    CHECK(std::abs(mean[k] - exact[k]) < 5 * se + 1e-10);
  }
}

TEST_CASE("spsa converges on a quadratic objective") {
  Rng rng(71);
  std::vector<double> target(10);
  for (auto& v : target) v = 2 * uniform01(rng) - 1;
  std::vector<double> x(10, 0.0);
  auto objective = [&](std::span<const double> w) {
    double s = 0;
    for (std::size_t i = 0; i < w.size(); ++i)
      s += (w[i] - target[i]) * (w[i] - target[i]);
    return s;
  };
  SpsaGains gains;
  for (int k = 0; k < 2000; ++k) spsa_step(x, objective, gains, rng);
  double dist = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    dist += (x[i] - target[i]) * (x[i] - target[i]);
  CHECK(std::sqrt(dist) < 0.1);
}

TEST_CASE("spsa perturbations are symmetric Rademacher") {
  Rng rng(73);
  std::vector<double> x(6, 0.5);
  std::vector<std::vector<double>> probes;
  auto objective = [&](std::span<const double> w) {
    probes.emplace_back(w.begin(), w.end());
    return 0.0;
  };
  SpsaGains gains;
  for (int k = 0; k < 20; ++k) {
    probes.clear();
    std::vector<double> before = x;
    spsa_step(x, objective, gains, rng);
    REQUIRE(probes.size() == 2);
    double mag = std::abs(probes[0][0] - before[0]);
    CHECK(mag > 0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      CHECK(std::abs(std::abs(probes[0][i] - before[i]) - mag) < 1e-15);
      CHECK(probes[0][i] + probes[1][i] ==
            doctest::Approx(2 * before[i]).epsilon(1e-12));
    }
    CHECK(x == before);
  }
}

TEST_CASE("spsa phase-1 keeps most of the gradient-path improvement") {
  // Fresh-model omega sits on a symmetry plateau where neither path can
  // see a slope, so compare from a generic randomized starting point.
  std::mt19937_64 seeder(21);
  auto part = build_tfim_1d(4, 1.0);
  auto m = random_model(part, 2, seeder);
  double e0 = energy(m, EstimatorMode::exact());

  TrainConfig grad_cfg;
  grad_cfg.epochs = 100;
  grad_cfg.phase1_epochs = 100;
  grad_cfg.seed = 21;
  auto grad_run = train(m, grad_cfg);
  double e_grad = energy(grad_run.model, EstimatorMode::exact());

  TrainConfig spsa_cfg = grad_cfg;
  spsa_cfg.optimizer = Optimizer::Spsa;
  auto spsa_run = train(m, spsa_cfg);
  double e_spsa = energy(spsa_run.model, EstimatorMode::exact());

  double gap_grad = e0 - e_grad;
  double gap_spsa = e0 - e_spsa;
  REQUIRE(gap_grad > 0);
  CHECK(gap_spsa >= 0.9 * gap_grad);
}

TEST_CASE("phase 1 leaves the network parameters untouched") {
  auto m = make_model(build_tfim_1d(4, 1.0), 1, 8, 31);
  std::vector<double> theta0(m.arnn.params().begin(), m.arnn.params().end());
  TrainConfig cfg;
  cfg.epochs = 10;
  cfg.phase1_epochs = 10;
  cfg.seed = 31;
  auto r = train(m, cfg);
  auto theta1 = r.model.arnn.params();
  REQUIRE(theta1.size() == theta0.size());
  for (std::size_t k = 0; k < theta0.size(); ++k)
    CHECK(theta1[k] == theta0[k]);
  CHECK(r.trace.size() == 10);
  for (const auto& rec : r.trace) CHECK(rec.grad_norm_theta == 0.0);
}

TEST_CASE("training is deterministic given the seed") {
  auto m = make_model(build_tfim_1d(4, 1.0), 1, 8, 37);
  TrainConfig cfg;
  cfg.epochs = 25;
  cfg.phase1_epochs = 5;
  cfg.seed = 37;
  auto r1 = train(m, cfg);
  auto r2 = train(m, cfg);
  REQUIRE(r1.trace.size() == r2.trace.size());
  for (std::size_t i = 0; i < r1.trace.size(); ++i) {
    CHECK(r1.trace[i].energy == r2.trace[i].energy);
    CHECK(r1.trace[i].grad_norm_theta == r2.trace[i].grad_norm_theta);
    CHECK(r1.trace[i].grad_norm_omega == r2.trace[i].grad_norm_omega);
    CHECK(r1.trace[i].epoch == static_cast<int>(i));
  }
  for (std::size_t k = 0; k < r1.model.omega.size(); ++k)
    CHECK(r1.model.omega[k] == r2.model.omega[k]);
}

TEST_CASE("trace energies replay as estimator energies of the live model") {
  auto m = make_model(build_tfim_1d(4, 1.0), 1, 8, 41);
  TrainConfig cfg;
  cfg.seed = 41;
  cfg.phase1_epochs = 2;

  cfg.epochs = 3;
  auto r3 = train(m, cfg);
  cfg.epochs = 6;
  auto r6 = train(m, cfg);
  REQUIRE(r6.trace.size() == 6);
  CHECK(r6.trace[0].energy == energy(m, EstimatorMode::exact()));
  CHECK(r6.trace[3].energy == energy(r3.model, EstimatorMode::exact()));
}

TEST_CASE("resume continues the epoch numbering") {
  auto m = make_model(build_tfim_1d(4, 1.0), 1, 8, 43);
  TrainConfig cfg;
  cfg.seed = 43;
  cfg.phase1_epochs = 2;
  cfg.epochs = 4;
  auto first = train(m, cfg);

  Checkpoint c;
  auto th = first.model.arnn.params();
  c.theta.assign(th.begin(), th.end());
  c.omega = first.model.omega;
  c.epoch = 3;

  cfg.epochs = 7;
  auto second = train(m, cfg, &c);
  REQUIRE(second.trace.size() == 3);
  CHECK(second.trace.front().epoch == 4);
  CHECK(second.trace.back().epoch == 6);

  Checkpoint bad = c;
  bad.omega.push_back(0.0);
  CHECK_THROWS_AS(train(m, cfg, &bad), ArgumentError);
}

TEST_CASE("early stop fires once the energy window is flat") {
  auto part = transverse_only(2);
  auto m = make_model(part, 0, 8, 47);
  TrainConfig cfg;
  cfg.epochs = 400;
  cfg.phase1_epochs = 0;
  cfg.seed = 47;
  auto r = train(m, cfg);
  CHECK(r.stopped_early);
  CHECK(r.trace.size() == 50);
}

TEST_CASE("non-finite parameters raise a training error with a checkpoint") {
  auto m = make_model(build_tfim_1d(4, 1.0), 1, 8, 53);
  Checkpoint poisoned;
  auto th = m.arnn.params();
  poisoned.theta.assign(th.begin(), th.end());
  poisoned.theta[0] = std::nan("");
  poisoned.omega = m.omega;
  poisoned.epoch = 9;

  TrainConfig cfg;
  cfg.epochs = 20;
  cfg.phase1_epochs = 0;
  cfg.seed = 53;
  try {
    train(m, cfg, &poisoned);
    FAIL("expected a training error");
  } catch (const TrainingError& err) {
    CHECK(err.last_checkpoint.epoch == 9);
    CHECK(err.last_checkpoint.omega.size() == m.omega.size());
  }
}

TEST_CASE("config and argument validation") {
  TrainConfig cfg;
  cfg.phase1_epochs = cfg.epochs + 1;
  CHECK_THROWS_AS(validate_config(cfg), ArgumentError);
  cfg = TrainConfig{};
  cfg.lr_omega = 0;
  CHECK_THROWS_AS(validate_config(cfg), ArgumentError);
  cfg = TrainConfig{};
  cfg.epochs = -1;
  CHECK_THROWS_AS(validate_config(cfg), ArgumentError);

  auto m = make_model(build_tfim_1d(4, 1.0), 1, 8, 1);
  CHECK_THROWS_AS(grad_theta(m, EstimatorMode::sampled(64, 16)), ArgumentError);
  CHECK_THROWS_AS(grad_omega(m, EstimatorMode::sampled(64, 16)), ArgumentError);

  CHECK(parse_optimizer("adam") == Optimizer::Adam);
  CHECK(parse_optimizer("spsa") == Optimizer::Spsa);
  CHECK(optimizer_name(Optimizer::Sgd) == "sgd");
  CHECK_THROWS_AS(parse_optimizer("newton"), ArgumentError);
}
