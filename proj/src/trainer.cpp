#include "forge/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>

#include "forge/errors.hpp"
#include "forge/simulator.hpp"

namespace forge {

namespace {

constexpr int kStopWindow = 50;
constexpr double kStopTolerance = 1e-8;

double norm2(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

std::uint64_t draw_from_squared(const Statevector& w, Rng& rng) {
  double u = uniform01(rng);
  double acc = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    acc += std::norm(w[i]);
    if (u < acc) return i;
  }
  return w.size() - 1;
}

struct CrossPrep {
  double weight = 0;  // coefficient * multiplicity
  DecompositionCoefficients coeffs;
  PauliSum product;
  std::array<PauliSum, 4> reps;
};

std::vector<CrossPrep> prepare_cross(const HamiltonianPartition& part) {
  std::vector<CrossPrep> preps;
  preps.reserve(part.cross.size());
  for (const auto& t : part.cross) {
    CrossPrep cp;
    cp.weight = t.coefficient * t.multiplicity;
    cp.coeffs = solve_coefficients(t.op_a, t.op_b);
    cp.product = PauliSum(part.n_sub);
    cp.product.add(1.0, pauli_mul(t.op_a, t.op_b));
    cp.product.canonicalize();
    for (int alpha = 0; alpha < 2; ++alpha)
      for (int beta = 0; beta < 2; ++beta)
        cp.reps[static_cast<std::size_t>(2 * alpha + beta)] =
            build_clifford(t.op_a, t.op_b, alpha, beta).representation;
    preps.push_back(std::move(cp));
  }
  return preps;
}

std::vector<double> grad_theta_exact(const ForgedModel& m, bool baseline) {
  auto parts = exact_energy_parts(m);
  auto p = m.arnn.enumerate_probs();
  const auto dim = static_cast<Eigen::Index>(p.size());
  Eigen::VectorXd lam(dim);
  for (Eigen::Index s = 0; s < dim; ++s)
    lam(s) = std::sqrt(p[static_cast<std::size_t>(s)]);
  Eigen::VectorXd klam = parts.kernel * lam;

  // Score weight per configuration; the weights sum to the energy, so the
  // enumerated baseline subtraction cancels exactly.
  std::vector<double> g(p.size());
  double total = 0;
  for (Eigen::Index s = 0; s < dim; ++s) {
    g[static_cast<std::size_t>(s)] =
        p[static_cast<std::size_t>(s)] * parts.local(s) + lam(s) * klam(s);
    total += g[static_cast<std::size_t>(s)];
  }
  double b = baseline ? total : 0.0;

  std::vector<double> grad(static_cast<std::size_t>(m.arnn.n_params()), 0.0);
  for (std::uint64_t s = 0; s < p.size(); ++s) {
    auto score = m.arnn.grad_log_prob(s);
    double w = g[s] - p[s] * b;
    for (std::size_t k = 0; k < grad.size(); ++k) grad[k] += w * score[k];
  }
  return grad;
}

std::vector<double> grad_theta_sampled(const ForgedModel& m,
                                       const SampleConfig& sc, bool baseline,
                                       Rng& rng) {
  const int n = m.partition.n_sub;
  const auto np = static_cast<std::size_t>(m.arnn.n_params());
  auto bound = bind_params(m.circuit, m.omega);
  auto conj = conjugate_params(m.omega);
  auto bound_conj = bind_params(m.circuit, conj);
  auto preps = prepare_cross(m.partition);

  const auto n_sigma = static_cast<std::size_t>(sc.n_sigma);
  std::vector<double> direct(np, 0.0);
  std::vector<double> locals(n_sigma);
  std::vector<std::uint64_t> sigmas(n_sigma);
  const double pair_norm = 1.0 / (static_cast<double>(n_sigma) * sc.shots);

  for (std::size_t i = 0; i < n_sigma; ++i) {
    std::uint64_t sigma = m.arnn.sample(rng);
    sigmas[i] = sigma;
    Statevector v = basis_state(n, sigma);
    apply_circuit(bound, v);
    Statevector vt = basis_state(n, sigma);
    apply_circuit(bound_conj, vt);

    double local = 2.0 * expectation(v, m.partition.h_a);
    for (const auto& cp : preps)
      local += cp.weight * cp.coeffs.a0 * expectation(v, cp.product);

    for (const auto& cp : preps)
      for (std::size_t ab = 0; ab < 4; ++ab) {
        Statevector w = apply_sum(cp.reps[ab], v);
        apply_circuit_adjoint(bound, w);
        Statevector wt = apply_sum(cp.reps[ab], vt);
        apply_circuit_adjoint(bound_conj, wt);
        double term_weight = cp.weight * cp.coeffs.a[ab] / 2;
        double racc = 0;
        for (int shot = 0; shot < sc.shots; ++shot) {
          std::uint64_t sp = draw_from_squared(w, rng);
          double corr = std::real(wt[sp] * std::conj(w[sp])) / std::norm(w[sp]);
          racc += m.arnn.lambda_ratio(sigma, sp) * corr;
          auto dr = m.arnn.grad_lambda_ratio(sigma, sp);
          double scale = term_weight * corr * pair_norm;
          for (std::size_t k = 0; k < np; ++k) direct[k] += scale * dr[k];
        }
        local += term_weight * racc / sc.shots;
      }
    locals[i] = local;
  }

  double total = 0;
  for (double l : locals) total += l;

  std::vector<double> grad = direct;
  for (std::size_t i = 0; i < n_sigma; ++i) {
    double b = 0;
    if (baseline && n_sigma > 1)
      b = (total - locals[i]) / static_cast<double>(n_sigma - 1);
    auto score = m.arnn.grad_log_prob(sigmas[i]);
    double w = (locals[i] - b) / static_cast<double>(n_sigma);
    for (std::size_t k = 0; k < np; ++k) grad[k] += w * score[k];
  }
  return grad;
}

struct AdamState {
  std::vector<double> m1, m2;
  int t = 0;

  void init(std::size_t n) {
    m1.assign(n, 0.0);
    m2.assign(n, 0.0);
    t = 0;
  }

  void step(std::vector<double>& x, const std::vector<double>& g, double lr) {
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    ++t;
    double c1 = 1 - std::pow(b1, t);
    double c2 = 1 - std::pow(b2, t);
    for (std::size_t i = 0; i < x.size(); ++i) {
      m1[i] = b1 * m1[i] + (1 - b1) * g[i];
      m2[i] = b2 * m2[i] + (1 - b2) * g[i] * g[i];
      x[i] -= lr * (m1[i] / c1) / (std::sqrt(m2[i] / c2) + eps);
    }
  }
};

void sgd_step(std::vector<double>& x, const std::vector<double>& g, double lr) {
  for (std::size_t i = 0; i < x.size(); ++i) x[i] -= lr * g[i];
}

}  // namespace

Optimizer parse_optimizer(const std::string& name) {
  if (name == "adam") return Optimizer::Adam;
  if (name == "sgd") return Optimizer::Sgd;
  if (name == "spsa") return Optimizer::Spsa;
  throw ArgumentError("unknown optimizer '" + name + "' (adam, sgd, spsa)");
}

std::string optimizer_name(Optimizer opt) {
  switch (opt) {
    case Optimizer::Adam: return "adam";
    case Optimizer::Sgd: return "sgd";
    case Optimizer::Spsa: return "spsa";
  }
  throw InternalError("unhandled optimizer value");
}

void validate_config(const TrainConfig& cfg) {
  if (cfg.epochs < 0) throw ArgumentError("negative epoch count");
  if (cfg.phase1_epochs < 0) throw ArgumentError("negative phase-1 epoch count");
  if (cfg.phase1_epochs > cfg.epochs)
    throw ArgumentError("phase-1 epochs exceed the total epoch count");
  if (!(cfg.lr_omega > 0) || !(cfg.lr_theta > 0))
    throw ArgumentError("learning rates must be positive");
}

std::vector<double> grad_theta(const ForgedModel& m, const EstimatorMode& mode,
                               bool baseline, Rng* rng) {
  validate_model(m);
  if (mode.kind == EstimatorMode::Kind::Exact)
    return grad_theta_exact(m, baseline);
  if (rng == nullptr)
    throw ArgumentError("sampled mode needs a random number generator");
  if (mode.sample.n_sigma < 1 || mode.sample.shots < 1)
    throw ArgumentError("sample budgets must be positive");
  return grad_theta_sampled(m, mode.sample, baseline, *rng);
}

std::vector<double> grad_omega(const ForgedModel& m, const EstimatorMode& mode,
                               Rng* rng) {
  validate_model(m);
  if (m.omega.empty()) return {};
  if (mode.kind == EstimatorMode::Kind::Exact) {
    return parameter_shift_grad4(m.omega, [&](std::span<const double> w) {
      ForgedModel shifted = m;
      shifted.omega.assign(w.begin(), w.end());
      return energy(shifted, mode);
    });
  }
  if (rng == nullptr)
    throw ArgumentError("sampled mode needs a random number generator");
  std::uint64_t substream = (*rng)();
  return parameter_shift_grad4(m.omega, [&, substream](std::span<const double> w) {
    ForgedModel shifted = m;
    shifted.omega.assign(w.begin(), w.end());
    Rng local(substream);
    return energy(shifted, mode, &local);
  });
}

void spsa_step(std::vector<double>& x,
               const std::function<double(std::span<const double>)>& objective,
               SpsaGains& gains, Rng& rng) {
  if (x.empty()) {
    ++gains.k;
    return;
  }
  double ak = gains.a / std::pow(gains.k + 1 + gains.stability, 0.602);
  double ck = gains.c / std::pow(gains.k + 1, 0.101);
  std::vector<double> delta(x.size());
  std::vector<double> xp = x, xm = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    delta[i] = (rng() & 1) ? 1.0 : -1.0;
    xp[i] += ck * delta[i];
    xm[i] -= ck * delta[i];
  }
  double diff = objective(xp) - objective(xm);
  for (std::size_t i = 0; i < x.size(); ++i)
    x[i] -= ak * diff / (2 * ck * delta[i]);
  ++gains.k;
}

void spsa_step(ForgedModel& m, const TrainConfig& cfg, SpsaGains& gains,
               Rng& rng) {
  bool sampled = cfg.mode.kind == EstimatorMode::Kind::Sampled;
  std::uint64_t substream = sampled ? rng() : 0;
  auto objective = [&](std::span<const double> w) {
    ForgedModel shifted = m;
    shifted.omega.assign(w.begin(), w.end());
    if (!sampled) return energy(shifted, cfg.mode);
    Rng local(substream);
    return energy(shifted, cfg.mode, &local);
  };
  spsa_step(m.omega, objective, gains, rng);
}

TrainResult train(ForgedModel model, const TrainConfig& cfg,
                  const Checkpoint* resume) {
  validate_config(cfg);
  validate_model(model);

  int first_epoch = 0;
  if (resume != nullptr) {
    if (static_cast<int>(resume->theta.size()) != model.arnn.n_params() ||
        resume->omega.size() != model.omega.size())
      throw ArgumentError("checkpoint does not match the model's parameter shapes");
    model.arnn.set_params(resume->theta);
    model.omega = resume->omega;
    first_epoch = resume->epoch + 1;
  }

  auto snapshot = [&](int epoch) {
    Checkpoint c;
    auto th = model.arnn.params();
    c.theta.assign(th.begin(), th.end());
    c.omega = model.omega;
    c.epoch = epoch;
    return c;
  };

  AdamState adam_theta, adam_omega;
  adam_theta.init(static_cast<std::size_t>(model.arnn.n_params()));
  adam_omega.init(model.omega.size());
  SpsaGains gains;

  EnergyTrace trace;
  bool stopped_early = false;
  Checkpoint last_good = snapshot(first_epoch - 1);

  for (int epoch = first_epoch; epoch < cfg.epochs; ++epoch) {
    auto t0 = std::chrono::steady_clock::now();
    bool phase1 = epoch < cfg.phase1_epochs;
    Rng erng = task_rng(cfg.seed, static_cast<std::uint64_t>(epoch));
    Rng* rp = cfg.mode.kind == EstimatorMode::Kind::Sampled ? &erng : nullptr;

    double e = energy(model, cfg.mode, rp);
    std::vector<double> go, gt;
    if (cfg.optimizer != Optimizer::Spsa) go = grad_omega(model, cfg.mode, rp);
    if (!phase1) gt = grad_theta(model, cfg.mode, cfg.baseline, rp);

    if (!std::isfinite(e) || !all_finite(go) || !all_finite(gt))
      throw TrainingError(
          "non-finite energy or gradient at epoch " + std::to_string(epoch),
          last_good);

    if (cfg.optimizer == Optimizer::Spsa) {
      spsa_step(model, cfg, gains, erng);
    } else if (cfg.optimizer == Optimizer::Adam) {
      adam_omega.step(model.omega, go, cfg.lr_omega);
    } else {
      sgd_step(model.omega, go, cfg.lr_omega);
    }
    if (!phase1) {
      auto th = model.arnn.params();
      std::vector<double> theta(th.begin(), th.end());
      if (cfg.optimizer == Optimizer::Sgd)
        sgd_step(theta, gt, cfg.lr_theta);
      else
        adam_theta.step(theta, gt, cfg.lr_theta);
      model.arnn.set_params(theta);
    }
    if (!all_finite(model.omega) || !all_finite(model.arnn.params()))
      throw TrainingError(
          "parameters left the finite range at epoch " + std::to_string(epoch),
          last_good);

    double wall_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    trace.push_back({epoch, e, norm2(gt), norm2(go), wall_ms});
    last_good = snapshot(epoch);

    if (trace.size() >= static_cast<std::size_t>(kStopWindow)) {
      std::size_t start = trace.size() - kStopWindow;
      if (trace[start].epoch >= cfg.phase1_epochs) {
        double lo = trace[start].energy, hi = lo;
        for (std::size_t i = start; i < trace.size(); ++i) {
          lo = std::min(lo, trace[i].energy);
          hi = std::max(hi, trace[i].energy);
        }
        if (hi - lo < kStopTolerance) {
          stopped_early = true;
          break;
        }
      }
    }
  }

  return {std::move(model), std::move(trace), stopped_early};
}

}  // namespace forge
