#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "forge/estimator.hpp"

namespace forge {

enum class Optimizer { Adam, Sgd, Spsa };

Optimizer parse_optimizer(const std::string& name);
std::string optimizer_name(Optimizer opt);

struct TrainConfig {
  int epochs = 2000;
  int phase1_epochs = 100;  // circuit parameters only
  double lr_omega = 0.05;
  double lr_theta = 0.01;
  Optimizer optimizer = Optimizer::Adam;
  EstimatorMode mode = EstimatorMode::exact();
  std::uint64_t seed = 0;
  bool baseline = true;
};

void validate_config(const TrainConfig& cfg);

struct TraceRecord {
  int epoch = 0;
  double energy = 0;
  double grad_norm_theta = 0;
  double grad_norm_omega = 0;
  double wall_ms = 0;
};
using EnergyTrace = std::vector<TraceRecord>;

struct Checkpoint {
  std::vector<double> theta;
  std::vector<double> omega;
  int epoch = -1;
  std::uint64_t config_hash = 0;
};

// Raised when an epoch produces a non-finite energy or gradient. Carries
// the last parameter set that evaluated cleanly.
class TrainingError : public std::runtime_error {
 public:
  TrainingError(const std::string& msg, Checkpoint last)
      : std::runtime_error(msg), last_checkpoint(std::move(last)) {}
  Checkpoint last_checkpoint;
};

// dE/dtheta. Exact mode enumerates the score-function identity; sampled
// mode draws sigma from the network and sigma' per conjugated pair term,
// adding the direct amplitude-ratio gradient. The baseline subtracts the
// leave-one-out mean local energy inside the score term (the full mean in
// exact mode, where it cancels identically).
std::vector<double> grad_theta(const ForgedModel& m, const EstimatorMode& mode,
                               bool baseline = true, Rng* rng = nullptr);

// dE/domega via the four-point shift rule on the full energy. Sampled mode
// replays one rng substream for every shifted evaluation so the rule sees
// common noise.
std::vector<double> grad_omega(const ForgedModel& m, const EstimatorMode& mode,
                               Rng* rng = nullptr);

struct SpsaGains {
  double a = 0.5;
  double c = 0.1;
  double stability = 10.0;
  int k = 0;
};

// One simultaneous-perturbation step on x: two objective evaluations at
// x +- c_k * delta with Rademacher delta, gains a_k = a / (k+1+A)^0.602,
// c_k = c / (k+1)^0.101.
void spsa_step(std::vector<double>& x,
               const std::function<double(std::span<const double>)>& objective,
               SpsaGains& gains, Rng& rng);

// Same step on the model's circuit parameters with the energy objective.
void spsa_step(ForgedModel& m, const TrainConfig& cfg, SpsaGains& gains,
               Rng& rng);

struct TrainResult {
  ForgedModel model;
  EnergyTrace trace;
  bool stopped_early = false;
};

// Phase 1 updates omega only; from phase1_epochs on, theta and omega move
// together. The spsa optimizer applies to the circuit parameters (theta
// keeps the score-function gradient). Stops early once the trailing 50
// post-phase-1 energies agree within 1e-8. Exact mode is deterministic
// given the seed. resume, when given, must match the model's parameter
// shapes; epochs continue after its epoch index.
TrainResult train(ForgedModel model, const TrainConfig& cfg,
                  const Checkpoint* resume = nullptr);

}  // namespace forge
