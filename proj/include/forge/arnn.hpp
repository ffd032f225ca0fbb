#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "forge/rng.hpp"

namespace forge {

inline constexpr double kConditionalClamp = 1e-7;

// Masked one-hidden-layer autoregressive network over N bits.
// Bit i of a bitstring integer is input/output position i. Conditional
// probabilities p(sigma_i = 1 | sigma_{<i}) come from a tanh hidden layer
// and sigmoid outputs; masks make output i depend on inputs < i only, so
// the product of conditionals is exactly normalized.
class ArnnModel {
 public:
  ArnnModel(int n_bits, int hidden_width, std::uint64_t seed);

  int n_bits() const { return n_; }
  int hidden_width() const { return hidden_; }
  int n_params() const { return static_cast<int>(params_.size()); }

  std::span<const double> params() const { return params_; }
  void set_params(std::span<const double> p);

  // Conditionals for every position given the bits below it, each clamped
  // to [kConditionalClamp, 1-kConditionalClamp].
  std::vector<double> conditionals(std::uint64_t sigma) const;
  double log_prob(std::uint64_t sigma) const;
  // lambda(sigma) = +sqrt(p(sigma)).
  double lambda(std::uint64_t sigma) const;
  double lambda_ratio(std::uint64_t sigma, std::uint64_t sigma_prime) const;

  std::uint64_t sample(Rng& rng) const;

  // d log p / d params, laid out like params(): [w1, b1, w2, b2].
  std::vector<double> grad_log_prob(std::uint64_t sigma) const;
  std::vector<double> grad_lambda_ratio(std::uint64_t sigma,
                                        std::uint64_t sigma_prime) const;

  // Probabilities of all 2^N bitstrings by enumeration.
  std::vector<double> enumerate_probs() const;

  void save_text(std::ostream& out) const;
  static ArnnModel load_text(std::istream& in);

 private:
  // Hidden unit h may read inputs j < degree(h); output i reads hidden
  // units with degree(h) <= i, so output 0 sees only its bias.
  int degree(int h) const { return h % (n_ > 1 ? n_ - 1 : 1) + 1; }
  bool mask1(int h, int j) const { return j < degree(h); }
  bool mask2(int i, int h) const { return degree(h) <= i; }

  double* w1() { return params_.data(); }
  double* b1() { return params_.data() + hidden_ * n_; }
  double* w2() { return params_.data() + hidden_ * n_ + hidden_; }
  double* b2() { return params_.data() + hidden_ * n_ + hidden_ + n_ * hidden_; }
  const double* w1() const { return params_.data(); }
  const double* b1() const { return params_.data() + hidden_ * n_; }
  const double* w2() const { return params_.data() + hidden_ * n_ + hidden_; }
  const double* b2() const {
    return params_.data() + hidden_ * n_ + hidden_ + n_ * hidden_;
  }

  void forward(std::uint64_t sigma, std::vector<double>& hidden_act,
               std::vector<double>& cond) const;

  int n_ = 0;
  int hidden_ = 0;
  std::vector<double> params_;
};

}  // namespace forge
