#include "forge/arnn.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "forge/errors.hpp"

namespace forge {

namespace {

double clamp_cond(double s) {
  return std::clamp(s, kConditionalClamp, 1.0 - kConditionalClamp);
}

}  // namespace

ArnnModel::ArnnModel(int n_bits, int hidden_width, std::uint64_t seed)
    : n_(n_bits), hidden_(hidden_width) {
  if (n_ < 1 || n_ > 63) throw ArgumentError("bit count out of range");
  if (hidden_ < 1) throw ArgumentError("hidden width must be positive");
  params_.assign(static_cast<std::size_t>(hidden_ * n_ + hidden_ + n_ * hidden_ + n_),
                 0.0);
  // Hidden weights uniform in +-1/sqrt(N) where the mask allows; the output
  // layer starts at zero so the initial distribution is exactly uniform.
  Rng rng(seed);
  double bound = 1.0 / std::sqrt(static_cast<double>(n_));
  for (int h = 0; h < hidden_; ++h)
    for (int j = 0; j < n_; ++j) {
      double u = (2 * uniform01(rng) - 1) * bound;
      w1()[h * n_ + j] = mask1(h, j) ? u : 0.0;
    }
}

void ArnnModel::set_params(std::span<const double> p) {
  if (p.size() != params_.size()) throw ArgumentError("parameter count mismatch");
  std::copy(p.begin(), p.end(), params_.begin());
  // Re-zero masked entries so external updates cannot break autoregression.
  for (int h = 0; h < hidden_; ++h)
    for (int j = 0; j < n_; ++j)
      if (!mask1(h, j)) w1()[h * n_ + j] = 0.0;
  for (int i = 0; i < n_; ++i)
    for (int h = 0; h < hidden_; ++h)
      if (!mask2(i, h)) w2()[i * hidden_ + h] = 0.0;
}

void ArnnModel::forward(std::uint64_t sigma, std::vector<double>& hidden_act,
                        std::vector<double>& cond) const {
  hidden_act.resize(static_cast<std::size_t>(hidden_));
  cond.resize(static_cast<std::size_t>(n_));
  for (int h = 0; h < hidden_; ++h) {
    double a = b1()[h];
    const double* row = w1() + h * n_;
    for (int j = 0; j < n_; ++j)
      if ((sigma >> j) & 1) a += row[j];
    hidden_act[static_cast<std::size_t>(h)] = std::tanh(a);
  }
  for (int i = 0; i < n_; ++i) {
    double u = b2()[i];
    const double* row = w2() + i * hidden_;
    for (int h = 0; h < hidden_; ++h) u += row[h] * hidden_act[static_cast<std::size_t>(h)];
    cond[static_cast<std::size_t>(i)] = clamp_cond(1.0 / (1.0 + std::exp(-u)));
  }
}

std::vector<double> ArnnModel::conditionals(std::uint64_t sigma) const {
  std::vector<double> h, c;
  forward(sigma, h, c);
  return c;
}

double ArnnModel::log_prob(std::uint64_t sigma) const {
  std::vector<double> h, c;
  forward(sigma, h, c);
  double lp = 0;
  for (int i = 0; i < n_; ++i) {
    double s = c[static_cast<std::size_t>(i)];
    lp += ((sigma >> i) & 1) ? std::log(s) : std::log1p(-s);
  }
  return lp;
}

double ArnnModel::lambda(std::uint64_t sigma) const {
  return std::exp(0.5 * log_prob(sigma));
}

double ArnnModel::lambda_ratio(std::uint64_t sigma, std::uint64_t sigma_prime) const {
  return std::exp(0.5 * (log_prob(sigma_prime) - log_prob(sigma)));
}

std::uint64_t ArnnModel::sample(Rng& rng) const {
  std::uint64_t sigma = 0;
  std::vector<double> h, c;
  for (int i = 0; i < n_; ++i) {
    // Bits above i are still zero; masking makes conditional i valid anyway.
    forward(sigma, h, c);
    if (uniform01(rng) < c[static_cast<std::size_t>(i)]) sigma |= std::uint64_t{1} << i;
  }
  return sigma;
}

std::vector<double> ArnnModel::grad_log_prob(std::uint64_t sigma) const {
  std::vector<double> hact, cond;
  forward(sigma, hact, cond);
  std::vector<double> grad(params_.size(), 0.0);
  double* gw1 = grad.data();
  double* gb1 = grad.data() + hidden_ * n_;
  double* gw2 = grad.data() + hidden_ * n_ + hidden_;
  double* gb2 = grad.data() + hidden_ * n_ + hidden_ + n_ * hidden_;

  // d log p / d u_i = sigma_i - s_i for Bernoulli(sigmoid(u_i)).
  std::vector<double> du(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i)
    du[static_cast<std::size_t>(i)] =
        static_cast<double>((sigma >> i) & 1) - cond[static_cast<std::size_t>(i)];

  for (int i = 0; i < n_; ++i) {
    gb2[i] = du[static_cast<std::size_t>(i)];
    for (int h = 0; h < hidden_; ++h)
      if (mask2(i, h))
        gw2[i * hidden_ + h] = du[static_cast<std::size_t>(i)] * hact[static_cast<std::size_t>(h)];
  }
  for (int h = 0; h < hidden_; ++h) {
    double dh = 0;
    for (int i = 0; i < n_; ++i)
      if (mask2(i, h)) dh += w2()[i * hidden_ + h] * du[static_cast<std::size_t>(i)];
    double dz = dh * (1.0 - hact[static_cast<std::size_t>(h)] * hact[static_cast<std::size_t>(h)]);
    gb1[h] = dz;
    for (int j = 0; j < n_; ++j)
      if (mask1(h, j) && ((sigma >> j) & 1)) gw1[h * n_ + j] = dz;
  }
  return grad;
}

std::vector<double> ArnnModel::grad_lambda_ratio(std::uint64_t sigma,
                                                 std::uint64_t sigma_prime) const {
  double r = lambda_ratio(sigma, sigma_prime);
  std::vector<double> g = grad_log_prob(sigma_prime);
  std::vector<double> gs = grad_log_prob(sigma);
  for (std::size_t k = 0; k < g.size(); ++k) g[k] = r * 0.5 * (g[k] - gs[k]);
  return g;
}

std::vector<double> ArnnModel::enumerate_probs() const {
  if (n_ > 20) throw ResourceError("enumeration limit exceeded");
  std::vector<double> p(std::size_t{1} << n_);
  for (std::uint64_t s = 0; s < p.size(); ++s) p[s] = std::exp(log_prob(s));
  return p;
}

void ArnnModel::save_text(std::ostream& out) const {
  out.precision(17);
  out << "arnn 1 " << n_ << " " << hidden_ << " " << kConditionalClamp << "\n";
  for (double v : params_) out << v << "\n";
}

ArnnModel ArnnModel::load_text(std::istream& in) {
  std::string tag;
  int version = 0, n = 0, hidden = 0;
  double clamp = 0;
  in >> tag >> version >> n >> hidden >> clamp;
  if (!in || tag != "arnn" || version != 1)
    throw ArgumentError("unrecognized checkpoint header");
  ArnnModel m(n, hidden, 0);
  std::vector<double> p(m.params_.size());
  for (auto& v : p)
    if (!(in >> v)) throw ArgumentError("truncated checkpoint");
  m.set_params(p);
  return m;
}

}  // namespace forge
