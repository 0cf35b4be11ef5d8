#include "homeo/discovery.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace homeo {

const std::array<std::string_view, kNumWeights> kWeightNames = {
    "w01",     "w02",     "w11",   "w12",   "wsigma1", "wsigma2",  "wsigma3",
    "wsigma4", "wtau1",   "wtau2", "wtau3", "wtau4",   "weta_hat",
};

RegMask default_reg_mask() {
  RegMask m;
  m.fill(RegFlag::Regularized);
  m[kW01] = RegFlag::Free;
  m[kW11] = RegFlag::Free;
  m[kSigma3] = RegFlag::Free;
  m[kTau3] = RegFlag::Free;
  return m;
}

double default_reg_strength(RegMode mode) {
  switch (mode) {
    case RegMode::L1:
      return 0.01;
    case RegMode::L2:
      return 0.001;
    case RegMode::None:
      return 0.0;
  }
  return 0.0;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw InvalidInput("config: learning_rate must be > 0");
  if (epochs < 1) throw InvalidInput("config: epochs must be >= 1");
  if (!(reg_strength >= 0.0)) throw InvalidInput("config: regularization strength must be >= 0");
  if (!(eta_reg >= 0.0)) throw InvalidInput("config: eta_reg must be >= 0");
  if (!(solver.eps > 0.0)) throw InvalidInput("config: eps must be > 0");
  if (solver.max_iter < 1) throw InvalidInput("config: max_iter must be >= 1");
  if (!(solver.max_dt >= 0.0)) throw InvalidInput("config: max_dt must be >= 0");
}

void Dataset::validate() const {
  if (experiments.empty()) throw InvalidInput("dataset: no experiments");
  for (const auto& ex : experiments) {
    ex.protocol.validate();
    if (ex.stress.size() != ex.protocol.size())
      throw InvalidInput("dataset: stress series length differs from time grid");
  }
}

Theta unconstrain(const EnergyWeights& ew, const PotentialWeights& pw) {
  validate(ew);
  validate(pw);
  Theta t;
  const auto w = weight_array(ew, pw);
  for (std::size_t k = 0; k < kNumWeights; ++k) t[k] = k == kW11 ? w[k] : std::sqrt(w[k]);
  return t;
}

double data_loss(const EnergyWeights& ew, const PotentialWeights& pw, const Dataset& data, const SolverOptions& opts) {
  return data_loss<double>(ew, pw, data, opts);
}

double penalty(const EnergyWeights& ew, const PotentialWeights& pw, const TrainConfig& config) {
  return penalty<double>(ew, pw, config);
}

namespace {

using DTheta = Dual<kNumWeights>;

struct Loss {
  double data;
  double penalty;
  double total() const { return data + penalty; }
};

Loss loss_at(const Theta& theta, const Dataset& data, const TrainConfig& config) {
  const auto m = constrain(theta, config.activation);
  const double d = data_loss<double>(m.energy, m.potential, data, config.solver);
  return {d, penalty<double>(m.energy, m.potential, config)};
}

Evaluation evaluate_forward(const Theta& theta, const Dataset& data, const TrainConfig& config) {
  std::array<DTheta, kNumWeights> t;
  for (std::size_t k = 0; k < kNumWeights; ++k) t[k] = DTheta::variable(theta[k], k);
  const auto m = constrain(t, config.activation);
  const DTheta d = data_loss(m.energy, m.potential, data, config.solver);
  const DTheta p = penalty(m.energy, m.potential, config);
  Evaluation e;
  e.data = d.v;
  e.penalty = p.v;
  e.total = d.v + p.v;
  for (std::size_t k = 0; k < kNumWeights; ++k) e.gradient[k] = d.d[k] + p.d[k];
  return e;
}

Evaluation evaluate_finite_diff(const Theta& theta, const Dataset& data, const TrainConfig& config) {
  const Loss base = loss_at(theta, data, config);
  Evaluation e;
  e.data = base.data;
  e.penalty = base.penalty;
  e.total = base.total();
  for (std::size_t k = 0; k < kNumWeights; ++k) {
    const double h = 1e-6 * std::max(1.0, std::abs(theta[k]));
    Theta plus = theta, minus = theta;
    plus[k] += h;
    minus[k] -= h;
    e.gradient[k] = (loss_at(plus, data, config).total() - loss_at(minus, data, config).total()) / (2.0 * h);
  }
  return e;
}

}  // namespace

Evaluation evaluate(const Theta& theta, const Dataset& data, const TrainConfig& config) {
  Evaluation e = config.gradient_mode == GradientMode::ForwardAD ? evaluate_forward(theta, data, config)
                                                                 : evaluate_finite_diff(theta, data, config);
  for (std::size_t k = 0; k < kNumWeights; ++k)
    if (!std::isfinite(e.gradient[k]))
      throw NumericalFailure(k, "gradient component " + std::to_string(k) + " (" + std::string(kWeightNames[k]) +
                                    ") is not finite");
  return e;
}

Theta gradient(const Theta& theta, const Dataset& data, const TrainConfig& config) {
  return evaluate(theta, data, config).gradient;
}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state, const AdamParams& hp) {
  if (params.size() != grads.size()) throw InvalidInput("adam_step: parameter and gradient sizes differ");
  if (state.m.size() != params.size()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
  }
  ++state.t;
  const double t = double(state.t);
  const double lr_t = hp.learning_rate * std::sqrt(1.0 - std::pow(hp.beta2, t)) / (1.0 - std::pow(hp.beta1, t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = hp.beta1 * state.m[i] + (1.0 - hp.beta1) * grads[i];
    state.v[i] = hp.beta2 * state.v[i] + (1.0 - hp.beta2) * grads[i] * grads[i];
    params[i] -= lr_t * state.m[i] / (std::sqrt(state.v[i]) + hp.epsilon);
  }
}

Theta initial_theta(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> scale(0.05, 0.5);
  std::uniform_real_distribution<double> exponent(0.5, 1.5);
  Theta t;
  for (std::size_t k = 0; k < kNumWeights; ++k) t[k] = k == kW11 ? exponent(rng) : scale(rng);
  return t;
}

TrainResult train(const Dataset& data, const TrainConfig& config, const EpochCallback& on_epoch) {
  data.validate();
  config.validate();
  Theta theta = config.initial_theta ? *config.initial_theta : initial_theta(config.seed);
  AdamState adam(kNumWeights);
  AdamParams hp;
  hp.learning_rate = config.learning_rate;

  TrainResult result;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    Evaluation e;
    try {
      e = evaluate(theta, data, config);
    } catch (const Error& err) {
      throw TrainingAborted(std::size_t(epoch), err.what());
    }
    result.loss.total.push_back(e.total);
    result.loss.data.push_back(e.data);
    result.loss.penalty.push_back(e.penalty);
    adam_step(theta, e.gradient, adam, hp);
    if (on_epoch) on_epoch(epoch, e.total);
  }
  const auto m = constrain(theta, config.activation);
  result.energy = m.energy;
  result.potential = m.potential;
  result.theta = theta;
  return result;
}

}  // namespace homeo
