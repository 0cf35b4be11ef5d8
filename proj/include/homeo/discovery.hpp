#pragma once

// Weight discovery: masked MSE over simulated stresses, L1/L2 penalties,
// forward-mode or finite-difference gradients through the recurrent rollout,
// and full-batch Adam.
//
// Optimization runs on an unconstrained vector θ of 13 entries. Weights that
// must be non-negative are w = θ²; the Ogden exponent w11 is θ itself.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "homeo/dual.hpp"
#include "homeo/energy.hpp"
#include "homeo/material_point.hpp"
#include "homeo/potential.hpp"

namespace homeo {

inline constexpr std::size_t kNumWeights = 13;

/// Parameter order used by θ, gradients and RegMask.
enum WeightIndex : std::size_t {
  kW01, kW02, kW11, kW12,
  kSigma1, kSigma2, kSigma3, kSigma4,
  kTau1, kTau2, kTau3, kTau4,
  kEtaHat,
};

using Theta = std::array<double, kNumWeights>;

/// ASCII names matching the weights document keys.
extern const std::array<std::string_view, kNumWeights> kWeightNames;

enum class RegMode { L1, L2, None };
enum class GradientMode { ForwardAD, FiniteDiff };
enum class RegFlag { Regularized, Free };
using RegMask = std::array<RegFlag, kNumWeights>;

/// w01, w11, wσ3, wτ3 free; all other weights regularized.
RegMask default_reg_mask();

double default_reg_strength(RegMode mode);

struct TrainConfig {
  double learning_rate = 1e-3;
  int epochs = 4000;
  RegMode reg_mode = RegMode::L2;
  double reg_strength = 1e-3;
  double eta_reg = 1e-3;  ///< L2 factor on ŵη applied in every mode
  std::uint64_t seed = 0;
  GradientMode gradient_mode = GradientMode::ForwardAD;
  ActivationMode activation = ActivationMode::NegMax;
  SolverOptions solver;
  RegMask mask = default_reg_mask();
  /// Starting point; drawn from `seed` when absent.
  std::optional<Theta> initial_theta;

  void validate() const;
};

/// One loading protocol with measured principal stresses per time point.
struct Experiment {
  LoadingProtocol protocol;
  std::vector<Vec3<double>> stress;  ///< S11, S22, S33; ignored where ZeroStress
};

struct Dataset {
  std::vector<Experiment> experiments;

  void validate() const;
};

struct LossReport {
  std::vector<double> total;
  std::vector<double> data;
  std::vector<double> penalty;

  std::size_t size() const { return total.size(); }
};

template <class T>
struct BasicModel {
  BasicEnergyWeights<T> energy;
  BasicPotentialWeights<T> potential;
};

using Model = BasicModel<double>;

template <class T>
BasicModel<T> constrain(const std::array<T, kNumWeights>& theta, ActivationMode mode = ActivationMode::NegMax) {
  const auto sq = [](const T& x) { return x * x; };
  BasicModel<T> m;
  m.energy.w01 = sq(theta[kW01]);
  m.energy.w02 = sq(theta[kW02]);
  m.energy.w11 = theta[kW11];
  m.energy.w12 = sq(theta[kW12]);
  m.potential.sigma1 = sq(theta[kSigma1]);
  m.potential.sigma2 = sq(theta[kSigma2]);
  m.potential.sigma3 = sq(theta[kSigma3]);
  m.potential.sigma4 = sq(theta[kSigma4]);
  m.potential.tau1 = sq(theta[kTau1]);
  m.potential.tau2 = sq(theta[kTau2]);
  m.potential.tau3 = sq(theta[kTau3]);
  m.potential.tau4 = sq(theta[kTau4]);
  m.potential.eta_hat = sq(theta[kEtaHat]);
  m.potential.mode = mode;
  return m;
}

/// Inverse of constrain() choosing θ = +√w.
Theta unconstrain(const EnergyWeights& ew, const PotentialWeights& pw);

template <class T>
std::array<T, kNumWeights> weight_array(const BasicEnergyWeights<T>& ew, const BasicPotentialWeights<T>& pw) {
  return {ew.w01,     ew.w02,     ew.w11,     ew.w12,     pw.sigma1, pw.sigma2, pw.sigma3,
          pw.sigma4,  pw.tau1,    pw.tau2,    pw.tau3,    pw.tau4,   pw.eta_hat};
}

/// Mean of (S_pred - S_exp)² over every experiment, time point and measured
/// direction. Simulation failures propagate as exceptions.
template <class T>
T data_loss(const BasicEnergyWeights<T>& ew, const BasicPotentialWeights<T>& pw, const Dataset& data,
            const SolverOptions& opts = {}) {
  T sum(0.0);
  std::size_t count = 0;
  for (const auto& ex : data.experiments) {
    const auto traj = simulate(ex.protocol, ew, pw, opts);
    for (std::size_t n = 0; n < traj.size(); ++n)
      for (int i = 0; i < 3; ++i) {
        if (ex.protocol.mask[i] != Constraint::Measured) continue;
        const T d = traj.steps[n].s_reported(i, i) - ex.stress[n][i];
        sum += d * d;
        ++count;
      }
  }
  if (count == 0) throw InvalidInput("data_loss: dataset has no measured entries");
  return sum / double(count);
}

double data_loss(const EnergyWeights& ew, const PotentialWeights& pw, const Dataset& data, const SolverOptions& opts = {});

template <class T>
T penalty(const BasicEnergyWeights<T>& ew, const BasicPotentialWeights<T>& pw, const TrainConfig& config) {
  using std::abs;
  const auto w = weight_array(ew, pw);
  T p(0.0);
  for (std::size_t k = 0; k < kNumWeights; ++k) {
    if (k == kEtaHat || config.mask[k] != RegFlag::Regularized) continue;
    if (config.reg_mode == RegMode::L1) p += config.reg_strength * abs(w[k]);
    if (config.reg_mode == RegMode::L2) p += config.reg_strength * w[k] * w[k];
  }
  if (config.mask[kEtaHat] == RegFlag::Regularized) p += config.eta_reg * w[kEtaHat] * w[kEtaHat];
  return p;
}

double penalty(const EnergyWeights& ew, const PotentialWeights& pw, const TrainConfig& config);

struct Evaluation {
  double data = 0.0;
  double penalty = 0.0;
  double total = 0.0;
  Theta gradient{};  ///< d(total)/dθ
};

/// Loss and its gradient with respect to θ. Throws NumericalFailure on a
/// non-finite gradient component.
Evaluation evaluate(const Theta& theta, const Dataset& data, const TrainConfig& config);

Theta gradient(const Theta& theta, const Dataset& data, const TrainConfig& config);

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  long t = 0;

  explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

struct AdamParams {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-7;
};

/// In-place Adam update with bias correction; advances state.t by one.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               const AdamParams& hp = {});

/// θ drawn uniformly from [0.05, 0.5], w11 from [0.5, 1.5].
Theta initial_theta(std::uint64_t seed);

struct TrainResult {
  EnergyWeights energy;
  PotentialWeights potential;
  LossReport loss;
  Theta theta{};
};

/// Called after every epoch with (epoch, total loss).
using EpochCallback = std::function<void(int, double)>;

/// Full-batch Adam for config.epochs epochs. Throws TrainingAborted with the
/// epoch index when a rollout or gradient fails.
TrainResult train(const Dataset& data, const TrainConfig& config, const EpochCallback& on_epoch = {});

}  // namespace homeo
