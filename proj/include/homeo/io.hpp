#pragma once

// File formats: experiment and protocol CSVs, weights and run-config JSON,
// prediction and loss CSVs. Units are hours and uN/mm^2 throughout.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "homeo/discovery.hpp"
#include "homeo/material_point.hpp"

namespace homeo::io {

inline constexpr std::string_view kExperimentHeader = "time_h,C11,C22,C33,S11,S22,S33,mask1,mask2,mask3";
inline constexpr std::string_view kProtocolHeader = "time_h,C11,C22,C33,mask1,mask2,mask3";
inline constexpr std::string_view kPredictionHeader =
    "time_h,S11_pred,S22_pred,S33_pred,gamma_hat,phi_hat,newton_iters,det_Cg";
inline constexpr std::string_view kLossHeader = "epoch,total,data,penalty";

struct WeightsDocument {
  EnergyWeights energy;
  PotentialWeights potential;
};

/// Requires all thirteen weights; rejects unknown keys. Greek-letter key
/// spellings (wσ1, wτ4, ŵη) are accepted as aliases.
WeightsDocument parse_weights(std::string_view text, const std::string& source = "<weights>");
WeightsDocument read_weights(const std::filesystem::path& path);
std::string format_weights(const WeightsDocument& doc);
void write_weights(const std::filesystem::path& path, const WeightsDocument& doc);

/// Run configuration; every key is optional, unknown keys are rejected.
/// `initial_weights` takes a weights object as the training start point.
TrainConfig parse_config(std::string_view text, const std::string& source = "<config>");
TrainConfig read_config(const std::filesystem::path& path);

Experiment parse_experiment(std::istream& in, const std::string& source = "<experiment>");
Experiment read_experiment(const std::filesystem::path& path);
void write_experiment(std::ostream& out, const Experiment& ex);

/// Accepts either the protocol or the experiment header.
LoadingProtocol parse_protocol(std::istream& in, const std::string& source = "<protocol>");
LoadingProtocol read_protocol(const std::filesystem::path& path);

/// Simulated trajectory as an experiment file (predicted stresses as data).
Experiment to_experiment(const LoadingProtocol& protocol, const Trajectory& traj);

struct PredictionRow {
  double time_h;
  Vec3<double> s;
  double gamma_hat;
  double phi_hat;
  int newton_iters;
  double det_cg;
};

void write_prediction(std::ostream& out, const Trajectory& traj);
std::vector<PredictionRow> parse_prediction(std::istream& in, const std::string& source = "<prediction>");

void write_loss(std::ostream& out, const LossReport& loss);

/// Whole file as a string; throws ParseError when it cannot be opened.
std::string read_text(const std::filesystem::path& path);

}  // namespace homeo::io
