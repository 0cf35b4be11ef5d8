#include "homeo/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

#include "homeo/discovery.hpp"
#include "homeo/errors.hpp"
#include "homeo/io.hpp"
#include "homeo/material_point.hpp"
#include "homeo/verify.hpp"

namespace homeo::cli {

namespace {

namespace fs = std::filesystem;

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw InvalidInput("cannot open '" + path.string() + "' for writing");
  return f;
}

void print_moduli(std::ostream& out, const EnergyWeights& w) {
  const auto m = moduli(w);
  out << "kappa = " << fmt(m.kappa) << "\n";
  out << "mu    = " << fmt(m.mu) << "\n";
  out << "E     = " << fmt(m.E) << "\n";
  out << "nu    = " << fmt(m.nu) << "\n";
  if (m.mu == 0.0)
    out << "warning: shear modulus is zero; the linearized stiffness is singular and implicit structural "
           "analysis with these weights is ill-posed\n";
}

struct Options {
  std::string weights;
  std::vector<std::string> data;
  std::string config;
  std::string out;
  std::string loss;
  std::optional<double> eps;
  std::optional<std::uint64_t> seed;
  bool as_experiment = false;
};

int cmd_simulate(const Options& o, std::ostream& out) {
  const auto doc = io::read_weights(o.weights);
  const auto protocol = io::read_protocol(o.data.front());
  SolverOptions solver;
  if (o.eps) solver.eps = *o.eps;
  const auto traj = simulate(protocol, doc.energy, doc.potential, solver);
  const auto emit = [&](std::ostream& s) {
    if (o.as_experiment)
      io::write_experiment(s, io::to_experiment(protocol, traj));
    else
      io::write_prediction(s, traj);
  };
  if (o.out.empty()) {
    emit(out);
  } else {
    auto f = open_output(o.out);
    emit(f);
  }
  return kSuccess;
}

int cmd_train(const Options& o, std::ostream& out) {
  TrainConfig cfg = o.config.empty() ? TrainConfig{} : io::read_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (o.eps) cfg.solver.eps = *o.eps;
  cfg.validate();
  Dataset data;
  for (const auto& path : o.data) data.experiments.push_back(io::read_experiment(path));
  data.validate();

  const int stride = std::max(1, cfg.epochs / 10);
  const auto result = train(data, cfg, [&](int epoch, double loss) {
    if (epoch % stride == 0 || epoch == 1) out << "epoch " << epoch << "  loss " << fmt(loss) << "\n";
  });

  io::write_weights(o.out, {result.energy, result.potential});
  fs::path loss_path = o.loss;
  if (loss_path.empty()) loss_path = fs::path(o.out).replace_extension(".loss.csv");
  {
    auto f = open_output(loss_path);
    io::write_loss(f, result.loss);
  }
  out << "final loss: total " << fmt(result.loss.total.back()) << ", data " << fmt(result.loss.data.back())
      << ", penalty " << fmt(result.loss.penalty.back()) << "\n";
  out << "weights written to " << o.out << ", loss history to " << loss_path.string() << "\n";
  try {
    print_moduli(out, result.energy);
  } catch (const DegenerateMaterial& e) {
    out << "degenerate material: " << e.what() << "\n";
  }
  return kSuccess;
}

int cmd_moduli(const Options& o, std::ostream& out) {
  print_moduli(out, io::read_weights(o.weights).energy);
  return kSuccess;
}

int cmd_verify(const Options& o, std::ostream& out) {
  const auto report = run_verify(o.seed.value_or(1));
  write_report(out, report);
  if (!o.out.empty()) {
    auto f = open_output(o.out);
    write_report(f, report);
  }
  return report.all_pass() ? kSuccess : kNumerical;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Homeostatic growth: forward simulation and model discovery", "homeo"};
  app.require_subcommand(1);
  Options o;

  auto* sim = app.add_subcommand("simulate", "Simulate a loading protocol and write predicted curves");
  sim->add_option("--weights", o.weights, "Weights document (JSON)")->required();
  sim->add_option("--data", o.data, "Experiment or protocol CSV")->required()->expected(1);
  sim->add_option("--out", o.out, "Output CSV (default: stdout)");
  sim->add_option("--eps", o.eps, "Newton tolerance");
  sim->add_flag("--as-experiment", o.as_experiment, "Write an experiment CSV with predicted stresses");

  auto* tr = app.add_subcommand("train", "Discover weights from experiment CSVs");
  tr->add_option("--data", o.data, "Experiment CSV (repeatable)")->required();
  tr->add_option("--config", o.config, "Run configuration (JSON)");
  tr->add_option("--out", o.out, "Output weights document")->required();
  tr->add_option("--loss", o.loss, "Output loss-history CSV (default: <out>.loss.csv)");
  tr->add_option("--seed", o.seed, "Override the configured seed");
  tr->add_option("--eps", o.eps, "Newton tolerance");

  auto* mod = app.add_subcommand("moduli", "Print linearized elastic moduli of an energy");
  mod->add_option("--weights", o.weights, "Weights document (JSON)")->required();

  auto* ver = app.add_subcommand("verify", "Run the invariant suite");
  ver->add_option("--seed", o.seed, "Sampling seed (default 1)");
  ver->add_option("--out", o.out, "Also write the report to this file");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kSuccess : kUsage;
  }

  try {
    if (sim->parsed()) return cmd_simulate(o, out);
    if (tr->parsed()) return cmd_train(o, out);
    if (mod->parsed()) return cmd_moduli(o, out);
    return cmd_verify(o, out);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kParse;
  } catch (const InvalidInput& e) {
    err << "invalid input: " << e.what() << "\n";
    return kParse;
  } catch (const DegenerateMaterial& e) {
    err << "degenerate material: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  }
}

}  // namespace homeo::cli
