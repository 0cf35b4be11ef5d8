#include "homeo/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

#include "homeo/discovery.hpp"
#include "homeo/energy.hpp"
#include "homeo/io.hpp"
#include "homeo/material_point.hpp"
#include "homeo/potential.hpp"
#include "homeo/presets.hpp"
#include "homeo/sampling.hpp"
#include "homeo/tensor.hpp"

namespace homeo {

bool VerifyReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

const CheckResult* VerifyReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

namespace {

using sampling::Rng;

class Check {
 public:
  Check(std::string module, std::string name, double tolerance)
      : module_(std::move(module)), name_(std::move(name)), tolerance_(tolerance) {}

  void observe(double violation) {
    ++count_;
    if (!std::isfinite(violation)) {
      finite_ = false;
      return;
    }
    max_ = std::max(max_, violation);
  }
  void fail(const std::string& why) {
    failed_ = true;
    note_ = why;
  }
  void note(const std::string& n) { note_ = n; }

  CheckResult result() const {
    CheckResult r;
    r.module = module_;
    r.name = name_;
    r.count = count_;
    r.max_violation = finite_ ? max_ : std::numeric_limits<double>::infinity();
    r.tolerance = tolerance_;
    r.pass = !failed_ && finite_ && count_ > 0 && max_ <= tolerance_;
    r.note = note_;
    return r;
  }

 private:
  std::string module_, name_;
  double tolerance_;
  std::size_t count_ = 0;
  double max_ = 0.0;
  bool finite_ = true;
  bool failed_ = false;
  std::string note_;
};

double frob(const Mat3<double>& m) {
  double s = 0.0;
  for (const auto& row : m)
    for (double x : row) s += x * x;
  return std::sqrt(s);
}

Mat3<double> mat_sub(Mat3<double> a, const Mat3<double>& b) {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a[i][j] -= b[i][j];
  return a;
}

double rel(const SymTensor3& a, const SymTensor3& b) {
  const double n = norm(b);
  return norm(a - b) / (n > 0.0 ? n : 1.0);
}

EnergyWeights random_energy(Rng& rng, double w01_lo = 0.0) {
  return {sampling::uniform(rng, w01_lo, 3.0), sampling::uniform(rng, 0.0, 1.0), sampling::uniform(rng, -4.0, 4.0),
          sampling::uniform(rng, 0.0, 1.0)};
}

PotentialWeights random_potential(Rng& rng) {
  PotentialWeights w;
  w.sigma1 = sampling::uniform(rng, 0.0, 1.0);
  w.sigma2 = sampling::uniform(rng, 0.0, 1.0);
  w.sigma3 = sampling::uniform(rng, 0.0, 2.0);
  w.sigma4 = sampling::uniform(rng, 0.0, 1.0);
  w.tau1 = sampling::uniform(rng, 0.0, 1.0);
  w.tau2 = sampling::uniform(rng, 0.0, 1.0);
  w.tau3 = sampling::uniform(rng, 0.0, 2.0);
  w.tau4 = sampling::uniform(rng, 0.0, 1.0);
  w.eta_hat = sampling::uniform(rng, 0.0, 1.0);
  w.mode = sampling::uniform(rng, 0.0, 1.0) < 0.5 ? ActivationMode::NegMax : ActivationMode::Abs;
  return w;
}

// ---------------------------------------------------------------- tensor_core

void tensor_checks(Rng& rng, std::vector<CheckResult>& out) {
  Check recon("tensor_core", "eig_reconstruction", 1e-12);
  Check proj("tensor_core", "eig_projections_orthonormal", 1e-12);
  Check poly("tensor_core", "eig_characteristic_invariants", 1e-10);
  for (int s = 0; s < 1000; ++s) {
    const auto a = sampling::symmetric(rng, sampling::uniform(rng, 0.1, 10.0));
    const auto sp = eig_sym(a);
    recon.observe(rel(sp.reconstruct(), a));
    Mat3<double> sum{};
    for (int i = 0; i < 3; ++i) {
      const auto pi = sp.projection(i);
      for (int j = 0; j < 3; ++j) {
        auto prod = matmul(pi, sp.projection(j));
        if (i == j) prod = mat_sub(prod, to_matrix(pi));
        proj.observe(frob(prod));
      }
      const auto m = to_matrix(pi);
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) sum[r][c] += m[r][c];
    }
    proj.observe(frob(mat_sub(sum, to_matrix(SymTensor3::identity()))));
    const auto& l = sp.values;
    const double n = norm(a);
    const double i1 = trace(a), i2 = 0.5 * (i1 * i1 - ddot(a, a)), i3 = det(a);
    poly.observe(std::abs(i1 - (l[0] + l[1] + l[2])) / n);
    poly.observe(std::abs(i2 - (l[0] * l[1] + l[1] * l[2] + l[0] * l[2])) / (n * n));
    poly.observe(std::abs(i3 - l[0] * l[1] * l[2]) / (n * n * n));
  }
  out.push_back(recon.result());
  out.push_back(proj.result());
  out.push_back(poly.result());

  Check det_exp("tensor_core", "exp_determinant_trace", 1e-10);
  Check exp_inv("tensor_core", "exp_inverse_pair", 1e-10);
  for (int s = 0; s < 1000; ++s) {
    auto a = sampling::symmetric(rng);
    a *= sampling::uniform(rng, 0.0, 5.0) / norm(a);
    const auto e = exp_sym(a);
    const double ref = std::exp(trace(a));
    det_exp.observe(std::abs(det(e) - ref) / ref);
    exp_inv.observe(frob(mat_sub(matmul(e, exp_sym(-a)), to_matrix(SymTensor3::identity()))));
  }
  out.push_back(det_exp.result());
  out.push_back(exp_inv.result());

  Check root("tensor_core", "sqrt_square", 1e-12);
  for (int s = 0; s < 1000; ++s) {
    const auto a = sampling::spd(rng, 1e-3, 1e3);
    const auto r = sqrt_spd(a);
    root.observe(frob(mat_sub(matmul(r, r), to_matrix(a))) / norm(a));
  }
  out.push_back(root.result());
}

// ----------------------------------------------------------------- energy_net

void energy_checks(Rng& rng, std::vector<CheckResult>& out) {
  Check normal("energy_net", "energy_normalization", 0.0);
  for (int s = 0; s < 100; ++s) {
    const auto w = random_energy(rng);
    const auto id = SymTensor3::identity();
    normal.observe(std::abs(psi(id, w)));
    normal.observe(norm(dpsi_dce(id, w)));
    normal.observe(norm(second_pk(id, id, w)));
  }
  out.push_back(normal.result());

  Check iso("energy_net", "energy_isotropy", 1e-10);
  for (int s = 0; s < 100; ++s) {
    const auto w = random_energy(rng);
    const auto c = sampling::spd(rng);
    const double p = psi(c, w);
    iso.observe(std::abs(psi(sampling::rotate(sampling::rotation(rng), c), w) - p) / std::max(1.0, std::abs(p)));
  }
  out.push_back(iso.result());

  // Tension side: J^w01 dominates and the excess reaches 1e3 w02. Compression
  // side: the barrier is -w01 ln J, so the check asserts the exact logarithmic
  // lower bound and monotone growth towards J -> 0.
  Check growth("energy_net", "energy_volumetric_growth", 0.0);
  for (int s = 0; s < 100; ++s) {
    auto w = random_energy(rng, 1.0);
    w.w02 = sampling::uniform(rng, 0.01, 1.0);
    const auto vol = [&](double j) { return psi(SymTensor3::identity() * std::cbrt(j), w); };
    const double base = vol(1.0);
    growth.observe(std::max(0.0, 1e3 * w.w02 - (vol(1e6) - base)) / w.w02);
    const double bound = w.w02 * (w.w01 * std::log(1e6) - 1.0);
    growth.observe(std::max(0.0, bound * (1.0 - 1e-12) - (vol(1e-6) - base)) / w.w02);
    double prev = base;
    for (double j = 1e-2; j >= 1e-12; j *= 1e-2) {
      const double v = vol(j);
      growth.observe(std::max(0.0, prev - v));
      prev = v;
    }
  }
  out.push_back(growth.result());

  Check fd("energy_net", "energy_derivative_fd", 1e-6);
  for (int s = 0; s < 100; ++s) {
    const auto w = random_energy(rng);
    const auto c = sampling::spd(rng);
    const auto an = dpsi_dce(c, w);
    SymTensor3 num;
    const double h = 1e-6;
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) {
        auto cp = c, cm = c;
        cp(i, j) += h;
        cm(i, j) -= h;
        const double d = (psi(cp, w) - psi(cm, w)) / (2.0 * h);
        num(i, j) = i == j ? d : 0.5 * d;
      }
    fd.observe(rel(num, an));
  }
  out.push_back(fd.result());

  Check hess("energy_net", "moduli_hessian_identity", 1e-4);
  for (int s = 0; s < 100; ++s) {
    auto w = random_energy(rng, 0.2);
    if (std::abs(w.w11) < 0.2) w.w11 = 0.2;
    const auto m = moduli(w);
    const auto f = [&](const Vec3<double>& xi) {
      return psi(SymTensor3::diagonal(xi[0] * xi[0], xi[1] * xi[1], xi[2] * xi[2]), w);
    };
    const double h = 1e-4;
    const double scale = m.kappa + 4.0 * m.mu / 3.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        auto at = [&](double di, double dj) {
          Vec3<double> xi{1.0, 1.0, 1.0};
          xi[i] += di;
          xi[j] += dj;
          return f(xi);
        };
        const double d2 = (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4.0 * h * h);
        const double ref = m.kappa - 2.0 * m.mu / 3.0 + (i == j ? 2.0 * m.mu : 0.0);
        hess.observe(std::abs(d2 - ref) / scale);
      }
  }
  out.push_back(hess.result());
}

// -------------------------------------------------------------- potential_net

void potential_checks(Rng& rng, std::vector<CheckResult>& out) {
  Check nonneg("potential_net", "potential_nonnegative", 1e-14);
  for (int s = 0; s < 10000; ++s) {
    const auto w = random_potential(rng);
    nonneg.observe(std::abs(phi_hat(SymTensor3::zero(), w)));
    nonneg.observe(std::max(0.0, -phi_hat(sampling::symmetric(rng, 10.0), w)));
  }
  out.push_back(nonneg.result());

  Check convex("potential_net", "potential_convexity", 1e-10);
  for (int s = 0; s < 1000; ++s) {
    const auto w = random_potential(rng);
    const auto a = sampling::symmetric(rng, 10.0);
    const auto b = sampling::symmetric(rng, 10.0);
    const double pa = phi_hat(a, w), pb = phi_hat(b, w);
    for (double t : {0.25, 0.5, 0.75})
      convex.observe(std::max(0.0, phi_hat(a * t + b * (1.0 - t), w) - t * pa - (1.0 - t) * pb));
  }
  out.push_back(convex.result());

  Check diss("potential_net", "potential_dissipation_sign", 1e-10);
  Check iso("potential_net", "potential_isotropy", 1e-10);
  for (int s = 0; s < 10000; ++s) {
    const auto w = random_potential(rng);
    const auto a = sampling::symmetric(rng, 10.0);
    const double p = phi_hat(a, w);
    diss.observe(std::max(0.0, p - ddot(dphihat_dsigma(a, w), a)));
    iso.observe(std::abs(phi_hat(sampling::rotate(sampling::rotation(rng), a), w) - p));
  }
  out.push_back(diss.result());
  out.push_back(iso.result());

  Check shear("potential_net", "shear_neuron_degeneracy", 0.0);
  for (int s = 0; s < 10000; ++s) {
    const auto st = principal_state(sampling::symmetric(rng, 10.0));
    const double w3 = sampling::uniform(rng, 0.0, 2.0);
    for (double tau : st.tau) {
      shear.observe(std::max(0.0, -tau));
      const auto neg = activations(tau, ActivationMode::NegMax, w3);
      const auto abs = activations(tau, ActivationMode::Abs, w3);
      shear.observe(std::abs(neg.first));
      shear.observe(std::abs(neg.tension - tau));
      shear.observe(std::abs(abs.first - abs.tension));
    }
  }
  out.push_back(shear.result());

  Check trace_free("potential_net", "shear_flow_trace_free", 1e-14);
  for (int s = 0; s < 10000; ++s) {
    auto w = random_potential(rng);
    w.sigma1 = w.sigma2 = w.sigma4 = 0.0;
    const auto g = dphihat_dsigma(sampling::symmetric(rng, 10.0), w);
    trace_free.observe(std::abs(trace(g)) / std::max(1.0, norm(g)));
  }
  out.push_back(trace_free.result());
}

// ------------------------------------------------------------- material_point

void material_point_checks(std::vector<CheckResult>& out) {
  const auto l2 = presets::stripe_l2();
  const SolverOptions opts;

  Check resid("material_point", "homeostatic_residual", opts.eps);
  Check iters("material_point", "newton_iterations_within_limit", 0.0);
  Check spd("material_point", "growth_tensor_spd", 0.0);
  Check root("material_point", "growth_root_consistency", 1e-12);
  Check diss("material_point", "dissipation_sign", 0.0);
  const auto record = [&](const LoadingProtocol& p, const Trajectory& tr, const PotentialWeights& pw) {
    for (std::size_t n = 0; n < tr.size(); ++n) {
      const auto& st = tr.steps[n];
      const auto& gs = tr.states[n];
      spd.observe(is_spd(gs.cg) ? 0.0 : 1.0);
      root.observe(frob(mat_sub(matmul(gs.ug, gs.ug), to_matrix(gs.cg))) / norm(gs.cg));
      if (n == 0) continue;
      resid.observe(std::abs(st.residual));
      iters.observe(std::max(0, st.newton_iters - opts.max_iter));
      // D̄g = γ̂ ∂φ̂/∂Σ̄ at the previous state; Σ̄_n : ∂φ̂/∂Σ̄ ≥ φ̂ ≥ 0 fixes the sign.
      const auto& prev = tr.steps[n - 1].sigma_bar;
      const double power = st.gamma_hat * ddot(prev, dphihat_dsigma(prev, pw));
      const bool agree = power == 0.0 || (power > 0.0) == (st.gamma_hat > 0.0);
      diss.observe(agree ? 0.0 : 1.0);
    }
    (void)p;
  };
  try {
    const auto p1 = presets::stripe();
    record(p1, simulate(p1, l2.energy, l2.potential, opts), l2.potential);
    const auto c2 = presets::cross_l2();
    const auto p2 = presets::cross();
    record(p2, simulate(p2, c2.energy, c2.potential, opts), c2.potential);
  } catch (const Error& e) {
    resid.fail(e.what());
  }
  out.push_back(resid.result());
  out.push_back(iters.result());
  out.push_back(spd.result());
  out.push_back(root.result());
  out.push_back(diss.result());

  Check detc("material_point", "determinant_preservation_shear_flow", 1e-12);
  try {
    auto pw = l2.potential;
    pw.sigma1 = pw.sigma2 = pw.sigma4 = 0.0;
    const auto p = presets::step_protocol(0.1, 20.0, 1e9, {1.0, 1.0, 1.0},
                                          {Constraint::Measured, Constraint::ZeroStress, Constraint::ZeroStress});
    const auto tr = simulate(p, l2.energy, pw, opts);
    const double d0 = det(tr.states.front().cg);
    for (const auto& s : tr.states) detc.observe(std::abs(det(s.cg) - d0) / d0);
  } catch (const Error& e) {
    detc.fail(e.what());
  }
  out.push_back(detc.result());

  Check steady("material_point", "steady_state_homeostasis", 1e-4);
  Check mono("material_point", "steady_state_monotone", 1e-12);
  try {
    const auto p = presets::step_protocol(0.1, 40.0, 1e9, {1.0, 1.0, 1.0},
                                          {Constraint::Measured, Constraint::ZeroStress, Constraint::ZeroStress});
    const auto tr = simulate(p, l2.energy, l2.potential, opts);
    double peak = 0.0;
    std::size_t at = 0;
    for (std::size_t n = 0; n < tr.size(); ++n)
      if (std::abs(tr.steps[n].gamma_hat) > peak) {
        peak = std::abs(tr.steps[n].gamma_hat);
        at = n;
      }
    steady.observe(std::abs(tr.steps.back().gamma_hat) / peak);
    for (std::size_t n = at + 1; n < tr.size(); ++n)
      mono.observe(std::max(0.0, std::abs(tr.steps[n].phi_hat_value - 1.0) -
                                     std::abs(tr.steps[n - 1].phi_hat_value - 1.0)));
  } catch (const Error& e) {
    steady.fail(e.what());
    mono.fail(e.what());
  }
  out.push_back(steady.result());
  out.push_back(mono.result());

  Check rate("material_point", "rate_independent_limit", opts.eps);
  try {
    auto pw = l2.potential;
    pw.eta_hat = 0.0;
    const auto p = presets::stripe(0.1, 40.0);
    const auto tr = simulate(p, l2.energy, pw, opts);
    for (std::size_t n = 1; n < tr.size(); ++n) rate.observe(std::abs(tr.steps[n].phi_hat_value - 1.0));
  } catch (const Error& e) {
    rate.fail(e.what());
  }
  out.push_back(rate.result());
}

// ------------------------------------------------------------------ discovery

Dataset synthetic_stripe(const presets::WeightSet& w, double dt, double t_end) {
  const auto p = presets::stripe(dt, t_end);
  return {{io::to_experiment(p, simulate(p, w.energy, w.potential))}};
}

void discovery_checks(Rng& rng, std::uint64_t seed, std::vector<CheckResult>& out) {
  const auto l2 = presets::stripe_l2();
  Check self("discovery", "data_loss_self_consistency", 1e-12);
  try {
    auto data = synthetic_stripe(l2, 0.5, 40.0);
    self.observe(data_loss(l2.energy, l2.potential, data));
    const double d = 0.37;
    for (auto& s : data.experiments[0].stress) s[0] += d;
    self.observe(std::abs(data_loss(l2.energy, l2.potential, data) - d * d) / (d * d));
  } catch (const Error& e) {
    self.fail(e.what());
  }
  out.push_back(self.result());

  Check mask("discovery", "penalty_respects_mask", 0.0);
  for (RegMode mode : {RegMode::L1, RegMode::L2, RegMode::None}) {
    TrainConfig cfg;
    cfg.reg_mode = mode;
    cfg.reg_strength = default_reg_strength(mode);
    for (int s = 0; s < 100; ++s) {
      const auto th = initial_theta(seed + std::uint64_t(s));
      const auto m = constrain(th);
      const double base = penalty(m.energy, m.potential, cfg);
      for (std::size_t k = 0; k < kNumWeights; ++k) {
        if (cfg.mask[k] != RegFlag::Free) continue;
        auto t2 = th;
        t2[k] += sampling::uniform(rng, -1.0, 1.0);
        const auto m2 = constrain(t2);
        mask.observe(std::abs(penalty(m2.energy, m2.potential, cfg) - base));
      }
    }
  }
  out.push_back(mask.result());

  Check grad("discovery", "gradient_ad_vs_fd", 1e-4);
  try {
    const auto data = synthetic_stripe(l2, 0.5, 30.0);
    TrainConfig cfg;
    for (int s = 0; s < 10; ++s) {
      const auto th = initial_theta(seed * 1000 + std::uint64_t(s));
      cfg.gradient_mode = GradientMode::ForwardAD;
      const auto ad = gradient(th, data, cfg);
      cfg.gradient_mode = GradientMode::FiniteDiff;
      const auto fd = gradient(th, data, cfg);
      for (std::size_t k = 0; k < kNumWeights; ++k)
        grad.observe(std::abs(ad[k] - fd[k]) / (std::abs(fd[k]) + 1e-10));
    }
  } catch (const Error& e) {
    grad.fail(e.what());
  }
  out.push_back(grad.result());

  Check sound("discovery", "reparameterization_nonnegative", 0.0);
  Check determ("discovery", "training_determinism", 0.0);
  try {
    const auto data = synthetic_stripe(l2, 1.0, 30.0);
    TrainConfig cfg;
    cfg.epochs = 15;
    cfg.seed = seed;
    const auto a = train(data, cfg);
    const auto b = train(data, cfg);
    for (std::size_t e = 0; e < a.loss.size(); ++e) determ.observe(std::abs(a.loss.total[e] - b.loss.total[e]));
    const auto w = weight_array(a.energy, a.potential);
    for (std::size_t k = 0; k < kNumWeights; ++k)
      if (k != kW11) sound.observe(std::max(0.0, -w[k]));
  } catch (const Error& e) {
    sound.fail(e.what());
    determ.fail(e.what());
  }
  out.push_back(sound.result());
  out.push_back(determ.result());
}

// --------------------------------------------------------------------- cli_io

void io_checks(Rng& rng, std::vector<CheckResult>& out) {
  Check csv("cli_io", "prediction_csv_roundtrip", 1e-12);
  try {
    const auto l2 = presets::stripe_l2();
    const auto p = presets::stripe(0.1, 40.0);
    const auto tr = simulate(p, l2.energy, l2.potential);
    std::stringstream ss;
    io::write_prediction(ss, tr);
    const auto rows = io::parse_prediction(ss);
    if (rows.size() != tr.size()) csv.fail("row count differs");
    const auto r = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); };
    for (std::size_t n = 0; n < std::min(rows.size(), tr.size()); ++n) {
      const auto& s = tr.steps[n];
      csv.observe(r(rows[n].time_h, tr.times[n]));
      for (int i = 0; i < 3; ++i) csv.observe(s.s_reported(i, i) == 0.0 ? std::abs(rows[n].s[i]) : r(rows[n].s[i], s.s_reported(i, i)));
      csv.observe(s.gamma_hat == 0.0 ? std::abs(rows[n].gamma_hat) : r(rows[n].gamma_hat, s.gamma_hat));
      csv.observe(r(rows[n].det_cg, det(tr.states[n].cg)));
    }
  } catch (const Error& e) {
    csv.fail(e.what());
  }
  out.push_back(csv.result());

  Check weights("cli_io", "weights_document_roundtrip", 1e-12);
  try {
    for (int s = 0; s < 100; ++s) {
      io::WeightsDocument doc{random_energy(rng), random_potential(rng)};
      const auto back = io::parse_weights(io::format_weights(doc));
      const auto a = weight_array(doc.energy, doc.potential);
      const auto b = weight_array(back.energy, back.potential);
      for (std::size_t k = 0; k < kNumWeights; ++k) weights.observe(std::abs(a[k] - b[k]) / std::max(std::abs(a[k]), 1e-300));
      weights.observe(doc.potential.mode == back.potential.mode ? 0.0 : 1.0);
    }
  } catch (const Error& e) {
    weights.fail(e.what());
  }
  out.push_back(weights.result());
}

}  // namespace

VerifyReport run_verify(std::uint64_t seed) {
  VerifyReport report;
  report.seed = seed;
  Rng rng(seed);
  tensor_checks(rng, report.checks);
  energy_checks(rng, report.checks);
  potential_checks(rng, report.checks);
  material_point_checks(report.checks);
  discovery_checks(rng, seed, report.checks);
  io_checks(rng, report.checks);
  return report;
}

void write_report(std::ostream& out, const VerifyReport& report) {
  out << "homeo verify report\n";
  out << "seed: " << report.seed << "\n\n";
  char line[256];
  std::snprintf(line, sizeof line, "%-15s %-38s %8s %14s %10s  %s\n", "module", "check", "count", "max_violation",
                "tolerance", "result");
  out << line;
  std::size_t passed = 0;
  for (const auto& c : report.checks) {
    std::snprintf(line, sizeof line, "%-15s %-38s %8zu %14.3e %10.1e  %s", c.module.c_str(), c.name.c_str(), c.count,
                  c.max_violation, c.tolerance, c.pass ? "PASS" : "FAIL");
    out << line;
    if (!c.note.empty()) out << "  (" << c.note << ")";
    out << '\n';
    passed += c.pass ? 1 : 0;
  }
  out << "\nsummary: " << passed << "/" << report.checks.size() << " checks passed\n";
}

}  // namespace homeo
