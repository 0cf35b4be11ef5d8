#include "homeo/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

namespace homeo::io {

using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(std::string_view tok, const std::string& source, std::size_t line, std::string_view column) {
  double v = 0.0;
  const auto* first = tok.data();
  const auto* last = tok.data() + tok.size();
  if (!tok.empty() && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (tok.empty() || res.ec != std::errc() || res.ptr != last)
    throw ParseError(source, line, "column " + std::string(column) + ": '" + std::string(tok) + "' is not a number");
  if (!std::isfinite(v)) throw ParseError(source, line, "column " + std::string(column) + ": value is not finite");
  return v;
}

Constraint parse_mask(std::string_view tok, const std::string& source, std::size_t line) {
  if (tok == "M") return Constraint::Measured;
  if (tok == "Z") return Constraint::ZeroStress;
  throw ParseError(source, line, "mask must be M or Z, got '" + std::string(tok) + "'");
}

/// Line reader that skips blank lines and strips a UTF-8 byte-order mark.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++number_;
      if (number_ == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
      if (!trim(line).empty()) return true;
    }
    return false;
  }
  std::size_t number() const { return number_; }

 private:
  std::istream& in_;
  std::size_t number_ = 0;
};

std::string header_of(std::string_view line) {
  std::string h;
  for (auto tok : split(line)) {
    if (!h.empty()) h += ',';
    h += tok;
  }
  return h;
}

struct Table {
  bool has_stress = false;
  LoadingProtocol protocol;
  std::vector<Vec3<double>> stress;
};

Table parse_table(std::istream& in, const std::string& source, bool accept_protocol) {
  LineReader reader(in);
  std::string line;
  if (!reader.next(line)) throw ParseError(source, 1, "missing header row");
  const std::string header = header_of(line);
  Table t;
  if (header == kExperimentHeader) {
    t.has_stress = true;
  } else if (!(accept_protocol && header == kProtocolHeader)) {
    throw ParseError(source, reader.number(), "unexpected header '" + header + "'");
  }
  const std::size_t ncols = t.has_stress ? 10 : 7;
  const std::size_t mask_col = t.has_stress ? 7 : 4;
  static const char* names[] = {"time_h", "C11", "C22", "C33", "S11", "S22", "S33"};
  bool first = true;
  while (reader.next(line)) {
    const std::size_t ln = reader.number();
    const auto cols = split(line);
    if (cols.size() != ncols)
      throw ParseError(source, ln, "expected " + std::to_string(ncols) + " columns, got " + std::to_string(cols.size()));
    ConstraintMask mask;
    for (int i = 0; i < 3; ++i) mask[i] = parse_mask(cols[mask_col + i], source, ln);
    const double time = parse_double(cols[0], source, ln, names[0]);
    Vec3<double> c;
    for (int i = 0; i < 3; ++i) {
      c[i] = parse_double(cols[1 + i], source, ln, names[1 + i]);
      if (!(c[i] > 0.0)) throw ParseError(source, ln, std::string(names[1 + i]) + " must be positive");
    }
    if (!first && !(time > t.protocol.times.back()))
      throw ParseError(source, ln, "time_h must be strictly increasing");
    if (first) {
      t.protocol.mask = mask;
    } else if (mask != t.protocol.mask) {
      throw ParseError(source, ln, "mask differs from the first data row");
    }
    if (t.has_stress) {
      Vec3<double> s{0.0, 0.0, 0.0};
      for (int i = 0; i < 3; ++i)
        if (mask[i] == Constraint::Measured) s[i] = parse_double(cols[4 + i], source, ln, names[4 + i]);
      t.stress.push_back(s);
    }
    t.protocol.times.push_back(time);
    t.protocol.c.push_back(c);
    first = false;
  }
  if (first) throw ParseError(source, reader.number() + 1, "no data rows");
  if (std::none_of(t.protocol.mask.begin(), t.protocol.mask.end(), [](Constraint m) { return m == Constraint::Measured; }))
    throw ParseError(source, 0, "at least one direction must be measured (M)");
  return t;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput(path.string() + ": cannot open file for writing");
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json parse_json(std::string_view text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const std::size_t line = 1 + std::size_t(std::count(text.begin(), text.begin() + upto, '\n'));
    throw ParseError(source, line, "invalid JSON");
  }
}

double json_number(const json& v, const std::string& key, const std::string& source) {
  if (!v.is_number()) throw ParseError(source, 0, "'" + key + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ParseError(source, 0, "'" + key + "' must be finite");
  return d;
}

std::string json_string(const json& v, const std::string& key, const std::string& source) {
  if (!v.is_string()) throw ParseError(source, 0, "'" + key + "' must be a string");
  return v.get<std::string>();
}

ActivationMode parse_activation(const std::string& s, const std::string& source) {
  if (s == "neg_max" || s == "NEG_MAX") return ActivationMode::NegMax;
  if (s == "abs" || s == "ABS") return ActivationMode::Abs;
  throw ParseError(source, 0, "activation_mode must be 'neg_max' or 'abs', got '" + s + "'");
}

std::string activation_name(ActivationMode m) { return m == ActivationMode::Abs ? "abs" : "neg_max"; }

const std::map<std::string, std::string>& weight_aliases() {
  static const std::map<std::string, std::string> aliases = {
      {"wσ1", "wsigma1"}, {"wσ2", "wsigma2"}, {"wσ3", "wsigma3"}, {"wσ4", "wsigma4"},
      {"wτ1", "wtau1"},   {"wτ2", "wtau2"},   {"wτ3", "wtau3"},   {"wτ4", "wtau4"},
      {"ŵη", "weta_hat"}, {"ŵη", "weta_hat"},
  };
  return aliases;
}

}  // namespace

std::string read_text(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

WeightsDocument parse_weights(std::string_view text, const std::string& source) {
  const json doc = parse_json(text, source);
  if (!doc.is_object()) throw ParseError(source, 0, "weights document must be a JSON object");
  std::array<std::optional<double>, kNumWeights> values;
  ActivationMode mode = ActivationMode::NegMax;
  for (const auto& [raw_key, value] : doc.items()) {
    std::string key = raw_key;
    if (auto it = weight_aliases().find(key); it != weight_aliases().end()) key = it->second;
    if (key == "activation_mode") {
      mode = parse_activation(json_string(value, key, source), source);
      continue;
    }
    const auto it = std::find(kWeightNames.begin(), kWeightNames.end(), key);
    if (it == kWeightNames.end()) throw ParseError(source, 0, "unknown key '" + raw_key + "'");
    auto& slot = values[std::size_t(it - kWeightNames.begin())];
    if (slot) throw ParseError(source, 0, "duplicate weight '" + key + "'");
    slot = json_number(value, key, source);
  }
  for (std::size_t k = 0; k < kNumWeights; ++k)
    if (!values[k]) throw ParseError(source, 0, "missing weight '" + std::string(kWeightNames[k]) + "'");
  WeightsDocument w;
  w.energy = {*values[kW01], *values[kW02], *values[kW11], *values[kW12]};
  auto& p = w.potential;
  p.sigma1 = *values[kSigma1];
  p.sigma2 = *values[kSigma2];
  p.sigma3 = *values[kSigma3];
  p.sigma4 = *values[kSigma4];
  p.tau1 = *values[kTau1];
  p.tau2 = *values[kTau2];
  p.tau3 = *values[kTau3];
  p.tau4 = *values[kTau4];
  p.eta_hat = *values[kEtaHat];
  p.mode = mode;
  try {
    validate(w.energy);
    validate(w.potential);
  } catch (const InvalidInput& e) {
    throw ParseError(source, 0, e.what());
  }
  return w;
}

WeightsDocument read_weights(const std::filesystem::path& path) {
  return parse_weights(read_text(path), path.string());
}

std::string format_weights(const WeightsDocument& doc) {
  const auto w = weight_array(doc.energy, doc.potential);
  std::string s = "{\n";
  for (std::size_t k = 0; k < kNumWeights; ++k) s += "  \"" + std::string(kWeightNames[k]) + "\": " + num(w[k]) + ",\n";
  s += "  \"activation_mode\": \"" + activation_name(doc.potential.mode) + "\"\n}\n";
  return s;
}

void write_weights(const std::filesystem::path& path, const WeightsDocument& doc) {
  auto out = open_output(path);
  out << format_weights(doc);
}

TrainConfig parse_config(std::string_view text, const std::string& source) {
  const json doc = parse_json(text, source);
  if (!doc.is_object()) throw ParseError(source, 0, "config must be a JSON object");
  TrainConfig c;
  std::optional<double> strength;
  for (const auto& [key, value] : doc.items()) {
    if (key == "epochs") {
      if (!value.is_number_integer()) throw ParseError(source, 0, "'epochs' must be an integer");
      c.epochs = value.get<int>();
    } else if (key == "learning_rate") {
      c.learning_rate = json_number(value, key, source);
    } else if (key == "reg_mode") {
      const auto m = json_string(value, key, source);
      if (m == "L1" || m == "l1")
        c.reg_mode = RegMode::L1;
      else if (m == "L2" || m == "l2")
        c.reg_mode = RegMode::L2;
      else if (m == "none" || m == "NONE")
        c.reg_mode = RegMode::None;
      else
        throw ParseError(source, 0, "reg_mode must be L1, L2 or none, got '" + m + "'");
    } else if (key == "reg_strength") {
      strength = json_number(value, key, source);
    } else if (key == "eta_reg") {
      c.eta_reg = json_number(value, key, source);
    } else if (key == "seed") {
      if (!value.is_number_unsigned()) throw ParseError(source, 0, "'seed' must be a non-negative integer");
      c.seed = value.get<std::uint64_t>();
    } else if (key == "eps") {
      c.solver.eps = json_number(value, key, source);
    } else if (key == "max_iter") {
      if (!value.is_number_integer()) throw ParseError(source, 0, "'max_iter' must be an integer");
      c.solver.max_iter = value.get<int>();
    } else if (key == "max_dt") {
      c.solver.max_dt = json_number(value, key, source);
    } else if (key == "gradient_mode") {
      const auto m = json_string(value, key, source);
      if (m == "forward_ad" || m == "FORWARD_AD")
        c.gradient_mode = GradientMode::ForwardAD;
      else if (m == "finite_diff" || m == "FINITE_DIFF")
        c.gradient_mode = GradientMode::FiniteDiff;
      else
        throw ParseError(source, 0, "gradient_mode must be forward_ad or finite_diff, got '" + m + "'");
    } else if (key == "activation_mode") {
      c.activation = parse_activation(json_string(value, key, source), source);
    } else if (key == "initial_weights") {
      if (!value.is_object()) throw ParseError(source, 0, "'initial_weights' must be a weights object");
      const auto w = parse_weights(value.dump(), source + " (initial_weights)");
      c.initial_theta = unconstrain(w.energy, w.potential);
    } else {
      throw ParseError(source, 0, "unknown key '" + key + "'");
    }
  }
  c.reg_strength = strength ? *strength : default_reg_strength(c.reg_mode);
  try {
    c.validate();
  } catch (const InvalidInput& e) {
    throw ParseError(source, 0, e.what());
  }
  return c;
}

TrainConfig read_config(const std::filesystem::path& path) { return parse_config(read_text(path), path.string()); }

Experiment parse_experiment(std::istream& in, const std::string& source) {
  auto t = parse_table(in, source, false);
  return {std::move(t.protocol), std::move(t.stress)};
}

Experiment read_experiment(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_experiment(in, path.string());
}

LoadingProtocol parse_protocol(std::istream& in, const std::string& source) {
  return parse_table(in, source, true).protocol;
}

LoadingProtocol read_protocol(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_protocol(in, path.string());
}

void write_experiment(std::ostream& out, const Experiment& ex) {
  out << kExperimentHeader << '\n';
  const auto& p = ex.protocol;
  for (std::size_t n = 0; n < p.size(); ++n) {
    out << num(p.times[n]);
    for (int i = 0; i < 3; ++i) out << ',' << num(p.c[n][i]);
    for (int i = 0; i < 3; ++i) out << ',' << num(p.mask[i] == Constraint::Measured ? ex.stress[n][i] : 0.0);
    for (int i = 0; i < 3; ++i) out << ',' << (p.mask[i] == Constraint::Measured ? 'M' : 'Z');
    out << '\n';
  }
}

Experiment to_experiment(const LoadingProtocol& protocol, const Trajectory& traj) {
  Experiment ex{protocol, {}};
  ex.stress.reserve(traj.size());
  for (const auto& s : traj.steps) ex.stress.push_back({s.s_reported(0, 0), s.s_reported(1, 1), s.s_reported(2, 2)});
  return ex;
}

void write_prediction(std::ostream& out, const Trajectory& traj) {
  out << kPredictionHeader << '\n';
  for (std::size_t n = 0; n < traj.size(); ++n) {
    const auto& s = traj.steps[n];
    out << num(traj.times[n]) << ',' << num(s.s_reported(0, 0)) << ',' << num(s.s_reported(1, 1)) << ','
        << num(s.s_reported(2, 2)) << ',' << num(s.gamma_hat) << ',' << num(s.phi_hat_value) << ',' << s.newton_iters
        << ',' << num(det(traj.states[n].cg)) << '\n';
  }
}

std::vector<PredictionRow> parse_prediction(std::istream& in, const std::string& source) {
  LineReader reader(in);
  std::string line;
  if (!reader.next(line) || header_of(line) != kPredictionHeader)
    throw ParseError(source, reader.number(), "expected prediction header");
  std::vector<PredictionRow> rows;
  while (reader.next(line)) {
    const std::size_t ln = reader.number();
    const auto cols = split(line);
    if (cols.size() != 8) throw ParseError(source, ln, "expected 8 columns, got " + std::to_string(cols.size()));
    PredictionRow r{};
    r.time_h = parse_double(cols[0], source, ln, "time_h");
    for (int i = 0; i < 3; ++i) r.s[i] = parse_double(cols[1 + i], source, ln, "S_pred");
    r.gamma_hat = parse_double(cols[4], source, ln, "gamma_hat");
    r.phi_hat = parse_double(cols[5], source, ln, "phi_hat");
    const double iters = parse_double(cols[6], source, ln, "newton_iters");
    if (iters < 0 || iters != std::floor(iters)) throw ParseError(source, ln, "newton_iters must be a count");
    r.newton_iters = int(iters);
    r.det_cg = parse_double(cols[7], source, ln, "det_Cg");
    rows.push_back(r);
  }
  return rows;
}

void write_loss(std::ostream& out, const LossReport& loss) {
  out << kLossHeader << '\n';
  for (std::size_t e = 0; e < loss.size(); ++e)
    out << e + 1 << ',' << num(loss.total[e]) << ',' << num(loss.data[e]) << ',' << num(loss.penalty[e]) << '\n';
}

}  // namespace homeo::io
