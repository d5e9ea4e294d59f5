#include "vrabi/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "vrabi/errors.hpp"

namespace vrabi {

using nlohmann::json;

namespace {

const std::vector<std::string> kModels{"phenom-t0", "phenom-t", "microscopic", "open-cavity"};
const std::vector<std::string> kSweepKeys{"gamma", "gamma_up", "gamma1", "gamma2", "gamma3",
                                          "eps", "delta_t_us", "temperature"};

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError("config field '" + path + "': expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError("config field '" + path + "': not finite");
  return v;
}

std::string text(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError("config field '" + path + "': expected a string");
  return j.get<std::string>();
}

template <class Handler>
void each_field(const json& obj, const std::string& prefix, Handler&& handle) {
  if (!obj.is_object()) throw ConfigError("config field '" + prefix + "': expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!handle(it.key(), it.value(), path)) throw ConfigError("config field '" + path + "': unknown field");
  }
}

std::pair<int, int> line_column(const std::string& s, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < s.size(); ++i) {
    if (s[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

std::vector<double> Sweep::values() const {
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = count == 1 ? from : from + (to - from) * static_cast<double>(i) / static_cast<double>(count - 1);
  return out;
}

Sweep Sweep::parse(const std::string& t) {
  const auto eq = t.find('=');
  const auto c1 = t.find(':', eq == std::string::npos ? 0 : eq);
  const auto c2 = c1 == std::string::npos ? c1 : t.find(':', c1 + 1);
  if (eq == std::string::npos || c1 == std::string::npos || c2 == std::string::npos)
    throw ConfigError("sweep '" + t + "': expected key=from:to:count");
  Sweep s;
  s.key = t.substr(0, eq);
  if (std::find(kSweepKeys.begin(), kSweepKeys.end(), s.key) == kSweepKeys.end())
    throw ConfigError("sweep '" + t + "': '" + s.key + "' cannot be swept");
  try {
    std::size_t used = 0;
    const std::string a = t.substr(eq + 1, c1 - eq - 1), b = t.substr(c1 + 1, c2 - c1 - 1), n = t.substr(c2 + 1);
    s.from = std::stod(a, &used);
    if (used != a.size()) throw std::invalid_argument(a);
    s.to = std::stod(b, &used);
    if (used != b.size()) throw std::invalid_argument(b);
    const long long k = std::stoll(n, &used);
    if (used != n.size() || k < 1) throw std::invalid_argument(n);
    s.count = static_cast<std::size_t>(k);
  } catch (const std::logic_error&) {
    throw ConfigError("sweep '" + t + "': expected key=from:to:count with count >= 1");
  }
  return s;
}

TimeConvention parse_convention(const std::string& t) {
  if (t == "true") return TimeConvention::True;
  if (t == "effective") return TimeConvention::Effective;
  throw ConfigError("time convention '" + t + "': expected true or effective");
}

void RunConfig::validate() const {
  if (std::find(kModels.begin(), kModels.end(), model) == kModels.end())
    throw ConfigError("unknown model '" + model + "' (phenom-t0, phenom-t, microscopic, open-cavity)");
  if (profile != "gaussian" && profile != "constant")
    throw ConfigError("profile '" + profile + "': expected gaussian or constant");
  params.validate();
  geometry().validate();
  vrabi::validate(model_kind());
  if (model == "open-cavity") open_cavity().validate();
  if (!(delta_t_us >= 0.0)) throw ValidationError("delta_t_us must be >= 0");
  if (!(t_step_us > 0.0)) throw ValidationError("grid: step_us must be > 0");
  if (!(t_end_us > t_start_us)) throw ValidationError("grid: end_us must exceed start_us");
  if (t_start_us < 0.0) throw ValidationError("grid: start_us must be >= 0");
  if (n_max < 1 || n_max > 7) throw ValidationError("davies.n_max must lie in [1, 7]");
}

double RunConfig::gamma3_value() const { return gamma3 ? *gamma3 : 0.07 * params.g; }
double RunConfig::eps_value() const { return eps ? *eps : kms_ratio(params.omega0, params); }

ModelKind RunConfig::model_kind() const {
  if (model == "phenom-t0") return PhenomT0{gamma};
  if (model == "phenom-t") return gamma_up ? ModelKind{PhenomT{gamma, *gamma_up}} : ModelKind{PhenomT::from_kms(gamma, params)};
  if (model == "microscopic") return Microscopic{gamma1, gamma2};
  if (model == "open-cavity") return OpenCavity{open_cavity().rates()};
  throw ConfigError("unknown model '" + model + "' (phenom-t0, phenom-t, microscopic, open-cavity)");
}

OpenCavityParams RunConfig::open_cavity() const { return {gamma1, gamma2, gamma3_value(), eps_value()}; }

CavityGeometry RunConfig::geometry() const { return {waist_mm * 1e-3, diameter_mm * 1e-3, velocity}; }

CouplingProfile RunConfig::coupling_profile() const {
  if (profile == "constant") return ConstantProfile{};
  return GaussianProfile{geometry()};
}

RabiModelConfig RunConfig::rabi_model() const {
  RabiModelConfig c;
  c.params = params;
  c.eps = eps_value();
  c.profile = coupling_profile();
  c.gamma1 = gamma1;
  c.gamma2 = gamma2;
  c.gamma3 = gamma3_value();
  c.delta_t = delta_t_us * 1e-6;
  return c;
}

std::vector<double> RunConfig::grid_us() const {
  const auto count = static_cast<std::size_t>(std::floor((t_end_us - t_start_us) / t_step_us * (1.0 + 1e-12))) + 1;
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = t_start_us + static_cast<double>(i) * t_step_us;
  return out;
}

RunConfig RunConfig::with(const std::string& key, double v) const {
  RunConfig c = *this;
  if (key == "gamma") c.gamma = v;
  else if (key == "gamma_up") c.gamma_up = v;
  else if (key == "gamma1") c.gamma1 = v;
  else if (key == "gamma2") c.gamma2 = v;
  else if (key == "gamma3") c.gamma3 = v;
  else if (key == "eps") c.eps = v;
  else if (key == "delta_t_us") c.delta_t_us = v;
  else if (key == "temperature") c.params.temperature = v;
  else throw ConfigError("'" + key + "' cannot be swept");
  return c;
}

RunConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(json_text, e.byte);
    throw ConfigError("config: line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + e.what());
  }
  RunConfig c;
  each_field(root, "", [&](const std::string& k, const json& v, const std::string& path) {
    if (k == "model") c.model = text(v, path);
    else if (k == "profile") c.profile = text(v, path);
    else if (k == "delta_t_us") c.delta_t_us = number(v, path);
    else if (k == "time_convention") c.convention = parse_convention(text(v, path));
    else if (k == "output") c.output = text(v, path);
    else if (k == "input") c.input = text(v, path);
    else if (k == "sweep") c.sweep = Sweep::parse(text(v, path));
    else if (k == "n_steps") {
      const double n = number(v, path);
      if (n < 0 || n != std::floor(n)) throw ConfigError("config field '" + path + "': expected a count >= 0");
      c.n_steps = static_cast<std::size_t>(n);
    } else if (k == "rates") {
      each_field(v, path, [&](const std::string& rk, const json& rv, const std::string& rp) {
        const double x = number(rv, rp);
        if (rk == "gamma") c.gamma = x;
        else if (rk == "gamma_up") c.gamma_up = x;
        else if (rk == "gamma1") c.gamma1 = x;
        else if (rk == "gamma2") c.gamma2 = x;
        else if (rk == "gamma3") c.gamma3 = x;
        else if (rk == "eps") c.eps = x;
        else return false;
        return true;
      });
    } else if (k == "physics") {
      each_field(v, path, [&](const std::string& pk, const json& pv, const std::string& pp) {
        const double x = number(pv, pp);
        if (pk == "omega0") c.params.omega0 = x;
        else if (pk == "g") c.params.g = x;
        else if (pk == "temperature_K") c.params.temperature = x;
        else return false;
        return true;
      });
    } else if (k == "geometry") {
      each_field(v, path, [&](const std::string& gk, const json& gv, const std::string& gp) {
        const double x = number(gv, gp);
        if (gk == "waist_mm") c.waist_mm = x;
        else if (gk == "diameter_mm") c.diameter_mm = x;
        else if (gk == "velocity_m_s") c.velocity = x;
        else return false;
        return true;
      });
    } else if (k == "grid") {
      each_field(v, path, [&](const std::string& gk, const json& gv, const std::string& gp) {
        const double x = number(gv, gp);
        if (gk == "start_us") c.t_start_us = x;
        else if (gk == "end_us") c.t_end_us = x;
        else if (gk == "step_us") c.t_step_us = x;
        else return false;
        return true;
      });
    } else if (k == "fit") {
      each_field(v, path, [&](const std::string& fk, const json& fv, const std::string& fp) {
        if (fk == "free") {
          if (!fv.is_array()) throw ConfigError("config field '" + fp + "': expected an array of names");
          c.free.clear();
          for (std::size_t i = 0; i < fv.size(); ++i) c.free.push_back(text(fv[i], fp + "[" + std::to_string(i) + "]"));
        } else if (fk == "tie_gamma12") {
          if (!fv.is_boolean()) throw ConfigError("config field '" + fp + "': expected true or false");
          c.tie_gamma12 = fv.get<bool>();
        } else {
          return false;
        }
        return true;
      });
    } else if (k == "davies") {
      each_field(v, path, [&](const std::string& dk, const json& dv, const std::string& dp) {
        const double x = number(dv, dp);
        if (dk == "alpha") c.alpha = x;
        else if (dk == "beta") c.beta = x;
        else if (dk == "n_max") {
          if (x != std::floor(x)) throw ConfigError("config field '" + dp + "': expected an integer");
          c.n_max = static_cast<int>(x);
        } else return false;
        return true;
      });
    } else {
      return false;
    }
    return true;
  });
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace vrabi
