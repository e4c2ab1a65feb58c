#include "gasrom/config_io.hpp"

#include <json.hpp>

#include <set>

#include "gasrom/error.hpp"

namespace gasrom {

namespace {

using nlohmann::json;

void reject_unknown(const json& object, const std::string& section, std::initializer_list<std::string_view> known) {
  if (!object.is_object()) throw ConfigError("'" + section + "' must be an object");
  for (const auto& [key, value] : object.items()) {
    bool found = false;
    for (auto k : known) found = found || key == k;
    if (!found) throw ConfigError("unknown key '" + (section.empty() ? key : section + "." + key) + "'");
  }
}

template <typename T>
T get(const json& object, const char* key, const std::string& section, T fallback) {
  if (!object.contains(key) || object.at(key).is_null()) return fallback;
  try {
    return object.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("'" + section + "." + key + "' has the wrong type: " + object.at(key).dump());
  }
}

double get_number(const json& object, const char* key, const std::string& section, double fallback) {
  if (!object.contains(key) || object.at(key).is_null()) return fallback;
  if (!object.at(key).is_number()) {
    throw ConfigError("'" + section + "." + key + "' must be a number, got " + object.at(key).dump());
  }
  return object.at(key).get<double>();
}

std::int64_t get_integer(const json& object, const char* key, const std::string& section, std::int64_t fallback) {
  if (!object.contains(key) || object.at(key).is_null()) return fallback;
  const auto& v = object.at(key);
  if (!v.is_number_integer()) throw ConfigError("'" + section + "." + key + "' must be an integer, got " + v.dump());
  return v.get<std::int64_t>();
}

std::size_t get_count(const json& object, const char* key, const std::string& section, std::size_t fallback) {
  const auto v = get_integer(object, key, section, static_cast<std::int64_t>(fallback));
  if (v < 0) throw ConfigError("'" + section + "." + key + "' must be non-negative");
  return static_cast<std::size_t>(v);
}

const json& section_of(const json& root, const char* name) {
  static const json empty = json::object();
  if (!root.contains(name) || root.at(name).is_null()) return empty;
  return root.at(name);
}

json parse_value(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception&) {
    return json(text);
  }
}

void apply_override(json& root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "' is not of the form key.path=value");
  }
  const std::string path = assignment.substr(0, eq);
  json* node = &root;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ConfigError("override '" + assignment + "' has an empty key segment");
    if (node->is_null()) *node = json::object();
    if (!node->is_object()) throw ConfigError("override '" + path + "' descends into a non-object value");
    node = &(*node)[key];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  *node = parse_value(assignment.substr(eq + 1));
}

FrictionModel parse_friction_model(const std::string& s) {
  if (s == "constant") return FrictionModel::Constant;
  if (s == "blasius") return FrictionModel::Blasius;
  throw ConfigError("solver.friction_model must be \"constant\" or \"blasius\", got \"" + s + "\"");
}

BoundaryMode parse_boundary(const std::string& s) {
  if (s == "inlet_outlet") return BoundaryMode::InletOutlet;
  if (s == "closed") return BoundaryMode::Closed;
  throw ConfigError("solver.boundary must be \"inlet_outlet\" or \"closed\", got \"" + s + "\"");
}

InletShape parse_shape(const std::string& s) {
  if (s == "sinusoid") return InletShape::Sinusoid;
  if (s == "trapezoid") return InletShape::Trapezoid;
  throw ConfigError("solver.inlet.shape must be \"sinusoid\" or \"trapezoid\", got \"" + s + "\"");
}

InputMode parse_input_mode(const std::string& s) {
  if (s == "folded") return InputMode::Folded;
  if (s == "inlet") return InputMode::Inlet;
  throw ConfigError("opinf.input_mode must be \"folded\" or \"inlet\", got \"" + s + "\"");
}

void read_solver(const json& s, ExperimentConfig& config) {
  reject_unknown(s, "solver",
                 {"length", "diameter", "density", "viscosity", "sound_speed", "n_cells", "friction", "friction_model",
                  "outlet_pressure", "snapshot_interval", "n_snapshots", "cfl", "warmup", "initial_noise", "seed",
                  "boundary", "inlet"});
  auto& c = config.solver;
  const std::string sec = "solver";
  c.geometry.length = get_number(s, "length", sec, c.geometry.length);
  c.geometry.diameter = get_number(s, "diameter", sec, c.geometry.diameter);
  c.fluid.density = get_number(s, "density", sec, c.fluid.density);
  c.fluid.dynamic_viscosity = get_number(s, "viscosity", sec, c.fluid.dynamic_viscosity);
  c.fluid.sound_speed = get_number(s, "sound_speed", sec, c.fluid.sound_speed);
  c.n_cells = get_count(s, "n_cells", sec, c.n_cells);
  c.friction = get_number(s, "friction", sec, c.friction);
  if (s.contains("friction_model")) c.friction_model = parse_friction_model(get<std::string>(s, "friction_model", sec, ""));
  c.outlet_pressure = get_number(s, "outlet_pressure", sec, c.outlet_pressure);
  c.snapshot_interval = get_number(s, "snapshot_interval", sec, c.snapshot_interval);
  c.n_snapshots = get_count(s, "n_snapshots", sec, c.n_snapshots);
  c.cfl = get_number(s, "cfl", sec, c.cfl);
  c.warmup = get_number(s, "warmup", sec, c.warmup);
  c.initial_noise = get_number(s, "initial_noise", sec, c.initial_noise);
  const auto seed = get_integer(s, "seed", sec, static_cast<std::int64_t>(c.seed));
  if (seed < 0) throw ConfigError("solver.seed must be non-negative");
  c.seed = static_cast<std::uint64_t>(seed);
  if (s.contains("boundary")) c.boundary = parse_boundary(get<std::string>(s, "boundary", sec, ""));

  const json& in = section_of(s, "inlet");
  reject_unknown(in, "solver.inlet", {"base_velocity", "amplitude", "period", "shape"});
  const std::string isec = "solver.inlet";
  auto& p = config.inlet;
  p.base_velocity = get_number(in, "base_velocity", isec, p.base_velocity);
  p.amplitude = get_number(in, "amplitude", isec, p.amplitude);
  p.period = get_number(in, "period", isec, p.period);
  if (in.contains("shape")) p.shape = parse_shape(get<std::string>(in, "shape", isec, ""));
}

void read_features(const json& f, ExperimentConfig& config) {
  reject_unknown(f, "features", {"sets"});
  if (!f.contains("sets")) return;
  const auto& sets = f.at("sets");
  if (!sets.is_array()) throw ConfigError("'features.sets' must be an array of arrays of field names");
  config.feature_sets.clear();
  for (const auto& set : sets) {
    // A flat list of names is accepted as a single set.
    if (set.is_string()) {
      if (config.feature_sets.empty()) config.feature_sets.emplace_back();
      config.feature_sets.front().push_back(set.get<std::string>());
      continue;
    }
    if (!set.is_array()) throw ConfigError("'features.sets' entries must be arrays of field names");
    std::vector<std::string> names;
    std::set<std::string> seen;
    for (const auto& name : set) {
      if (!name.is_string()) throw ConfigError("feature names must be strings, got " + name.dump());
      if (!seen.insert(name.get<std::string>()).second) {
        throw ConfigError("duplicate feature '" + name.get<std::string>() + "'");
      }
      names.push_back(name.get<std::string>());
    }
    config.feature_sets.push_back(std::move(names));
  }
}

void read_reduction(const json& r, ExperimentConfig& config) {
  reject_unknown(r, "reduction", {"energy_threshold", "max_rank", "rank"});
  config.rank.threshold = get_number(r, "energy_threshold", "reduction", config.rank.threshold);
  config.rank.max_rank = get_integer(r, "max_rank", "reduction", config.rank.max_rank);
  if (r.contains("rank") && !r.at("rank").is_null()) config.rank.fixed = get_integer(r, "rank", "reduction", 0);
}

void read_opinf(const json& o, ExperimentConfig& config) {
  reject_unknown(o, "opinf", {"operators", "lambda_grid", "input_mode", "input_period"});
  if (o.contains("input_mode")) config.input_mode = parse_input_mode(get<std::string>(o, "input_mode", "opinf", ""));
  if (o.contains("operators")) {
    try {
      config.operators = OperatorSet::parse(get<std::string>(o, "operators", "opinf", ""));
    } catch (const Error& e) {
      throw ConfigError(std::string("opinf.operators: ") + e.what());
    }
  } else {
    config.operators.input = config.input_mode == InputMode::Inlet;
  }
  if (o.contains("lambda_grid")) {
    const auto& g = o.at("lambda_grid");
    if (!g.is_array()) throw ConfigError("'opinf.lambda_grid' must be an array of numbers");
    config.regularization.grid.clear();
    for (const auto& v : g) {
      if (!v.is_number()) throw ConfigError("'opinf.lambda_grid' entries must be numbers, got " + v.dump());
      config.regularization.grid.push_back(v.get<double>());
    }
  }
  if (o.contains("input_period") && !o.at("input_period").is_null()) {
    config.input_period = get_number(o, "input_period", "opinf", 0.0);
  }
}

void read_bench(const json& b, ExperimentConfig& config) {
  reject_unknown(b, "bench", {"methods", "block", "split", "data", "external"});
  if (b.contains("methods")) {
    const auto& m = b.at("methods");
    if (!m.is_array()) throw ConfigError("'bench.methods' must be an array of method names");
    config.methods.clear();
    for (const auto& name : m) {
      if (!name.is_string()) throw ConfigError("method names must be strings, got " + name.dump());
      config.methods.push_back(name.get<std::string>());
    }
  }
  config.block = get_integer(b, "block", "bench", config.block);
  if (b.contains("split")) {
    const auto& s = b.at("split");
    if (!s.is_array() || s.size() != 3 || !s[0].is_number() || !s[1].is_number() || !s[2].is_number()) {
      throw ConfigError("'bench.split' must be [train, validation, test] ratios");
    }
    config.split = {s[0].get<double>(), s[1].get<double>(), s[2].get<double>()};
  }
  if (b.contains("data") && !b.at("data").is_null()) config.data_path = get<std::string>(b, "data", "bench", "");
  if (b.contains("external")) {
    const auto& e = b.at("external");
    if (!e.is_array()) throw ConfigError("'bench.external' must be an array of {name, path}");
    for (const auto& item : e) {
      reject_unknown(item, "bench.external[]", {"name", "path"});
      ExternalPrediction ext;
      ext.name = get<std::string>(item, "name", "bench.external[]", "");
      ext.path = get<std::string>(item, "path", "bench.external[]", "");
      if (ext.name.empty() || ext.path.empty()) throw ConfigError("bench.external entries need a name and a path");
      config.external.push_back(std::move(ext));
    }
  }
}

const char* to_string(FrictionModel m) { return m == FrictionModel::Constant ? "constant" : "blasius"; }
const char* to_string(BoundaryMode m) { return m == BoundaryMode::InletOutlet ? "inlet_outlet" : "closed"; }
const char* to_string(InletShape s) { return s == InletShape::Sinusoid ? "sinusoid" : "trapezoid"; }
const char* to_string(InputMode m) { return m == InputMode::Folded ? "folded" : "inlet"; }

}  // namespace

ExperimentConfig parse_experiment_config(std::string_view json_text, std::span<const std::string> overrides) {
  json root = json::object();
  if (json_text.find_first_not_of(" \t\r\n") != std::string_view::npos) {
    try {
      root = json::parse(json_text);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
  }
  if (!root.is_object()) throw ConfigError("config root must be a JSON object");
  for (const auto& o : overrides) apply_override(root, o);

  reject_unknown(root, "", {"solver", "features", "reduction", "opinf", "bench"});
  ExperimentConfig config;
  read_solver(section_of(root, "solver"), config);
  read_features(section_of(root, "features"), config);
  read_reduction(section_of(root, "reduction"), config);
  read_opinf(section_of(root, "opinf"), config);
  read_bench(section_of(root, "bench"), config);
  try {
    config.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return config;
}

std::string experiment_config_to_json(const ExperimentConfig& config) {
  const auto& s = config.solver;
  const auto& in = config.inlet;
  json root;
  root["solver"] = {
      {"length", s.geometry.length},
      {"diameter", s.geometry.diameter},
      {"density", s.fluid.density},
      {"viscosity", s.fluid.dynamic_viscosity},
      {"sound_speed", s.fluid.sound_speed},
      {"n_cells", s.n_cells},
      {"friction", s.friction},
      {"friction_model", to_string(s.friction_model)},
      {"outlet_pressure", s.outlet_pressure},
      {"snapshot_interval", s.snapshot_interval},
      {"n_snapshots", s.n_snapshots},
      {"cfl", s.cfl},
      {"warmup", s.warmup},
      {"initial_noise", s.initial_noise},
      {"seed", s.seed},
      {"boundary", to_string(s.boundary)},
      {"inlet",
       {{"base_velocity", in.base_velocity},
        {"amplitude", in.amplitude},
        {"period", in.period},
        {"shape", to_string(in.shape)}}},
  };
  root["features"] = {{"sets", config.feature_sets}};
  root["reduction"] = {{"energy_threshold", config.rank.threshold},
                       {"max_rank", config.rank.max_rank},
                       {"rank", config.rank.fixed ? json(*config.rank.fixed) : json(nullptr)}};
  root["opinf"] = {{"operators", config.operators.letters()},
                   {"lambda_grid", config.regularization.grid},
                   {"input_mode", to_string(config.input_mode)},
                   {"input_period", config.input_period ? json(*config.input_period) : json(nullptr)}};
  json external = json::array();
  for (const auto& e : config.external) external.push_back({{"name", e.name}, {"path", e.path.string()}});
  root["bench"] = {{"methods", config.methods},
                   {"block", config.block},
                   {"split", {config.split.train, config.split.validation, config.split.test}},
                   {"data", config.data_path ? json(config.data_path->string()) : json(nullptr)},
                   {"external", external}};
  return root.dump(2);
}

}  // namespace gasrom
