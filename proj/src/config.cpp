#include "p2stc/config.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

namespace p2stc {

using nlohmann::json;

namespace {

const std::vector<std::string> kKnownKeys = {"id",           "generators", "matrix",  "n_tx",          "n_rx",
                                             "L",            "frame_info_bits", "eb_n0_db", "metric", "beta",
                                             "min_frame_errors", "max_frames", "seed", "workers", "batch_frames",
                                             "noiseless"};

std::string matrix_field(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string out;
    for (const auto& row : v) {
      if (!out.empty()) out.push_back('/');
      out += row.get<std::string>();
    }
    return out;
  }
  throw std::invalid_argument("config: matrix must be a name, a row string, or a list of rows");
}

}  // namespace

SimScenario scenario_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: scenario must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (std::find(kKnownKeys.begin(), kKnownKeys.end(), key) == kKnownKeys.end())
      throw std::invalid_argument("config: unknown field '" + key + "'");

  SimScenario sc;
  sc.id = j.value("id", sc.id);
  sc.generators = j.value("generators", sc.generators);
  if (j.contains("matrix")) sc.matrix = matrix_field(j.at("matrix"));
  sc.n_rx = j.value("n_rx", sc.n_rx);
  sc.l_blocks = j.value("L", sc.l_blocks);
  sc.frame_info_bits = j.value("frame_info_bits", sc.frame_info_bits);
  if (j.contains("eb_n0_db")) sc.eb_n0_db = j.at("eb_n0_db").get<std::vector<double>>();
  if (j.contains("metric")) sc.metric.mode = parse_metric_mode(j.at("metric").get<std::string>());
  if (j.contains("beta")) {
    const auto& b = j.at("beta");
    if (b.is_string()) {
      if (b.get<std::string>() != "rule") throw std::invalid_argument("config: beta must be a number or \"rule\"");
      sc.metric.beta_rule = BetaRule::rule_of_thumb;
    } else {
      sc.metric.beta = b.get<double>();
      sc.metric.beta_rule = BetaRule::fixed;
    }
  }
  sc.metric.validate();
  sc.min_frame_errors = j.value("min_frame_errors", sc.min_frame_errors);
  sc.max_frames = j.value("max_frames", sc.max_frames);
  sc.seed = j.value("seed", sc.seed);
  sc.workers = j.value("workers", sc.workers);
  sc.batch_frames = j.value("batch_frames", sc.batch_frames);
  sc.noiseless = j.value("noiseless", sc.noiseless);

  if (j.contains("n_tx")) {
    const auto code = ConvCode::from_octal(sc.generators);
    if (j.at("n_tx").get<unsigned>() != code.n_outputs())
      throw std::invalid_argument("config: n_tx must equal the number of generators");
  }
  return sc;
}

json to_json(const SimScenario& sc) {
  json j;
  j["id"] = sc.id;
  j["generators"] = sc.generators;
  j["matrix"] = sc.matrix;
  j["n_rx"] = sc.n_rx;
  j["L"] = sc.l_blocks;
  j["frame_info_bits"] = sc.frame_info_bits;
  j["eb_n0_db"] = sc.eb_n0_db;
  j["metric"] = to_string(sc.metric.mode);
  if (sc.metric.beta_rule == BetaRule::rule_of_thumb) {
    j["beta"] = "rule";
  } else {
    j["beta"] = sc.metric.beta;
  }
  j["min_frame_errors"] = sc.min_frame_errors;
  j["max_frames"] = sc.max_frames;
  j["seed"] = sc.seed;
  j["batch_frames"] = sc.batch_frames;
  j["noiseless"] = sc.noiseless;
  return j;
}

std::vector<SimScenario> scenarios_from_json(const json& j) {
  if (!j.contains("scenarios")) return {scenario_from_json(j)};
  const json defaults = j.value("defaults", json::object());
  std::vector<SimScenario> out;
  for (const auto& item : j.at("scenarios")) {
    json merged = defaults;
    merged.update(item);
    out.push_back(scenario_from_json(merged));
  }
  return out;
}

std::vector<SimScenario> load_scenarios(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("config '" + path + "': " + e.what());
  }
  auto all = scenarios_from_json(j);
  for (const auto& sc : all)
    if (sc.eb_n0_db.empty()) throw std::invalid_argument("config: scenario '" + sc.id + "' has no eb_n0_db points");
  return all;
}

std::uint64_t scenario_hash(const SimScenario& scenario) {
  // Workers are excluded: they never change results.
  const auto text = to_json(scenario).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace p2stc
