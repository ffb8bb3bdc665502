#include "calocal/config.hpp"

#include <charconv>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "calocal/errors.hpp"
#include "calocal/event_io.hpp"
#include "config_json.hpp"

namespace calocal {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string where(const std::string& section, const std::string& key) {
  return "[" + section + "] " + key;
}

double to_double(const std::string& section, const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError(where(section, key) + ": '" + v + "' is not a number");
  }
}

template <typename Int>
Int to_int(const std::string& section, const std::string& key, const std::string& v) {
  Int out{};
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end)
    throw ConfigError(where(section, key) + ": '" + v + "' is not an integer");
  return out;
}

bool to_bool(const std::string& section, const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(where(section, key) + ": '" + v + "' is not a boolean");
}

std::vector<int> to_int_list(const std::string& section, const std::string& key,
                             const std::string& v) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_int<int>(section, key, trim(item)));
  return out;
}

// Shortest text that parses back to the same double.
std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Maps "section.key" to a setter on RunConfig.
using Setter = void (*)(RunConfig&, const std::string&, const std::string&, const std::string&);

const std::map<std::string, std::map<std::string, Setter>>& setters() {
  static const std::map<std::string, std::map<std::string, Setter>> table{
      {"detector",
       {
           {"n_rows", [](RunConfig& c, auto& s, auto& k, auto& v) { c.detector.n_rows = to_int<int>(s, k, v); }},
           {"n_cols", [](RunConfig& c, auto& s, auto& k, auto& v) { c.detector.n_cols = to_int<int>(s, k, v); }},
           {"cell_pitch_mm", [](RunConfig& c, auto& s, auto& k, auto& v) { c.detector.cell_pitch_mm = to_double(s, k, v); }},
       }},
      {"shower",
       {
           {"visible_fraction", [](RunConfig& c, auto& s, auto& k, auto& v) { c.shower.visible_fraction = to_double(s, k, v); }},
           {"radius", [](RunConfig& c, auto& s, auto& k, auto& v) { c.shower.radius = to_double(s, k, v); }},
           {"center_spread", [](RunConfig& c, auto& s, auto& k, auto& v) { c.shower.center_spread = to_double(s, k, v); }},
           {"fluctuation_shape", [](RunConfig& c, auto& s, auto& k, auto& v) { c.shower.fluctuation_shape = to_double(s, k, v); }},
           {"sparsity_threshold", [](RunConfig& c, auto& s, auto& k, auto& v) { c.shower.sparsity_threshold = to_double(s, k, v); }},
           {"n_events", [](RunConfig& c, auto& s, auto& k, auto& v) { c.simulation.n_events = to_int<std::size_t>(s, k, v); }},
           {"beam_energy_gev", [](RunConfig& c, auto& s, auto& k, auto& v) { c.simulation.beam_energy_gev = to_double(s, k, v); }},
           {"seed", [](RunConfig& c, auto& s, auto& k, auto& v) { c.simulation.seed = to_int<std::uint64_t>(s, k, v); }},
       }},
      {"aging",
       {
           {"slope", [](RunConfig& c, auto& s, auto& k, auto& v) { c.aging.slope = to_double(s, k, v); }},
           {"floor", [](RunConfig& c, auto& s, auto& k, auto& v) { c.aging.floor = to_double(s, k, v); }},
           {"shared_showers", [](RunConfig& c, auto& s, auto& k, auto& v) { c.aging.shared_showers = to_bool(s, k, v); }},
           {"seed", [](RunConfig& c, auto& s, auto& k, auto& v) {
              if (v == "auto") c.aging.seed.reset();
              else c.aging.seed = to_int<std::uint64_t>(s, k, v);
            }},
       }},
      {"train",
       {
           {"epochs", [](RunConfig& c, auto& s, auto& k, auto& v) { c.train.epochs = to_int<int>(s, k, v); }},
           {"batch_size", [](RunConfig& c, auto& s, auto& k, auto& v) { c.train.batch_size = to_int<int>(s, k, v); }},
           {"n_critic", [](RunConfig& c, auto& s, auto& k, auto& v) { c.train.n_critic = to_int<int>(s, k, v); }},
           {"clip", [](RunConfig& c, auto& s, auto& k, auto& v) { c.train.clip = to_double(s, k, v); }},
           {"hidden", [](RunConfig& c, auto& s, auto& k, auto& v) { c.train.hidden = to_int_list(s, k, v); }},
           {"lr_critic", [](RunConfig& c, auto& s, auto& k, auto& v) { c.train.lr_critic = to_double(s, k, v); }},
           {"lr_generator", [](RunConfig& c, auto& s, auto& k, auto& v) { c.train.lr_generator = to_double(s, k, v); }},
           {"mask_half_width", [](RunConfig& c, auto& s, auto& k, auto& v) { c.train.mask_half_width = to_int<int>(s, k, v); }},
           {"scale", [](RunConfig& c, auto& s, auto& k, auto& v) {
              if (v == "auto") c.train.scale.reset();
              else c.train.scale = to_double(s, k, v);
            }},
           {"seed", [](RunConfig& c, auto& s, auto& k, auto& v) { c.train.seed = to_int<std::uint64_t>(s, k, v); }},
           {"rho", [](RunConfig& c, auto& s, auto& k, auto& v) { c.train.rho = to_double(s, k, v); }},
           {"epsilon", [](RunConfig& c, auto& s, auto& k, auto& v) { c.train.epsilon = to_double(s, k, v); }},
           {"leaky_slope", [](RunConfig& c, auto& s, auto& k, auto& v) { c.train.leaky_slope = to_double(s, k, v); }},
           {"init_range", [](RunConfig& c, auto& s, auto& k, auto& v) { c.train.init_range = to_double(s, k, v); }},
       }},
      {"metrics",
       {
           {"n_bins", [](RunConfig& c, auto& s, auto& k, auto& v) { c.metrics.n_bins = to_int<int>(s, k, v); }},
           {"baseline_min_mean_mev", [](RunConfig& c, auto& s, auto& k, auto& v) { c.metrics.baseline_min_mean_mev = to_double(s, k, v); }},
       }},
  };
  return table;
}

}  // namespace

void RunConfig::validate() const {
  try {
    detector.validate();
    shower.validate();
    train.validate();
    central_mask(detector, train.mask_half_width);
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  }
  if (simulation.n_events < 1) throw ConfigError("[shower] n_events must be at least 1");
  if (!(simulation.beam_energy_gev > 0.0)) throw ConfigError("[shower] beam_energy_gev must be positive");
  if (!(aging.slope >= 0.0 && aging.slope < 1.0)) throw ConfigError("[aging] slope must lie in [0, 1)");
  if (!(aging.floor > 0.0 && aging.floor <= 1.0)) throw ConfigError("[aging] floor must lie in (0, 1]");
  if (metrics.n_bins < 1) throw ConfigError("[metrics] n_bins must be at least 1");
}

RunConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax error: ") + e.what());
  }

  RunConfig c;
  const auto& table = setters();
  for (const auto& [section, body] : tree) {
    const auto sec = table.find(section);
    if (sec == table.end()) {
      if (!body.data().empty()) throw ConfigError("key '" + section + "' outside of any section");
      throw ConfigError("unknown config section [" + section + "]");
    }
    for (const auto& [key, value] : body) {
      const auto it = sec->second.find(key);
      if (it == sec->second.end()) throw ConfigError("unknown config key " + where(section, key));
      it->second(c, section, key, trim(value.data()));
    }
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  return parse_config(text);
}

std::string to_ini(const RunConfig& c) {
  std::string hidden;
  for (std::size_t i = 0; i < c.train.hidden.size(); ++i)
    hidden += (i ? "," : "") + std::to_string(c.train.hidden[i]);
  std::ostringstream o;
  o << "[detector]\n"
    << "n_rows = " << c.detector.n_rows << "\n"
    << "n_cols = " << c.detector.n_cols << "\n"
    << "cell_pitch_mm = " << fmt(c.detector.cell_pitch_mm) << "\n\n"
    << "[shower]\n"
    << "visible_fraction = " << fmt(c.shower.visible_fraction) << "\n"
    << "radius = " << fmt(c.shower.radius) << "\n"
    << "center_spread = " << fmt(c.shower.center_spread) << "\n"
    << "fluctuation_shape = " << fmt(c.shower.fluctuation_shape) << "\n"
    << "sparsity_threshold = " << fmt(c.shower.sparsity_threshold) << "\n"
    << "n_events = " << c.simulation.n_events << "\n"
    << "beam_energy_gev = " << fmt(c.simulation.beam_energy_gev) << "\n"
    << "seed = " << c.simulation.seed << "\n\n"
    << "[aging]\n"
    << "slope = " << fmt(c.aging.slope) << "\n"
    << "floor = " << fmt(c.aging.floor) << "\n"
    << "shared_showers = " << (c.aging.shared_showers ? "true" : "false") << "\n"
    << "seed = " << (c.aging.seed ? std::to_string(*c.aging.seed) : "auto") << "\n\n"
    << "[train]\n"
    << "epochs = " << c.train.epochs << "\n"
    << "batch_size = " << c.train.batch_size << "\n"
    << "n_critic = " << c.train.n_critic << "\n"
    << "clip = " << fmt(c.train.clip) << "\n"
    << "hidden = " << hidden << "\n"
    << "lr_critic = " << fmt(c.train.lr_critic) << "\n"
    << "lr_generator = " << fmt(c.train.lr_generator) << "\n"
    << "mask_half_width = " << c.train.mask_half_width << "\n"
    << "scale = " << (c.train.scale ? fmt(*c.train.scale) : "auto") << "\n"
    << "seed = " << c.train.seed << "\n"
    << "rho = " << fmt(c.train.rho) << "\n"
    << "epsilon = " << fmt(c.train.epsilon) << "\n"
    << "leaky_slope = " << fmt(c.train.leaky_slope) << "\n"
    << "init_range = " << fmt(c.train.init_range) << "\n\n"
    << "[metrics]\n"
    << "n_bins = " << c.metrics.n_bins << "\n"
    << "baseline_min_mean_mev = " << fmt(c.metrics.baseline_min_mean_mev) << "\n";
  return o.str();
}

namespace detail {

nlohmann::ordered_json config_json(const RunConfig& c) {
  using J = nlohmann::ordered_json;
  J j;
  j["detector"] = J{{"n_rows", c.detector.n_rows},
                    {"n_cols", c.detector.n_cols},
                    {"cell_pitch_mm", c.detector.cell_pitch_mm}};
  j["shower"] = J{{"visible_fraction", c.shower.visible_fraction},
                  {"radius", c.shower.radius},
                  {"center_spread", c.shower.center_spread},
                  {"fluctuation_shape", c.shower.fluctuation_shape},
                  {"sparsity_threshold", c.shower.sparsity_threshold},
                  {"n_events", c.simulation.n_events},
                  {"beam_energy_gev", c.simulation.beam_energy_gev},
                  {"seed", c.simulation.seed}};
  j["aging"] = J{{"slope", c.aging.slope},
                 {"floor", c.aging.floor},
                 {"shared_showers", c.aging.shared_showers},
                 {"seed", c.aging.seed ? J(*c.aging.seed) : J("auto")}};
  j["train"] = J{{"epochs", c.train.epochs},
                 {"batch_size", c.train.batch_size},
                 {"n_critic", c.train.n_critic},
                 {"clip", c.train.clip},
                 {"hidden", c.train.hidden},
                 {"lr_critic", c.train.lr_critic},
                 {"lr_generator", c.train.lr_generator},
                 {"mask_half_width", c.train.mask_half_width},
                 {"scale", c.train.scale ? J(*c.train.scale) : J("auto")},
                 {"seed", c.train.seed},
                 {"rho", c.train.rho},
                 {"epsilon", c.train.epsilon},
                 {"leaky_slope", c.train.leaky_slope},
                 {"init_range", c.train.init_range}};
  j["metrics"] = J{{"n_bins", c.metrics.n_bins},
                   {"baseline_min_mean_mev", c.metrics.baseline_min_mean_mev}};
  return j;
}

}  // namespace detail

std::string to_json(const RunConfig& c) { return detail::config_json(c).dump(); }

std::uint64_t damaged_draw_seed(const AgingSettings& aging, std::uint64_t input_seed) {
  if (aging.seed) return *aging.seed;
  return input_seed + 0x9E3779B97F4A7C15ull;
}

}  // namespace calocal
