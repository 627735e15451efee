#include "energy_lab/sweep_config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <fmt/format.h>

#include <fstream>
#include <sstream>
#include <type_traits>

namespace energy_lab {

namespace {

namespace pt = boost::property_tree;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) throw ConfigError(fmt::format("empty item in list '{}'", text));
    const auto e = item.find_last_not_of(" \t");
    out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

template <class T>
T parse_value(const std::string& text, const std::string& key) {
  if constexpr (std::is_unsigned_v<T>) {
    if (text.find('-') != std::string::npos) {
      throw ConfigError(fmt::format("invalid value '{}' for key '{}'", text, key));
    }
  }
  std::istringstream is(text);
  T v{};
  is >> v;
  if (!is || !(is >> std::ws).eof()) {
    throw ConfigError(fmt::format("invalid value '{}' for key '{}'", text, key));
  }
  return v;
}

}  // namespace

RunConfig parse_run_config(std::istream& in, const std::string& source) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("{}: {}", source, e.message()));
  }
  RunConfig cfg;
  SweepConfig& s = cfg.sweep;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError(fmt::format("{}: key '{}' must appear inside a section", source, section));
    }
    if (section != "sweep" && section != "output") {
      throw ConfigError(fmt::format("{}: unknown config section '[{}]'", source, section));
    }
    for (const auto& [key, node] : body) {
      const std::string value = node.get_value<std::string>();
      const std::string name = section + "." + key;
      try {
        if (section == "sweep") {
          if (key == "dims") {
            s.dims.clear();
            for (const auto& v : split_list(value)) s.dims.push_back(parse_value<int>(v, name));
          } else if (key == "families") {
            s.families.clear();
            for (const auto& v : split_list(value)) s.families.push_back(parse_family(v));
          } else if (key == "mu1") {
            s.mu1_values.clear();
            for (const auto& v : split_list(value)) {
              s.mu1_values.push_back(parse_value<double>(v, name));
            }
          } else if (key == "n_cov") {
            s.n_cov = parse_value<int>(value, name);
          } else if (key == "n_samples") {
            s.n_samples = parse_value<std::int64_t>(value, name);
          } else if (key == "seed") {
            s.master_seed = parse_value<std::uint64_t>(value, name);
          } else if (key == "mode") {
            s.mode = parse_estimator_mode(value);
          } else if (key == "closeness_min") {
            s.closeness_min = parse_value<double>(value, name);
          } else if (key == "closeness_max") {
            s.closeness_max = parse_value<double>(value, name);
          } else if (key == "max_pairs") {
            s.max_pairs = parse_value<std::int64_t>(value, name);
          } else if (key == "moment_samples") {
            s.moment_samples = parse_value<std::int64_t>(value, name);
          } else if (key == "threads") {
            s.threads = parse_value<unsigned>(value, name);
          } else {
            throw ConfigError(fmt::format("unknown config key '{}'", name));
          }
        } else if (section == "output") {
          if (key == "out_dir") {
            cfg.out_dir = value;
          } else {
            throw ConfigError(fmt::format("unknown config key '{}'", name));
          }
        } else {
          throw ConfigError(fmt::format("unknown config section '[{}]'", section));
        }
      } catch (const ConfigError& e) {
        throw ConfigError(fmt::format("{}: {}", source, e.what()));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(fmt::format("{}: key '{}': {}", source, name, e.what()));
      }
    }
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path.string() + "'");
  return parse_run_config(f, path.string());
}

}  // namespace energy_lab
