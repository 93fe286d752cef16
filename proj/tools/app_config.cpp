#include "app_config.hpp"

#include <fstream>

#include "promptshield/errors.hpp"

namespace promptshield::cli {

namespace {

std::string trim(const std::string& s) {
  std::size_t begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  std::size_t end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t consumed = 0;
    double parsed = std::stod(value, &consumed);
    if (consumed != value.size()) throw std::invalid_argument(value);
    return parsed;
  } catch (const std::exception&) {
    throw ParseError("config key '" + key + "': '" + value + "' is not a number");
  }
}

}  // namespace

void AppConfig::validate() const {
  if (alpha <= 0.0 || alpha >= 1.0) {
    throw Error("alpha must be in (0, 1), got " + std::to_string(alpha));
  }
  if (rarity_threshold < 1) {
    throw Error("rarity_threshold must be >= 1");
  }
}

void apply_config_file(AppConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open config file '" + path.string() + "'");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ParseError("config '" + path.string() + "' line " +
                       std::to_string(line_no) + ": expected key = value");
    }
    std::string key = trim(stripped.substr(0, eq));
    std::string value = trim(stripped.substr(eq + 1));
    if (key == "upstream_base_url") {
      config.upstream_base_url = value;
    } else if (key == "upstream_model_name") {
      config.upstream_model_name = value;
    } else if (key == "template_id") {
      config.template_id = value;
    } else if (key == "ledger_path") {
      config.ledger_path = value;
    } else if (key == "theta") {
      config.theta = parse_double(key, value);
    } else if (key == "gamma") {
      config.gamma = parse_double(key, value);
    } else if (key == "alpha") {
      config.alpha = parse_double(key, value);
    } else if (key == "rarity_threshold") {
      config.rarity_threshold = static_cast<int>(parse_double(key, value));
    } else if (key == "seed") {
      try {
        config.seed = std::stoull(value);
      } catch (const std::exception&) {
        throw ParseError("config key 'seed': '" + value + "' is not an integer");
      }
    } else {
      throw ParseError("config '" + path.string() + "' line " +
                       std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  config.validate();
}

AppConfig load_config(const std::filesystem::path& path) {
  AppConfig config;
  apply_config_file(config, path);
  return config;
}

}  // namespace promptshield::cli
