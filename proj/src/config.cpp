#include "adstitch/config.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "adstitch/records.hpp"
#include "adstitch/text.hpp"

namespace adstitch {

namespace {

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("config key " + key + ": bad integer \"" + value + "\"");
  }
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("config key " + key + ": bad number \"" + value + "\"");
  }
}

LabelSource parse_label(const std::string& key, const std::string& value) {
  std::string v = case_fold(value);
  if (v == "click") return LabelSource::Click;
  if (v == "auction_win" || v == "win") return LabelSource::AuctionWin;
  throw std::runtime_error("config key " + key + ": unknown label source \"" +
                           value + "\"");
}

using Setter = std::function<void(SystemConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> map = {
      {"title_budget",
       [](SystemConfig& c, const std::string& k, const std::string& v) {
         c.title_budget = static_cast<int>(parse_int(k, v));
       }},
      {"desc_budget",
       [](SystemConfig& c, const std::string& k, const std::string& v) {
         c.desc_budget = static_cast<int>(parse_int(k, v));
       }},
      {"max_title_chars",
       [](SystemConfig& c, const std::string& k, const std::string& v) {
         c.max_title_chars = static_cast<int>(parse_int(k, v));
       }},
      {"max_desc_chars",
       [](SystemConfig& c, const std::string& k, const std::string& v) {
         c.max_desc_chars = static_cast<int>(parse_int(k, v));
       }},
      {"hash_bits",
       [](SystemConfig& c, const std::string& k, const std::string& v) {
         c.hash_bits = static_cast<int>(parse_int(k, v));
       }},
      {"learning_rate",
       [](SystemConfig& c, const std::string& k, const std::string& v) {
         c.learning_rate = parse_double(k, v);
       }},
      {"batch_size",
       [](SystemConfig& c, const std::string& k, const std::string& v) {
         c.batch_size = static_cast<int>(parse_int(k, v));
       }},
      {"dpp_epsilon",
       [](SystemConfig& c, const std::string& k, const std::string& v) {
         c.dpp_epsilon = parse_double(k, v);
       }},
      {"rng_seed",
       [](SystemConfig& c, const std::string& k, const std::string& v) {
         c.rng_seed = static_cast<std::uint64_t>(parse_int(k, v));
       }},
      {"trial_scale",
       [](SystemConfig& c, const std::string& k, const std::string& v) {
         c.trial_scale = parse_double(k, v);
       }},
      {"train_label",
       [](SystemConfig& c, const std::string& k, const std::string& v) {
         c.train_label = parse_label(k, v);
       }},
  };
  return map;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

void validate_or_throw(const SystemConfig& config) {
  auto problems = config.validate();
  if (problems.empty()) return;
  std::string msg = "invalid config:";
  for (const auto& p : problems) msg += " " + p + ";";
  throw std::runtime_error(msg);
}

}  // namespace

SystemConfig load_config(const std::string& path) {
  SystemConfig config;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(path + " line " + std::to_string(line_no) +
                               ": expected key=value");
    }
    std::string key = case_fold(trim(t.substr(0, eq)));
    std::string value = trim(t.substr(eq + 1));
    auto it = setters().find(key);
    if (it == setters().end()) {
      throw std::runtime_error(path + " line " + std::to_string(line_no) +
                               ": unknown config key \"" + key + "\"");
    }
    it->second(config, key, value);
  }
  validate_or_throw(config);
  return config;
}

void apply_env_overrides(SystemConfig& config) {
  for (const auto& [key, setter] : setters()) {
    std::string env_name = "ADSTITCH_";
    for (char c : key) {
      env_name.push_back(c >= 'a' && c <= 'z' ? static_cast<char>(c - 'a' + 'A') : c);
    }
    const char* value = std::getenv(env_name.c_str());
    if (value) setter(config, key, value);
  }
  validate_or_throw(config);
}

SystemConfig load_config_with_env(const std::string& path) {
  SystemConfig config;
  if (!path.empty()) config = load_config(path);
  apply_env_overrides(config);
  return config;
}

WorldSpec load_world_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open world file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  Json j = Json::parse(buf.str(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw std::runtime_error("world file " + path + ": malformed JSON object");
  }
  WorldSpec spec;
  for (const auto& [key, value] : j.items()) {
    if (key == "seed") {
      spec.seed = value.get<std::uint64_t>();
    } else if (key == "queries_per_page") {
      spec.queries_per_page = value.get<int>();
    } else if (key == "oracle_sparsity") {
      spec.oracle_sparsity = value.get<double>();
    } else if (key == "oracle_scale") {
      spec.oracle_scale = value.get<double>();
    } else if (key == "win_scale") {
      spec.win_scale = value.get<double>();
    } else if (key == "revenue_per_click") {
      spec.revenue_per_click = value.get<double>();
    } else if (key == "quick_back_base") {
      spec.quick_back_base = value.get<double>();
    } else if (key == "quick_back_bias") {
      spec.quick_back_bias = value.get<double>();
    } else if (key == "win_override") {
      if (!value.is_null()) spec.win_override = value.get<double>();
    } else if (key == "click_override") {
      if (!value.is_null()) spec.click_override = value.get<double>();
    } else if (key == "bootstrap_shards") {
      spec.bootstrap_shards = value.get<int>();
    } else if (key == "flagged_asset_ids") {
      for (const auto& id : value) {
        spec.flagged_asset_ids.insert(id.get<std::string>());
      }
    } else {
      throw std::runtime_error("world file " + path + ": unknown key \"" + key +
                               "\"");
    }
  }
  return spec;
}

}  // namespace adstitch
