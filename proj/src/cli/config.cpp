#include "ehpc/cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace ehpc::cli {

namespace {

using nlohmann::json;

struct Context {
  bool gain_db_seen = false;
  bool gain_linear_seen = false;
};

using Setter = std::function<void(ScenarioConfig&, const json&, Context&, const std::string&)>;

struct KeySpec {
  std::string section;
  std::string name;
  Setter apply;
  std::string path() const { return section + "." + name; }
};

double number(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError(key, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(key, "expected a finite number");
  return x;
}

std::uint64_t count(const json& v, const std::string& key) {
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw ConfigError(key, "expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

int small_count(const json& v, const std::string& key) {
  const std::uint64_t n = count(v, key);
  if (n > static_cast<std::uint64_t>(std::numeric_limits<int>::max()))
    throw ConfigError(key, "value too large");
  return static_cast<int>(n);
}

std::string text(const json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError(key, "expected a string");
  return v.get<std::string>();
}

template <class F>
Setter num(F f) {
  return [f](ScenarioConfig& c, const json& v, Context&, const std::string& k) { f(c, number(v, k)); };
}

const std::vector<KeySpec>& schema() {
  static const std::vector<KeySpec> keys = {
      {"battery", "e_min_joule", num([](ScenarioConfig& c, double x) { c.battery.e_min = x; })},
      {"battery", "e_max_joule", num([](ScenarioConfig& c, double x) { c.battery.e_max = x; })},
      {"battery", "e_c_max_joule", num([](ScenarioConfig& c, double x) { c.battery.e_c_max = x; })},
      {"battery", "p_max_watt", num([](ScenarioConfig& c, double x) { c.battery.p_max = x; })},
      {"battery", "dt_second", num([](ScenarioConfig& c, double x) { c.battery.dt = x; })},
      {"battery", "rho_c", num([](ScenarioConfig& c, double x) { c.battery.rho_c = x; })},
      {"battery", "rho_d", num([](ScenarioConfig& c, double x) { c.battery.rho_d = x; })},
      {"arrivals", "lambda_per_slot", num([](ScenarioConfig& c, double x) { c.arrivals.lambda = x; })},
      {"arrivals", "alpha_joule", num([](ScenarioConfig& c, double x) { c.arrivals.alpha = x; })},
      {"channel", "model",
       [](ScenarioConfig& c, const json& v, Context&, const std::string& k) {
         try {
           c.channel.model = channel_model_from_string(text(v, k));
         } catch (const ConfigError&) {
           throw;
         } catch (const std::exception& e) {
           throw ConfigError(k, e.what());
         }
       }},
      {"channel", "antennas",
       [](ScenarioConfig& c, const json& v, Context&, const std::string& k) {
         c.channel.antennas = small_count(v, k);
       }},
      {"channel", "n_tx",
       [](ScenarioConfig& c, const json& v, Context&, const std::string& k) {
         c.channel.n_tx = small_count(v, k);
       }},
      {"channel", "n_rx",
       [](ScenarioConfig& c, const json& v, Context&, const std::string& k) {
         c.channel.n_rx = small_count(v, k);
       }},
      {"channel", "mean_gain_db",
       [](ScenarioConfig& c, const json& v, Context& ctx, const std::string& k) {
         ctx.gain_db_seen = true;
         c.channel.mean_gain = db_to_linear(number(v, k));
       }},
      {"channel", "mean_gain_linear",
       [](ScenarioConfig& c, const json& v, Context& ctx, const std::string& k) {
         ctx.gain_linear_seen = true;
         c.channel.mean_gain = number(v, k);
       }},
      {"channel", "outage_eta", num([](ScenarioConfig& c, double x) { c.channel.outage_eta = x; })},
      {"channel", "gamma_max_linear", num([](ScenarioConfig& c, double x) { c.gamma_max = x; })},
      {"channel", "quantile_seed",
       [](ScenarioConfig& c, const json& v, Context&, const std::string& k) {
         c.channel.seed = count(v, k);
       }},
      {"controller", "type",
       [](ScenarioConfig& c, const json& v, Context&, const std::string& k) {
         try {
           c.controller = controller_from_string(text(v, k));
         } catch (const ConfigError&) {
           throw;
         } catch (const std::exception& e) {
           throw ConfigError(k, e.what());
         }
       }},
      {"controller", "v",
       [](ScenarioConfig& c, const json& v, Context&, const std::string& k) {
         if (v.is_string()) {
           if (v.get<std::string>() != "vmax") throw ConfigError(k, "expected \"vmax\" or a number");
           c.v.reset();
           return;
         }
         const double x = number(v, k);
         if (!(x > 0.0)) throw ConfigError(k, "V must be positive");
         c.v = x;
       }},
      {"controller", "rate_unit",
       [](ScenarioConfig& c, const json& v, Context&, const std::string& k) {
         const std::string s = text(v, k);
         if (s == "nats")
           c.rate_unit = RateUnit::kNats;
         else if (s == "bits")
           c.rate_unit = RateUnit::kBits;
         else
           throw ConfigError(k, "expected \"nats\" or \"bits\"");
       }},
      {"sim", "horizon_slots",
       [](ScenarioConfig& c, const json& v, Context&, const std::string& k) {
         c.horizon = count(v, k);
       }},
      {"sim", "replicas",
       [](ScenarioConfig& c, const json& v, Context&, const std::string& k) {
         c.replicas = count(v, k);
       }},
      {"sim", "seed",
       [](ScenarioConfig& c, const json& v, Context&, const std::string& k) { c.seed = count(v, k); }},
      {"sim", "e_b0_joule", num([](ScenarioConfig& c, double x) { c.e_b0 = x; })},
      {"sim", "e_b0_fraction", num([](ScenarioConfig& c, double x) { c.e_b0_fraction = x; })},
      {"sim", "threads",
       [](ScenarioConfig& c, const json& v, Context&, const std::string& k) {
         c.threads = static_cast<unsigned>(small_count(v, k));
       }},
  };
  return keys;
}

const KeySpec* find_key(const std::string& section, const std::string& name) {
  for (const KeySpec& k : schema())
    if (k.section == section && k.name == name) return &k;
  return nullptr;
}

std::string known_sections_hint() {
  return "known sections: battery, arrivals, channel, controller, sim";
}

/// Resolves an override key to its dotted path.
std::string resolve_key(const std::string& key) {
  if (key.find('.') != std::string::npos) return key;
  std::vector<std::string> hits;
  for (const KeySpec& k : schema()) {
    if (k.name == key || k.name.rfind(key + "_", 0) == 0) hits.push_back(k.path());
  }
  // An exact name match wins over unit-suffixed ones.
  for (const KeySpec& k : schema())
    if (k.name == key && hits.size() > 1) return k.path();
  if (hits.size() == 1) return hits.front();
  if (hits.empty()) throw ConfigError(key, "unknown key");
  std::string msg = "ambiguous key, candidates:";
  for (const auto& h : hits) msg += " " + h;
  throw ConfigError(key, msg);
}

void apply_override(json& doc, const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError(kv, "override must have the form key=value");
  const std::string path = resolve_key(kv.substr(0, eq));
  const std::string raw = kv.substr(eq + 1);
  const auto dot = path.find('.');
  if (dot == std::string::npos || path.find('.', dot + 1) != std::string::npos)
    throw ConfigError(path, "expected section.key");
  const std::string section = path.substr(0, dot);
  const std::string name = path.substr(dot + 1);
  if (!find_key(section, name)) throw ConfigError(path, "unknown key");

  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;
  }
  json& sec = doc[section];
  if (!sec.is_object()) sec = json::object();
  if (name == "mean_gain_db") sec.erase("mean_gain_linear");
  if (name == "mean_gain_linear") sec.erase("mean_gain_db");
  sec[name] = std::move(value);
}

template <class F>
void checked(const std::string& key, F&& f) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(key, e.what());
  }
}

}  // namespace

std::vector<std::string> known_keys() {
  std::vector<std::string> out;
  for (const KeySpec& k : schema()) out.push_back(k.path());
  return out;
}

ScenarioConfig parse_config_text(const std::string& text, std::span<const std::string> overrides) {
  json doc = json::object();
  if (std::any_of(text.begin(), text.end(), [](unsigned char ch) { return !std::isspace(ch); })) {
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError("", std::string("malformed configuration: ") + e.what());
    }
  }
  if (!doc.is_object()) throw ConfigError("", "configuration must be a JSON object");
  for (const std::string& kv : overrides) apply_override(doc, kv);

  ScenarioConfig cfg;
  Context ctx;
  for (const auto& [section, body] : doc.items()) {
    const bool known = std::any_of(schema().begin(), schema().end(),
                                   [&](const KeySpec& k) { return k.section == section; });
    if (!known) throw ConfigError(section, "unknown section (" + known_sections_hint() + ")");
    if (!body.is_object())
      throw ConfigError(section, "expected an object (" + known_sections_hint() + ")");
    for (const auto& [name, value] : body.items()) {
      const std::string key = section + "." + name;
      const KeySpec* spec = find_key(section, name);
      if (!spec) throw ConfigError(key, "unknown key");
      spec->apply(cfg, value, ctx, key);
    }
  }
  if (ctx.gain_db_seen && ctx.gain_linear_seen)
    throw ConfigError("channel.mean_gain_db", "give mean_gain_db or mean_gain_linear, not both");

  checked("battery", [&] { validate(cfg.battery); });
  checked("arrivals", [&] { validate(cfg.arrivals); });
  checked("channel", [&] { validate(cfg.channel); });
  checked("sim", [&] { validate(cfg); });
  return cfg;
}

ScenarioConfig parse_config(const std::optional<std::filesystem::path>& path,
                            std::span<const std::string> overrides) {
  std::string text;
  if (path) {
    std::ifstream in(*path, std::ios::binary);
    if (!in) throw ConfigError("", "cannot open configuration file '" + path->string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  return parse_config_text(text, overrides);
}

}  // namespace ehpc::cli
