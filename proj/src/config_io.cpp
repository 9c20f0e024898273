#include "tandem/config_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

namespace tandem {

namespace {

struct Field {
  const char* key;
  std::function<void(ExperimentConfig&, std::string_view)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

struct BadValue {
  std::string why;
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view text) {
  T v{};
  const char* first = text.data();
  const char* last = first + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last) {
    throw BadValue{"expected a number, got '" + std::string(text) + "'"};
  }
  return v;
}

std::string show(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Field real(const char* key, double ExperimentConfig::*member) {
  return {key, [member](ExperimentConfig& c, std::string_view v) { c.*member = parse_number<double>(v); },
          [member](const ExperimentConfig& c) { return show(c.*member); }};
}

Field real(const char* key, Vec2 ExperimentConfig::*member, int i) {
  return {key,
          [member, i](ExperimentConfig& c, std::string_view v) { (c.*member)[i] = parse_number<double>(v); },
          [member, i](const ExperimentConfig& c) { return show((c.*member)[i]); }};
}

Field spec(const char* key, OnOffSpec ExperimentConfig::*process, double OnOffSpec::*member) {
  return {key,
          [process, member](ExperimentConfig& c, std::string_view v) {
            (c.*process).*member = parse_number<double>(v);
          },
          [process, member](const ExperimentConfig& c) { return show((c.*process).*member); }};
}

Field integer(const char* key, int ExperimentConfig::*member) {
  return {key, [member](ExperimentConfig& c, std::string_view v) { c.*member = parse_number<int>(v); },
          [member](const ExperimentConfig& c) { return std::to_string(c.*member); }};
}

const std::vector<Field>& fields() {
  using C = ExperimentConfig;
  static const std::vector<Field> table = {
      real("c1", &C::cycle_length, 0),
      real("c2", &C::cycle_length, 1),
      integer("cycles_per_control", &C::cycles_per_control),
      integer("num_control_cycles", &C::num_control_cycles),
      spec("alpha1_mean", &C::alpha1, &OnOffSpec::mean_rate),
      spec("alpha1_zeta", &C::alpha1, &OnOffSpec::spread),
      spec("alpha1_off_max", &C::alpha1, &OnOffSpec::off_max),
      spec("alpha1_on_max", &C::alpha1, &OnOffSpec::on_max),
      spec("alpha2_mean", &C::alpha2, &OnOffSpec::mean_rate),
      spec("alpha2_zeta", &C::alpha2, &OnOffSpec::spread),
      spec("alpha2_off_max", &C::alpha2, &OnOffSpec::off_max),
      spec("alpha2_on_max", &C::alpha2, &OnOffSpec::on_max),
      real("phi", &C::phi),
      real("beta_max1", &C::beta_max, 0),
      real("beta_max2", &C::beta_max, 1),
      {"service_mode",
       [](C& c, std::string_view v) {
         if (v == "constant") {
           c.service_mode = ServiceMode::Constant;
         } else if (v == "ramp") {
           c.service_mode = ServiceMode::Ramp;
         } else {
           throw BadValue{"expected constant or ramp, got '" + std::string(v) + "'"};
         }
       },
       [](const C& c) { return std::string(c.service_mode == ServiceMode::Ramp ? "ramp" : "constant"); }},
      real("ramp_initial_frac", &C::ramp_initial_fraction),
      real("ramp_duration", &C::ramp_duration),
      integer("ramp_steps", &C::ramp_steps),
      real("r1", &C::reference, 0),
      real("r2", &C::reference, 1),
      real("theta1_init", &C::theta_init, 0),
      real("theta2_init", &C::theta_init, 1),
      {"mode",
       [](C& c, std::string_view v) {
         try {
           c.mode = parse_mode(v);
         } catch (const std::invalid_argument&) {
           throw BadValue{"expected centralized or decentralized, got '" + std::string(v) + "'"};
         }
       },
       [](const C& c) { return std::string(to_string(c.mode)); }},
      real("eps_j", &C::eps_j),
      real("step_cap", &C::step_cap),
      real("theta_min_frac", &C::theta_min_frac),
      real("theta_max_frac", &C::theta_max_frac),
      {"seed", [](C& c, std::string_view v) { c.seed = parse_number<std::uint64_t>(v); },
       [](const C& c) { return std::to_string(c.seed); }},
      integer("replications", &C::replications),
  };
  return table;
}

}  // namespace

ConfigError::ConfigError(std::string key, int line, const std::string& what)
    : std::runtime_error(what), key_(std::move(key)), line_(line) {}

ExperimentConfig parse_config_text(std::string_view text) {
  ExperimentConfig cfg = default_paper_config();
  std::map<std::string, int, std::less<>> seen;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("", line_no, "line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    const auto where = "line " + std::to_string(line_no) + ": " + key + ": ";

    const Field* field = nullptr;
    for (const auto& f : fields()) {
      if (key == f.key) field = &f;
    }
    if (field == nullptr) throw ConfigError(key, line_no, where + "unknown key");
    if (const auto it = seen.find(key); it != seen.end()) {
      throw ConfigError(key, line_no,
                        where + "duplicate key (first set on line " + std::to_string(it->second) + ")");
    }
    seen.emplace(key, line_no);
    try {
      field->set(cfg, value);
    } catch (const BadValue& bad) {
      throw ConfigError(key, line_no, where + bad.why);
    }
  }

  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    const std::string key = msg.substr(0, msg.find(':'));
    const auto it = seen.find(key);
    const int line = it == seen.end() ? 0 : it->second;
    throw ConfigError(key, line, (line > 0 ? "line " + std::to_string(line) + ": " : "") + msg);
  }
  return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", 0, "cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string format_config(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& f : fields()) out += std::string(f.key) + " = " + f.get(cfg) + "\n";
  return out;
}

}  // namespace tandem
