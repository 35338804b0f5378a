#include "phyloswarm/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "phyloswarm/rng.hpp"

namespace phyloswarm {

namespace {

std::string trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r");
  return std::string(text.substr(first, last - first + 1));
}

std::vector<std::string> split_list(std::string_view text) {
  std::string cleaned = trim(text);
  if (cleaned.size() >= 2 && cleaned.front() == '[' && cleaned.back() == ']') {
    cleaned = cleaned.substr(1, cleaned.size() - 2);
  }
  std::vector<std::string> items;
  std::stringstream stream(cleaned);
  std::string item;
  while (std::getline(stream, item, ',')) items.push_back(trim(item));
  return items;
}

double to_real(const std::string& text) { return parse_real(trim(text)); }

std::uint64_t to_u64(const std::string& raw) {
  const std::string text = trim(raw);
  std::uint64_t value = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || end != text.data() + text.size()) {
    throw std::invalid_argument("expected a non-negative integer, got '" + text + "'");
  }
  return value;
}

std::size_t to_size(const std::string& text) { return static_cast<std::size_t>(to_u64(text)); }

std::size_t to_budget(const std::string& text) {
  return trim(text) == "unlimited" ? kUnlimited : to_size(text);
}

Interval to_interval(const std::string& text) {
  const auto items = split_list(text);
  if (items.size() != 2) throw std::invalid_argument("expected 'lo, hi', got '" + text + "'");
  return Interval{to_real(items[0]), to_real(items[1])};
}

std::filesystem::path to_path(const std::string& text, const std::filesystem::path& base) {
  if (text.empty()) return {};
  std::filesystem::path path(text);
  if (path.is_relative() && !base.empty()) path = base / path;
  return path;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::filesystem::path&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto plain = [&t](const std::string& key, std::function<void(RunConfig&, const std::string&)> f) {
      t[key] = [f](RunConfig& c, const std::string& v, const std::filesystem::path&) { f(c, v); };
    };

    plain("engine.L", [](RunConfig& c, const std::string& v) {
      std::vector<std::size_t> counts;
      for (const auto& item : split_list(v)) counts.push_back(to_size(item));
      if (counts.empty()) throw std::invalid_argument("at least one particle count required");
      c.particle_counts = counts;
      c.engine.particles = counts.front();
    });
    plain("engine.I_max", [](RunConfig& c, const std::string& v) { c.engine.max_iterations = to_size(v); });
    plain("engine.c1", [](RunConfig& c, const std::string& v) { c.engine.c1 = to_real(v); });
    plain("engine.c2", [](RunConfig& c, const std::string& v) { c.engine.c2 = to_real(v); });
    plain("engine.C1", [](RunConfig& c, const std::string& v) { c.engine.C1 = to_real(v); });
    plain("engine.C2", [](RunConfig& c, const std::string& v) { c.engine.C2 = to_real(v); });
    plain("engine.w_max", [](RunConfig& c, const std::string& v) { c.engine.w_max = to_real(v); });
    plain("engine.w_min", [](RunConfig& c, const std::string& v) { c.engine.w_min = to_real(v); });
    plain("engine.r_accel_range", [](RunConfig& c, const std::string& v) { c.engine.r_accel_range = to_interval(v); });
    plain("engine.r_threshold_range",
          [](RunConfig& c, const std::string& v) { c.engine.r_threshold_range = to_interval(v); });
    plain("engine.target_fitness", [](RunConfig& c, const std::string& v) { c.engine.target_fitness = to_real(v); });
    plain("engine.init_ones_fraction_range",
          [](RunConfig& c, const std::string& v) { c.engine.init_ones_fraction_range = to_interval(v); });
    plain("engine.velocity_clamp", [](RunConfig& c, const std::string& v) {
      if (trim(v) == "none" || trim(v).empty()) {
        c.engine.velocity_clamp.reset();
      } else {
        c.engine.velocity_clamp = to_interval(v);
      }
    });
    plain("engine.seed", [](RunConfig& c, const std::string& v) { c.engine.seed = to_u64(v); });

    plain("fitness.evaluator", [](RunConfig& c, const std::string& v) {
      const std::string name = trim(v);
      if (name != "phylo" && name != "planted") throw std::invalid_argument("expected phylo or planted");
      c.evaluator = name;
    });
    plain("fitness.p_mode", [](RunConfig& c, const std::string& v) { c.p_mode = parse_p_mode(trim(v)); });
    plain("fitness.planted", [](RunConfig& c, const std::string& v) {
      c.planted = trim(v);
      BinaryPosition::from_string(c.planted);
    });
    plain("fitness.noise", [](RunConfig& c, const std::string& v) { c.noise = to_real(v); });
    plain("fitness.seed", [](RunConfig& c, const std::string& v) { c.oracle_seed = to_u64(v); });
    t["fitness.cache"] = [](RunConfig& c, const std::string& v, const std::filesystem::path& base) {
      c.cache = to_path(trim(v), base);
    };

    t["phylo.fasta"] = [](RunConfig& c, const std::string& v, const std::filesystem::path& base) {
      c.fasta = to_path(trim(v), base);
    };
    t["phylo.partitions"] = [](RunConfig& c, const std::string& v, const std::filesystem::path& base) {
      c.partitions = to_path(trim(v), base);
    };
    plain("phylo.outgroup", [](RunConfig& c, const std::string& v) { c.outgroup = trim(v); });
    plain("phylo.replicates", [](RunConfig& c, const std::string& v) { c.replicates = to_size(v); });
    plain("phylo.seed", [](RunConfig& c, const std::string& v) { c.bootstrap_seed = to_u64(v); });
    plain("phylo.gap_mode", [](RunConfig& c, const std::string& v) { c.gap_mode = parse_gap_mode(trim(v)); });
    plain("phylo.external_command", [](RunConfig& c, const std::string& v) { c.external_command = trim(v); });

    plain("ga.population", [](RunConfig& c, const std::string& v) { c.pipeline.ga.population = to_size(v); });
    plain("ga.generations", [](RunConfig& c, const std::string& v) { c.pipeline.ga.generations = to_size(v); });
    plain("ga.crossover", [](RunConfig& c, const std::string& v) { c.pipeline.ga.crossover = to_real(v); });
    plain("ga.mutation", [](RunConfig& c, const std::string& v) {
      if (trim(v) == "auto") {
        c.pipeline.ga.mutation.reset();
      } else {
        c.pipeline.ga.mutation = to_real(v);
      }
    });
    plain("ga.tournament", [](RunConfig& c, const std::string& v) { c.pipeline.ga.tournament = to_size(v); });
    plain("ga.elitism", [](RunConfig& c, const std::string& v) { c.pipeline.ga.elitism = to_size(v); });
    plain("ga.systematic_budget",
          [](RunConfig& c, const std::string& v) { c.pipeline.systematic_budget = to_budget(v); });
    plain("ga.random_budget", [](RunConfig& c, const std::string& v) { c.pipeline.random_budget = to_budget(v); });
    plain("ga.ga_budget", [](RunConfig& c, const std::string& v) { c.pipeline.ga_budget = to_budget(v); });
    plain("ga.random_removal_range", [](RunConfig& c, const std::string& v) {
      const auto items = split_list(v);
      if (items.size() != 2) throw std::invalid_argument("expected 'lo, hi'");
      c.pipeline.random_removal_min = to_size(items[0]);
      c.pipeline.random_removal_max = to_size(items[1]);
    });
    plain("ga.target_fitness", [](RunConfig& c, const std::string& v) { c.pipeline.target_fitness = to_real(v); });

    plain("runtime.method", [](RunConfig& c, const std::string& v) { c.method = parse_method(trim(v)); });
    plain("runtime.swarms", [](RunConfig& c, const std::string& v) { c.swarms = to_size(v); });
    plain("runtime.reps", [](RunConfig& c, const std::string& v) { c.reps = to_size(v); });
    plain("runtime.transport", [](RunConfig& c, const std::string& v) { c.transport = parse_transport(trim(v)); });
    plain("runtime.workers", [](RunConfig& c, const std::string& v) { c.workers = to_size(v); });
    plain("runtime.hosts", [](RunConfig& c, const std::string& v) {
      c.hosts.clear();
      for (const auto& item : split_list(v)) {
        if (!item.empty()) c.hosts.push_back(item);
      }
    });
    plain("runtime.port", [](RunConfig& c, const std::string& v) {
      const auto port = to_u64(v);
      if (port > 65535) throw std::invalid_argument("port out of range");
      c.port = static_cast<std::uint16_t>(port);
    });
    plain("runtime.jobs", [](RunConfig& c, const std::string& v) { c.jobs = to_size(v); });

    t["report.dir"] = [](RunConfig& c, const std::string& v, const std::filesystem::path&) {
      c.report_dir = trim(v);
    };
    plain("report.instance", [](RunConfig& c, const std::string& v) { c.instance = trim(v); });
    return t;
  }();
  return table;
}

}  // namespace

std::string_view to_string(Method method) noexcept {
  switch (method) {
    case Method::Bpso1: return "bpso1";
    case Method::Bpso2: return "bpso2";
    case Method::Ga: return "ga";
  }
  return "bpso2";
}

Method parse_method(std::string_view text) {
  if (text == "bpso1") return Method::Bpso1;
  if (text == "bpso2") return Method::Bpso2;
  if (text == "ga") return Method::Ga;
  throw std::invalid_argument("method must be bpso1, bpso2 or ga, got '" + std::string(text) + "'");
}

std::string RunConfig::instance_name() const {
  if (!instance.empty()) return instance;
  if (evaluator == "planted") return "planted";
  return fasta.empty() ? "instance" : fasta.stem().string();
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value,
                   const std::filesystem::path& base_dir) {
  const auto& table = setters();
  auto it = table.find(key);
  if (it == table.end()) throw ConfigError("unknown config key '" + key + "'");
  try {
    it->second(cfg, value, base_dir);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("bad value for '" + key + "': " + e.what());
  }
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + assignment + "'");
  apply_setting(cfg, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)),
                std::filesystem::current_path());
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir, const std::string& source) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(line_no) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    try {
      apply_setting(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), base_dir);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.parent_path(), path.string());
}

void validate(const RunConfig& cfg) {
  try {
    for (std::size_t count : cfg.particle_counts) {
      EngineConfig engine = cfg.engine;
      engine.particles = count;
      engine.variant = cfg.method == Method::Bpso1 ? Variant::VersionI : Variant::VersionII;
      engine.validate();
    }
    cfg.pipeline.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (cfg.swarms == 0 || cfg.reps == 0) throw ConfigError("runtime.swarms and runtime.reps must be positive");
  if (cfg.jobs == 0) throw ConfigError("runtime.jobs must be positive");
  if (cfg.replicates == 0) throw ConfigError("phylo.replicates must be positive");
  if (!(cfg.noise >= 0.0)) throw ConfigError("fitness.noise must be non-negative");
  if (cfg.evaluator == "planted" && cfg.planted.empty()) throw ConfigError("fitness.planted is required");
  if (cfg.evaluator == "phylo" && (cfg.fasta.empty() || cfg.partitions.empty())) {
    throw ConfigError("phylo.fasta and phylo.partitions are required");
  }
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [key, setter] : setters()) keys.push_back(key);
  return keys;
}

std::uint64_t run_seed(std::uint64_t base, std::size_t swarm, std::size_t rep) {
  return mix64(mix64(base + swarm) ^ static_cast<std::uint64_t>(rep));
}

}  // namespace phyloswarm
