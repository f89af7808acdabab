#include "vthink/config.hpp"

#include <fstream>

#include <fmt/format.h>

namespace vthink::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(ConfigErrc e) {
  switch (e) {
    case ConfigErrc::InvalidValue: return "InvalidValue";
    case ConfigErrc::MissingValue: return "MissingValue";
    case ConfigErrc::UnknownEndpoint: return "UnknownEndpoint";
    case ConfigErrc::CapabilityMissing: return "CapabilityMissing";
    case ConfigErrc::FileNotFound: return "FileNotFound";
  }
  return "ConfigError";
}

namespace {

[[noreturn]] void fail(ConfigErrc code, const std::string& msg) {
  throw ConfigError(code, fmt::format("ConfigError({}): {}", to_string(code), msg));
}

template <typename T>
void read_key(const json& j, std::string_view key, std::optional<T>& slot) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return;
  try {
    if constexpr (std::is_same_v<T, std::size_t>) {
      if (!it->is_number_integer() || it->get<std::int64_t>() < 0) {
        throw std::invalid_argument("expected a non-negative integer");
      }
    } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
      if (!it->is_number_integer()) throw std::invalid_argument("expected an integer");
    }
    slot = it->get<T>();
  } catch (const std::exception& e) {
    fail(ConfigErrc::InvalidValue, fmt::format("config key '{}': {}", key, e.what()));
  }
}

void read_path(const json& j, std::string_view key, const fs::path& base, std::optional<std::string>& slot) {
  read_key(j, key, slot);
  if (slot && !base.empty() && fs::path(*slot).is_relative()) slot = (base / *slot).lexically_normal().string();
}

template <typename T>
const T& pick(const std::optional<T>& cli, const std::optional<T>& file, const T& fallback) {
  if (cli) return *cli;
  if (file) return *file;
  return fallback;
}

template <typename T>
std::optional<T> pick_opt(const std::optional<T>& cli, const std::optional<T>& file) {
  return cli ? cli : file;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "manifest",        "data_root",          "endpoints",      "out",
      "strategy",        "parallelism",        "seed",           "cache_dir",
      "on_edit_failure", "writer",             "writer_backend", "writer_k",
      "writer_attempts", "diversity_threshold", "prompt_table",  "demos",
      "understand_backend", "edit_backend",    "judge_backend",  "fail_fast",
      "steps",           "cfg_text",           "cfg_image"};
  return keys;
}

ConfigLayer layer_from_json(const json& j, const fs::path& base_dir) {
  if (!j.is_object()) fail(ConfigErrc::InvalidValue, "config file must hold a JSON object");
  const auto& keys = config_keys();
  for (const auto& [key, _] : j.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      fail(ConfigErrc::InvalidValue, fmt::format("unknown config key '{}'", key));
    }
  }
  ConfigLayer l;
  read_path(j, "manifest", base_dir, l.manifest);
  read_path(j, "data_root", base_dir, l.data_root);
  read_path(j, "endpoints", base_dir, l.endpoints);
  read_path(j, "out", base_dir, l.out);
  read_key(j, "strategy", l.strategy);
  read_key(j, "parallelism", l.parallelism);
  read_key(j, "seed", l.seed);
  read_path(j, "cache_dir", base_dir, l.cache_dir);
  read_key(j, "on_edit_failure", l.on_edit_failure);
  read_key(j, "writer", l.writer);
  read_key(j, "writer_backend", l.writer_backend);
  read_key(j, "writer_k", l.writer_k);
  read_key(j, "writer_attempts", l.writer_attempts);
  read_key(j, "diversity_threshold", l.diversity_threshold);
  read_path(j, "prompt_table", base_dir, l.prompt_table);
  read_path(j, "demos", base_dir, l.demos);
  read_key(j, "understand_backend", l.understand_backend);
  read_key(j, "edit_backend", l.edit_backend);
  read_key(j, "judge_backend", l.judge_backend);
  read_key(j, "fail_fast", l.fail_fast);
  read_key(j, "steps", l.steps);
  read_key(j, "cfg_text", l.cfg_text);
  read_key(j, "cfg_image", l.cfg_image);
  return l;
}

ConfigLayer load_config_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ConfigErrc::FileNotFound, fmt::format("cannot open config file {}", path.string()));
  auto j = json::parse(in, nullptr, false);
  if (j.is_discarded()) fail(ConfigErrc::InvalidValue, fmt::format("{} is not valid JSON", path.string()));
  return layer_from_json(j, path.parent_path());
}

pipeline::PipelineConfig RunConfig::pipeline_config() const {
  pipeline::PipelineConfig pc;
  pc.strategy = strategy;
  pc.gen = gen;
  pc.gen.seed = seed;
  pc.writer_mode = writer_mode;
  pc.writer = writer;
  pc.on_edit_failure = on_edit_failure;
  pc.parallelism = parallelism;
  pc.fail_fast = fail_fast;
  return pc;
}

RunConfig resolve(const ConfigLayer& cli, const ConfigLayer& file) {
  RunConfig c;
  const std::string empty;

  c.manifest = pick(cli.manifest, file.manifest, empty);
  auto data_root = pick_opt(cli.data_root, file.data_root);
  c.data_root = data_root ? fs::path(*data_root) : c.manifest.parent_path();
  c.endpoints = pick(cli.endpoints, file.endpoints, empty);
  c.out = pick(cli.out, file.out, empty);

  auto strategy = pick(cli.strategy, file.strategy, std::string("baseline"));
  if (auto s = pipeline::parse_strategy(strategy)) {
    c.strategy = *s;
  } else {
    fail(ConfigErrc::InvalidValue,
         fmt::format("strategy '{}' (expected baseline, replace, concat or textual-cot)", strategy));
  }

  c.parallelism = pick(cli.parallelism, file.parallelism, std::size_t{1});
  if (c.parallelism < 1) fail(ConfigErrc::InvalidValue, "parallelism must be >= 1");
  c.seed = pick_opt(cli.seed, file.seed);
  if (auto dir = pick_opt(cli.cache_dir, file.cache_dir)) c.cache_dir = *dir;

  auto policy = pick(cli.on_edit_failure, file.on_edit_failure, std::string("fail"));
  if (auto p = pipeline::parse_edit_failure_policy(policy)) {
    c.on_edit_failure = *p;
  } else {
    fail(ConfigErrc::InvalidValue, fmt::format("on-edit-failure '{}' (expected fail or fallback)", policy));
  }

  auto mode = pick(cli.writer, file.writer, std::string("library"));
  if (auto m = pipeline::parse_writer_mode(mode)) {
    c.writer_mode = *m;
  } else {
    fail(ConfigErrc::InvalidValue, fmt::format("writer '{}' (expected off, library or auto)", mode));
  }
  c.writer.writer_backend = pick(cli.writer_backend, file.writer_backend, empty);
  c.writer.k = pick(cli.writer_k, file.writer_k, writer::WriterConfig{}.k);
  c.writer.max_attempts = pick(cli.writer_attempts, file.writer_attempts, writer::WriterConfig{}.max_attempts);
  c.writer.diversity_threshold =
      pick(cli.diversity_threshold, file.diversity_threshold, writer::WriterConfig{}.diversity_threshold);
  try {
    writer::validate(c.writer, c.writer.k);
  } catch (const writer::WriterError& e) {
    fail(ConfigErrc::InvalidValue, e.what());
  }

  if (auto p = pick_opt(cli.prompt_table, file.prompt_table)) c.prompt_table = *p;
  if (auto p = pick_opt(cli.demos, file.demos)) c.demos = *p;
  c.understand_backend = pick(cli.understand_backend, file.understand_backend, empty);
  c.edit_backend = pick(cli.edit_backend, file.edit_backend, empty);
  c.judge_backend = pick(cli.judge_backend, file.judge_backend, empty);
  c.fail_fast = pick(cli.fail_fast, file.fail_fast, false);

  c.gen.steps = pick(cli.steps, file.steps, gateway::GenParams{}.steps);
  c.gen.cfg_text = pick(cli.cfg_text, file.cfg_text, gateway::GenParams{}.cfg_text);
  c.gen.cfg_image = pick(cli.cfg_image, file.cfg_image, gateway::GenParams{}.cfg_image);
  try {
    c.gen.validate();
  } catch (const std::invalid_argument& e) {
    fail(ConfigErrc::InvalidValue, e.what());
  }
  return c;
}

json to_json(const RunConfig& c) {
  auto opt_path = [](const std::optional<fs::path>& p) { return p ? json(p->string()) : json(nullptr); };
  return {{"manifest", c.manifest.string()},
          {"data_root", c.data_root.string()},
          {"endpoints", c.endpoints.string()},
          {"out", c.out.string()},
          {"strategy", pipeline::to_string(c.strategy)},
          {"parallelism", c.parallelism},
          {"seed", c.seed ? json(*c.seed) : json(nullptr)},
          {"cache_dir", opt_path(c.cache_dir)},
          {"on_edit_failure", pipeline::to_string(c.on_edit_failure)},
          {"writer", pipeline::to_string(c.writer_mode)},
          {"writer_backend", c.writer.writer_backend},
          {"writer_k", c.writer.k},
          {"writer_attempts", c.writer.max_attempts},
          {"diversity_threshold", c.writer.diversity_threshold},
          {"prompt_table", opt_path(c.prompt_table)},
          {"demos", opt_path(c.demos)},
          {"understand_backend", c.understand_backend},
          {"edit_backend", c.edit_backend},
          {"judge_backend", c.judge_backend},
          {"fail_fast", c.fail_fast},
          {"steps", c.gen.steps},
          {"cfg_text", c.gen.cfg_text},
          {"cfg_image", c.gen.cfg_image}};
}

std::vector<gateway::BackendEndpoint> load_endpoints(const fs::path& path) {
  if (path.empty()) fail(ConfigErrc::MissingValue, "no endpoint table given (--endpoints)");
  std::ifstream in(path);
  if (!in) fail(ConfigErrc::FileNotFound, fmt::format("cannot open endpoint table {}", path.string()));
  std::vector<gateway::BackendEndpoint> table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    auto j = json::parse(line, nullptr, false);
    if (j.is_discarded()) fail(ConfigErrc::InvalidValue, fmt::format("{}:{}: not JSON", path.string(), lineno));
    try {
      auto e = gateway::endpoint_from_json(j);
      for (const auto& prior : table) {
        if (prior.id == e.id) {
          fail(ConfigErrc::InvalidValue, fmt::format("{}:{}: duplicate endpoint id '{}'", path.string(), lineno, e.id));
        }
      }
      table.push_back(std::move(e));
    } catch (const std::invalid_argument& e) {
      fail(ConfigErrc::InvalidValue, fmt::format("{}:{}: {}", path.string(), lineno, e.what()));
    }
  }
  return table;
}

namespace {

gateway::BackendEndpoint pick_endpoint(const std::vector<gateway::BackendEndpoint>& table, const std::string& id,
                                       gateway::Capability cap, std::string_view role) {
  if (id.empty()) {
    for (const auto& e : table) {
      if (e.has(cap)) return e;
    }
    fail(ConfigErrc::CapabilityMissing,
         fmt::format("no endpoint in the table offers '{}' (needed for {})", gateway::to_string(cap), role));
  }
  for (const auto& e : table) {
    if (e.id != id) continue;
    if (!e.has(cap)) {
      fail(ConfigErrc::CapabilityMissing,
           fmt::format("endpoint '{}' ({}) lacks capability '{}'", id, role, gateway::to_string(cap)));
    }
    return e;
  }
  fail(ConfigErrc::UnknownEndpoint, fmt::format("{} endpoint '{}' is not in the endpoint table", role, id));
}

}  // namespace

EndpointSelection select_endpoints(const RunConfig& config, const std::vector<gateway::BackendEndpoint>& table) {
  using gateway::Capability;
  EndpointSelection s{pick_endpoint(table, config.understand_backend, Capability::Understand, "understand"),
                      std::nullopt, std::nullopt, std::nullopt};
  bool thought = pipeline::needs_thought(config.strategy);
  if (thought || !config.edit_backend.empty()) {
    s.edit = pick_endpoint(table, config.edit_backend, Capability::Edit, "edit");
  }
  if ((thought && config.writer_mode == pipeline::WriterMode::Auto) || !config.writer.writer_backend.empty()) {
    s.writer = pick_endpoint(table, config.writer.writer_backend, Capability::Write, "writer");
  }
  if (!config.judge_backend.empty()) {
    s.judge = pick_endpoint(table, config.judge_backend, Capability::Judge, "judge");
  }
  return s;
}

}  // namespace vthink::cli
