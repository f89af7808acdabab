#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "vthink/common/error.hpp"
#include "vthink/gateway/types.hpp"
#include "vthink/pipeline/engine.hpp"

namespace vthink::cli {

enum class ConfigErrc { InvalidValue, MissingValue, UnknownEndpoint, CapabilityMissing, FileNotFound };

std::string_view to_string(ConfigErrc e);

using ConfigError = CodedError<ConfigErrc>;

/// One source of settings (command line or config file). Unset fields defer
/// to the next layer.
struct ConfigLayer {
  std::optional<std::string> manifest;
  std::optional<std::string> data_root;
  std::optional<std::string> endpoints;
  std::optional<std::string> out;
  std::optional<std::string> strategy;
  std::optional<std::size_t> parallelism;
  std::optional<std::int64_t> seed;
  std::optional<std::string> cache_dir;
  std::optional<std::string> on_edit_failure;
  std::optional<std::string> writer;
  std::optional<std::string> writer_backend;
  std::optional<std::size_t> writer_k;
  std::optional<int> writer_attempts;
  std::optional<double> diversity_threshold;
  std::optional<std::string> prompt_table;
  std::optional<std::string> demos;
  std::optional<std::string> understand_backend;
  std::optional<std::string> edit_backend;
  std::optional<std::string> judge_backend;
  std::optional<bool> fail_fast;
  std::optional<int> steps;
  std::optional<double> cfg_text;
  std::optional<double> cfg_image;
};

/// Keys accepted in a JSON config file; each matches a command-line flag
/// with '_' spelled '-'.
const std::vector<std::string>& config_keys();

/// Relative paths in the file are resolved against `base_dir`. Unknown keys
/// and ill-typed values throw ConfigError(InvalidValue).
ConfigLayer layer_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
ConfigLayer load_config_file(const std::filesystem::path& path);

struct RunConfig {
  std::filesystem::path manifest;
  std::filesystem::path data_root;  // defaults to the manifest's directory
  std::filesystem::path endpoints;
  std::filesystem::path out;
  pipeline::ContextStrategy strategy = pipeline::ContextStrategy::Baseline;
  std::size_t parallelism = 1;
  std::optional<std::int64_t> seed;
  std::optional<std::filesystem::path> cache_dir;
  pipeline::EditFailurePolicy on_edit_failure = pipeline::EditFailurePolicy::Fail;
  pipeline::WriterMode writer_mode = pipeline::WriterMode::Library;
  writer::WriterConfig writer;
  std::optional<std::filesystem::path> prompt_table;
  std::optional<std::filesystem::path> demos;
  std::string understand_backend;  // empty: first endpoint with the capability
  std::string edit_backend;
  std::string judge_backend;       // empty: no judging
  bool fail_fast = false;
  gateway::GenParams gen;

  [[nodiscard]] pipeline::PipelineConfig pipeline_config() const;
};

/// CLI layer over file layer over built-in defaults. Throws ConfigError on
/// values that do not parse; does not touch the filesystem.
RunConfig resolve(const ConfigLayer& cli, const ConfigLayer& file);

/// Resolved settings keyed like config_keys(), unset optionals as null.
nlohmann::json to_json(const RunConfig& config);

std::vector<gateway::BackendEndpoint> load_endpoints(const std::filesystem::path& path);

/// Endpoints the run will use, looked up and capability-checked.
struct EndpointSelection {
  gateway::BackendEndpoint understand;
  std::optional<gateway::BackendEndpoint> edit;
  std::optional<gateway::BackendEndpoint> writer;
  std::optional<gateway::BackendEndpoint> judge;
};

/// Throws ConfigError(UnknownEndpoint) for ids missing from the table and
/// ConfigError(CapabilityMissing) when an endpoint lacks what the strategy
/// and writer mode need.
EndpointSelection select_endpoints(const RunConfig& config, const std::vector<gateway::BackendEndpoint>& table);

}  // namespace vthink::cli
