#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "vthink/bench/manifest.hpp"
#include "vthink/common/bytes.hpp"
#include "vthink/common/error.hpp"

namespace vthink::gateway {

/// Diffusion settings for one edit. Defaults: 30 denoising steps, text
/// guidance 4.0, image guidance 1.0.
struct GenParams {
  int steps = 30;
  double cfg_text = 4.0;
  double cfg_image = 1.0;
  std::optional<std::int64_t> seed;

  void validate() const;  // throws std::invalid_argument
  bool operator==(const GenParams&) const = default;
};

nlohmann::json to_json(const GenParams& p);
GenParams gen_params_from_json(const nlohmann::json& j);  // throws GatewayError(ProtocolError)

enum class Capability { Edit, Understand, Judge, Write };

std::string_view to_string(Capability c);
std::optional<Capability> parse_capability(std::string_view s);

struct BackendEndpoint {
  std::string id;
  std::string base_url;
  std::set<Capability> capabilities;
  int timeout_ms = 120000;
  int max_retries = 2;
  std::string token_env;  // name of the env var holding a bearer token; may be empty
  // Representation-level fusion cannot be expressed over the wire protocol.
  bool supports_feature_fusion = false;

  [[nodiscard]] bool has(Capability c) const { return capabilities.contains(c); }
};

/// Accepts http://, https:// and mock:// URLs with a non-empty host.
bool is_well_formed_url(std::string_view url);

/// Parses one endpoint-table record; throws std::invalid_argument.
BackendEndpoint endpoint_from_json(const nlohmann::json& rec);
nlohmann::json endpoint_to_json(const BackendEndpoint& e);

struct EditRequest {
  Bytes image;
  std::string instruction;
  GenParams params;
};

struct EditResponse {
  Bytes image;
  GenParams params;
  double latency_ms = 0;
};

enum class AnswerMode { Plain, TextualCot };

std::string_view to_string(AnswerMode m);

/// Appended to the question in textual-cot mode.
inline constexpr std::string_view kThinkStepDirective =
    "Think step by step and explain your reasoning before giving the final answer.";

struct UnderstandRequest {
  std::vector<Bytes> images;  // original first
  std::string question;
  std::vector<bench::Option> options;
  AnswerMode mode = AnswerMode::Plain;
};

struct UnderstandResponse {
  std::string answer_text;
  double latency_ms = 0;
};

struct JudgeRequest {
  Bytes original;
  Bytes edited;
  std::string instruction;
};

struct JudgeResponse {
  double semantic_consistency = 0;
  double perceptual_quality = 0;
  std::string rationale;

  bool operator==(const JudgeResponse&) const = default;
};

struct WriteDemonstration {
  std::string question;
  std::string prompt;
};

struct WriteRequest {
  std::string question;
  Bytes image;
  std::vector<WriteDemonstration> demonstrations;
  std::string instruction;
};

struct WriteResponse {
  std::string prompt;
};

inline constexpr std::string_view kEditRoute = "/v1/edit";
inline constexpr std::string_view kUnderstandRoute = "/v1/understand";
inline constexpr std::string_view kJudgeRoute = "/v1/judge";
inline constexpr std::string_view kWriteRoute = "/v1/write";

enum class GatewayErrc { Timeout, TransportError, ProtocolError, CapabilityMissing };

std::string_view to_string(GatewayErrc e);

class GatewayError : public CodedError<GatewayErrc> {
 public:
  GatewayError(GatewayErrc code, const std::string& message, int attempts = 0, int http_status = 0,
               std::string remote_code = {});

  [[nodiscard]] int attempts() const noexcept { return attempts_; }
  [[nodiscard]] int http_status() const noexcept { return http_status_; }
  [[nodiscard]] const std::string& remote_code() const noexcept { return remote_code_; }

 private:
  int attempts_;
  int http_status_;
  std::string remote_code_;
};

// Wire codecs. Encoders produce the exact request bodies; decoders validate
// schema and invariants and throw GatewayError(ProtocolError).
nlohmann::json encode(const EditRequest& r);
nlohmann::json encode(const UnderstandRequest& r);
nlohmann::json encode(const JudgeRequest& r);
nlohmann::json encode(const WriteRequest& r);
nlohmann::json encode(const EditResponse& r);
nlohmann::json encode(const UnderstandResponse& r);
nlohmann::json encode(const JudgeResponse& r);
nlohmann::json encode(const WriteResponse& r);

EditRequest decode_edit_request(const nlohmann::json& j);
UnderstandRequest decode_understand_request(const nlohmann::json& j);
JudgeRequest decode_judge_request(const nlohmann::json& j);
WriteRequest decode_write_request(const nlohmann::json& j);
EditResponse decode_edit_response(const nlohmann::json& j);
UnderstandResponse decode_understand_response(const nlohmann::json& j);
JudgeResponse decode_judge_response(const nlohmann::json& j);
WriteResponse decode_write_response(const nlohmann::json& j);

nlohmann::json error_body(std::string_view error_code, std::string_view message);

}  // namespace vthink::gateway
