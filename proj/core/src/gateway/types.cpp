#include "vthink/gateway/types.hpp"

#include <set>
#include <stdexcept>

#include <fmt/format.h>

#include "vthink/bench/image_store.hpp"
#include "vthink/common/base64.hpp"
#include "vthink/common/text.hpp"

namespace vthink::gateway {

using nlohmann::json;

void GenParams::validate() const {
  if (steps < 1) throw std::invalid_argument("GenParams: steps must be >= 1");
  if (!(cfg_text > 0)) throw std::invalid_argument("GenParams: cfg_text must be > 0");
  if (!(cfg_image > 0)) throw std::invalid_argument("GenParams: cfg_image must be > 0");
}

std::string_view to_string(GatewayErrc e) {
  switch (e) {
    case GatewayErrc::Timeout: return "Timeout";
    case GatewayErrc::TransportError: return "TransportError";
    case GatewayErrc::ProtocolError: return "ProtocolError";
    case GatewayErrc::CapabilityMissing: return "CapabilityMissing";
  }
  return "TransportError";
}

GatewayError::GatewayError(GatewayErrc code, const std::string& message, int attempts,
                           int http_status, std::string remote_code)
    : CodedError(code, message),
      attempts_(attempts),
      http_status_(http_status),
      remote_code_(std::move(remote_code)) {}

namespace {

[[noreturn]] void protocol(const std::string& msg) {
  throw GatewayError(GatewayErrc::ProtocolError, "ProtocolError: " + msg);
}

const json& field(const json& j, const char* name) {
  if (!j.is_object()) protocol("body is not a JSON object");
  auto it = j.find(name);
  if (it == j.end()) protocol(fmt::format("missing field '{}'", name));
  return *it;
}

std::string string_field(const json& j, const char* name) {
  const auto& v = field(j, name);
  if (!v.is_string()) protocol(fmt::format("field '{}' must be a string", name));
  return v.get<std::string>();
}

double number_field(const json& j, const char* name) {
  const auto& v = field(j, name);
  if (!v.is_number()) protocol(fmt::format("field '{}' must be a number", name));
  return v.get<double>();
}

Bytes image_field(const json& j, const char* name) {
  auto decoded = base64_decode(string_field(j, name));
  if (!decoded) protocol(fmt::format("field '{}' is not valid base64", name));
  if (!bench::sniff_image_format(*decoded)) {
    protocol(fmt::format("field '{}' does not decode to a recognised image", name));
  }
  return std::move(*decoded);
}

std::vector<bench::Option> options_field(const json& j) {
  const auto& arr = field(j, "options");
  if (!arr.is_array()) protocol("field 'options' must be an array");
  std::vector<bench::Option> out;
  std::set<std::string> labels;
  for (const auto& o : arr) {
    bench::Option opt{string_field(o, "label"), string_field(o, "text")};
    if (!labels.insert(text::to_upper(opt.label)).second) {
      protocol(fmt::format("duplicate option label '{}'", opt.label));
    }
    out.push_back(std::move(opt));
  }
  return out;
}

json options_json(const std::vector<bench::Option>& options) {
  json arr = json::array();
  for (const auto& o : options) arr.push_back({{"label", o.label}, {"text", o.text}});
  return arr;
}

}  // namespace

json to_json(const GenParams& p) {
  json j = {{"steps", p.steps}, {"cfg_text", p.cfg_text}, {"cfg_image", p.cfg_image}};
  j["seed"] = p.seed ? json(*p.seed) : json(nullptr);
  return j;
}

GenParams gen_params_from_json(const json& j) {
  GenParams p;
  const auto& steps = field(j, "steps");
  if (!steps.is_number_integer()) protocol("field 'steps' must be an integer");
  p.steps = steps.get<int>();
  p.cfg_text = number_field(j, "cfg_text");
  p.cfg_image = number_field(j, "cfg_image");
  if (auto it = j.find("seed"); it != j.end() && !it->is_null()) {
    if (!it->is_number_integer()) protocol("field 'seed' must be an integer or null");
    p.seed = it->get<std::int64_t>();
  }
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    protocol(e.what());
  }
  return p;
}

std::string_view to_string(Capability c) {
  switch (c) {
    case Capability::Edit: return "edit";
    case Capability::Understand: return "understand";
    case Capability::Judge: return "judge";
    case Capability::Write: return "write";
  }
  return "edit";
}

std::optional<Capability> parse_capability(std::string_view s) {
  for (auto c : {Capability::Edit, Capability::Understand, Capability::Judge, Capability::Write}) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

bool is_well_formed_url(std::string_view url) {
  std::string_view rest;
  for (std::string_view scheme : {"http://", "https://", "mock://"}) {
    if (url.starts_with(scheme)) rest = url.substr(scheme.size());
  }
  if (rest.empty()) return false;
  auto host_end = rest.find_first_of("/?");
  auto authority = rest.substr(0, host_end);
  if (authority.empty() || authority.front() == ':') return false;
  for (char c : authority) {
    if (c == ' ' || c == '@') return false;
  }
  if (auto colon = authority.rfind(':'); colon != std::string_view::npos) {
    auto port = authority.substr(colon + 1);
    if (port.empty() || port.size() > 5) return false;
    for (char c : port) {
      if (c < '0' || c > '9') return false;
    }
  }
  return true;
}

BackendEndpoint endpoint_from_json(const json& rec) {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("endpoint: " + msg); };
  if (!rec.is_object()) fail("record is not a JSON object");
  BackendEndpoint e;
  if (!rec.contains("id") || !rec["id"].is_string()) fail("'id' must be a string");
  e.id = rec["id"].get<std::string>();
  if (e.id.empty()) fail("'id' must not be empty");
  if (!rec.contains("url") || !rec["url"].is_string()) fail(fmt::format("{}: 'url' must be a string", e.id));
  e.base_url = rec["url"].get<std::string>();
  if (!is_well_formed_url(e.base_url)) fail(fmt::format("{}: malformed url '{}'", e.id, e.base_url));
  if (!rec.contains("capabilities") || !rec["capabilities"].is_array()) {
    fail(fmt::format("{}: 'capabilities' must be an array", e.id));
  }
  for (const auto& c : rec["capabilities"]) {
    auto cap = c.is_string() ? parse_capability(c.get<std::string>()) : std::nullopt;
    if (!cap) fail(fmt::format("{}: unknown capability {}", e.id, c.dump()));
    e.capabilities.insert(*cap);
  }
  if (rec.contains("timeout_ms")) {
    if (!rec["timeout_ms"].is_number_integer() || rec["timeout_ms"].get<int>() <= 0) {
      fail(fmt::format("{}: 'timeout_ms' must be a positive integer", e.id));
    }
    e.timeout_ms = rec["timeout_ms"].get<int>();
  }
  if (rec.contains("max_retries")) {
    if (!rec["max_retries"].is_number_integer() || rec["max_retries"].get<int>() < 0) {
      fail(fmt::format("{}: 'max_retries' must be a non-negative integer", e.id));
    }
    e.max_retries = rec["max_retries"].get<int>();
  }
  if (rec.contains("token_env") && !rec["token_env"].is_null()) {
    if (!rec["token_env"].is_string()) fail(fmt::format("{}: 'token_env' must be a string", e.id));
    e.token_env = rec["token_env"].get<std::string>();
  }
  return e;
}

json endpoint_to_json(const BackendEndpoint& e) {
  json caps = json::array();
  for (auto c : e.capabilities) caps.push_back(to_string(c));
  json j = {{"id", e.id},
            {"url", e.base_url},
            {"capabilities", caps},
            {"timeout_ms", e.timeout_ms},
            {"max_retries", e.max_retries}};
  if (!e.token_env.empty()) j["token_env"] = e.token_env;
  return j;
}

std::string_view to_string(AnswerMode m) {
  return m == AnswerMode::Plain ? "plain" : "textual-cot";
}

json encode(const EditRequest& r) {
  return {{"image_b64", base64_encode(r.image)},
          {"instruction", r.instruction},
          {"params", to_json(r.params)}};
}

json encode(const UnderstandRequest& r) {
  json images = json::array();
  for (const auto& img : r.images) images.push_back(base64_encode(img));
  std::string question = r.question;
  if (r.mode == AnswerMode::TextualCot) {
    question += "\n";
    question += kThinkStepDirective;
  }
  return {{"images_b64", images},
          {"question", question},
          {"options", options_json(r.options)},
          {"mode", to_string(r.mode)}};
}

json encode(const JudgeRequest& r) {
  return {{"image_b64", base64_encode(r.original)},
          {"edited_b64", base64_encode(r.edited)},
          {"instruction", r.instruction}};
}

json encode(const WriteRequest& r) {
  json demos = json::array();
  for (const auto& d : r.demonstrations) demos.push_back({{"question", d.question}, {"prompt", d.prompt}});
  return {{"question", r.question},
          {"image_b64", base64_encode(r.image)},
          {"demonstrations", demos},
          {"instruction", r.instruction}};
}

json encode(const EditResponse& r) {
  return {{"image_b64", base64_encode(r.image)},
          {"params", to_json(r.params)},
          {"latency_ms", r.latency_ms}};
}

json encode(const UnderstandResponse& r) {
  return {{"answer_text", r.answer_text}, {"latency_ms", r.latency_ms}};
}

json encode(const JudgeResponse& r) {
  return {{"semantic_consistency", r.semantic_consistency},
          {"perceptual_quality", r.perceptual_quality},
          {"rationale", r.rationale}};
}

json encode(const WriteResponse& r) { return {{"prompt", r.prompt}}; }

EditRequest decode_edit_request(const json& j) {
  EditRequest r;
  r.image = image_field(j, "image_b64");
  r.instruction = string_field(j, "instruction");
  r.params = gen_params_from_json(field(j, "params"));
  return r;
}

UnderstandRequest decode_understand_request(const json& j) {
  UnderstandRequest r;
  const auto& images = field(j, "images_b64");
  if (!images.is_array()) protocol("field 'images_b64' must be an array");
  if (images.size() < 1 || images.size() > 2) {
    protocol(fmt::format("'images_b64' must hold 1 or 2 images, got {}", images.size()));
  }
  for (const auto& img : images) {
    if (!img.is_string()) protocol("'images_b64' entries must be strings");
    auto decoded = base64_decode(img.get<std::string>());
    if (!decoded || !bench::sniff_image_format(*decoded)) protocol("'images_b64' entry is not an image");
    r.images.push_back(std::move(*decoded));
  }
  r.question = string_field(j, "question");
  r.options = options_field(j);
  auto mode = string_field(j, "mode");
  if (mode == "plain") {
    r.mode = AnswerMode::Plain;
  } else if (mode == "textual-cot") {
    r.mode = AnswerMode::TextualCot;
  } else {
    protocol(fmt::format("unknown mode '{}'", mode));
  }
  return r;
}

JudgeRequest decode_judge_request(const json& j) {
  return {image_field(j, "image_b64"), image_field(j, "edited_b64"), string_field(j, "instruction")};
}

WriteRequest decode_write_request(const json& j) {
  WriteRequest r;
  r.question = string_field(j, "question");
  r.image = image_field(j, "image_b64");
  const auto& demos = field(j, "demonstrations");
  if (!demos.is_array()) protocol("field 'demonstrations' must be an array");
  for (const auto& d : demos) r.demonstrations.push_back({string_field(d, "question"), string_field(d, "prompt")});
  if (auto it = j.find("instruction"); it != j.end() && it->is_string()) r.instruction = it->get<std::string>();
  return r;
}

EditResponse decode_edit_response(const json& j) {
  EditResponse r;
  r.image = image_field(j, "image_b64");
  r.params = gen_params_from_json(field(j, "params"));
  r.latency_ms = number_field(j, "latency_ms");
  return r;
}

UnderstandResponse decode_understand_response(const json& j) {
  return {string_field(j, "answer_text"), number_field(j, "latency_ms")};
}

JudgeResponse decode_judge_response(const json& j) {
  JudgeResponse r;
  r.semantic_consistency = number_field(j, "semantic_consistency");
  r.perceptual_quality = number_field(j, "perceptual_quality");
  for (auto [name, v] : {std::pair{"semantic_consistency", r.semantic_consistency},
                         std::pair{"perceptual_quality", r.perceptual_quality}}) {
    if (!(v >= 0.0 && v <= 10.0)) protocol(fmt::format("'{}' = {} is outside [0, 10]", name, v));
  }
  if (auto it = j.find("rationale"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) protocol("field 'rationale' must be a string");
    r.rationale = it->get<std::string>();
  }
  return r;
}

WriteResponse decode_write_response(const json& j) { return {string_field(j, "prompt")}; }

json error_body(std::string_view error_code, std::string_view message) {
  return {{"error_code", error_code}, {"message", message}};
}

}  // namespace vthink::gateway
