#include "vthink/gateway/client.hpp"

#include <cstdlib>
#include <thread>

#include <fmt/format.h>

namespace vthink::gateway {

using nlohmann::json;

std::chrono::milliseconds RetryPolicy::backoff(int retry) const {
  auto delay = base_backoff;
  for (int i = 1; i < retry && delay < max_backoff; ++i) delay *= 2;
  return std::min(delay, max_backoff);
}

BackendClient::BackendClient(BackendEndpoint endpoint, std::shared_ptr<Transport> transport,
                             RetryPolicy retry)
    : endpoint_(std::move(endpoint)), transport_(std::move(transport)), retry_(std::move(retry)) {
  if (!retry_.sleep) {
    retry_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
}

json BackendClient::call(Capability cap, std::string_view route, const json& body,
                         const std::string& sample_id, CallTrace* trace) const {
  CallTrace local;
  CallTrace& t = trace != nullptr ? *trace : local;
  t = CallTrace{};

  if (!endpoint_.has(cap)) {
    throw GatewayError(GatewayErrc::CapabilityMissing,
                       fmt::format("CapabilityMissing: endpoint '{}' lacks '{}'", endpoint_.id,
                                   to_string(cap)));
  }

  HttpRequest req;
  req.route = std::string(route);
  req.body = body.dump();
  req.timeout = std::chrono::milliseconds(endpoint_.timeout_ms);
  req.sample_id = sample_id;
  req.headers["Content-Type"] = "application/json";
  if (!endpoint_.token_env.empty()) {
    if (const char* token = std::getenv(endpoint_.token_env.c_str()); token != nullptr && *token) {
      req.headers["Authorization"] = fmt::format("Bearer {}", token);
    }
  }

  const int max_attempts = 1 + endpoint_.max_retries;
  const auto started = std::chrono::steady_clock::now();
  auto elapsed_ms = [&] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
        .count();
  };

  GatewayErrc last_code = GatewayErrc::TransportError;
  std::string last_message;
  int last_status = 0;

  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    if (attempt > 1) {
      auto delay = retry_.backoff(attempt - 1);
      t.backoffs.push_back(delay);
      retry_.sleep(delay);
    }
    t.attempts = attempt;

    HttpResult result;
    try {
      result = transport_->post(endpoint_, req);
    } catch (const TransportFault& fault) {
      last_code = fault.kind() == TransportFaultKind::Timeout ? GatewayErrc::Timeout
                                                              : GatewayErrc::TransportError;
      last_message = fault.what();
      last_status = 0;
      continue;
    }

    if (result.status == 200) {
      t.latency_ms = elapsed_ms();
      auto parsed = json::parse(result.body, nullptr, false);
      if (parsed.is_discarded() || !parsed.is_object()) {
        throw GatewayError(GatewayErrc::ProtocolError,
                           fmt::format("ProtocolError: {}{} returned a non-object body",
                                       endpoint_.id, route),
                           attempt, 200);
      }
      return parsed;
    }

    if (result.status >= 500) {
      last_code = GatewayErrc::TransportError;
      last_status = result.status;
      last_message = fmt::format("HTTP {}", result.status);
      continue;
    }

    // 4xx and anything else unexpected is permanent.
    auto err = json::parse(result.body, nullptr, false);
    std::string remote_code;
    std::string message;
    if (err.is_object()) {
      if (err.contains("error_code") && err["error_code"].is_string()) remote_code = err["error_code"];
      if (err.contains("message") && err["message"].is_string()) message = err["message"];
    }
    t.latency_ms = elapsed_ms();
    throw GatewayError(GatewayErrc::ProtocolError,
                       fmt::format("ProtocolError: {}{} rejected the request with HTTP {} ({}: {})",
                                   endpoint_.id, route, result.status, remote_code, message),
                       attempt, result.status, remote_code);
  }

  t.latency_ms = elapsed_ms();
  throw GatewayError(last_code,
                     fmt::format("{}: {}{} failed after {} attempt(s): {}", to_string(last_code),
                                 endpoint_.id, route, t.attempts, last_message),
                     t.attempts, last_status);
}

namespace {

template <typename Decode>
auto decode_checked(Decode&& decode, const json& body, const CallTrace& trace) {
  try {
    return decode(body);
  } catch (const GatewayError& e) {
    throw GatewayError(e.code(), e.what(), trace.attempts, 200);
  }
}

}  // namespace

EditResponse BackendClient::edit(const EditRequest& request, const std::string& sample_id,
                                 CallTrace* trace) const {
  CallTrace local;
  CallTrace& t = trace != nullptr ? *trace : local;
  auto body = call(Capability::Edit, kEditRoute, encode(request), sample_id, &t);
  auto response = decode_checked(decode_edit_response, body, t);
  if (!(response.params == request.params)) {
    throw GatewayError(GatewayErrc::ProtocolError,
                       fmt::format("ProtocolError: {} echoed params {} for request params {}",
                                   endpoint_.id, to_json(response.params).dump(),
                                   to_json(request.params).dump()),
                       t.attempts, 200);
  }
  return response;
}

UnderstandResponse BackendClient::understand(const UnderstandRequest& request,
                                             const std::string& sample_id, CallTrace* trace) const {
  if (request.images.empty() || request.images.size() > 2) {
    throw GatewayError(GatewayErrc::ProtocolError,
                       fmt::format("ProtocolError: understand requests carry 1 or 2 images, got {}",
                                   request.images.size()));
  }
  CallTrace local;
  CallTrace& t = trace != nullptr ? *trace : local;
  auto body = call(Capability::Understand, kUnderstandRoute, encode(request), sample_id, &t);
  return decode_checked(decode_understand_response, body, t);
}

JudgeResponse BackendClient::judge(const JudgeRequest& request, const std::string& sample_id,
                                   CallTrace* trace) const {
  CallTrace local;
  CallTrace& t = trace != nullptr ? *trace : local;
  auto body = call(Capability::Judge, kJudgeRoute, encode(request), sample_id, &t);
  return decode_checked(decode_judge_response, body, t);
}

WriteResponse BackendClient::write(const WriteRequest& request, const std::string& sample_id,
                                   CallTrace* trace) const {
  CallTrace local;
  CallTrace& t = trace != nullptr ? *trace : local;
  auto body = call(Capability::Write, kWriteRoute, encode(request), sample_id, &t);
  return decode_checked(decode_write_response, body, t);
}

}  // namespace vthink::gateway
