#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "vthink/gateway/transport.hpp"
#include "vthink/gateway/types.hpp"

namespace vthink::gateway {

struct RetryPolicy {
  std::chrono::milliseconds base_backoff{250};
  std::chrono::milliseconds max_backoff{8000};
  std::function<void(std::chrono::milliseconds)> sleep;  // defaults to this_thread::sleep_for

  /// Delay before retry number `retry` (1-based): base * 2^(retry-1), capped.
  [[nodiscard]] std::chrono::milliseconds backoff(int retry) const;
};

struct CallTrace {
  int attempts = 0;
  std::vector<std::chrono::milliseconds> backoffs;
  double latency_ms = 0;  // wall time across all attempts
};

/// Uniform client over one backend endpoint. 5xx responses and transport
/// faults are retried with exponential backoff; 4xx responses and schema
/// violations are not. Safe for concurrent use.
class BackendClient {
 public:
  BackendClient(BackendEndpoint endpoint, std::shared_ptr<Transport> transport,
                RetryPolicy retry = {});

  EditResponse edit(const EditRequest& request, const std::string& sample_id = {},
                    CallTrace* trace = nullptr) const;
  UnderstandResponse understand(const UnderstandRequest& request, const std::string& sample_id = {},
                                CallTrace* trace = nullptr) const;
  JudgeResponse judge(const JudgeRequest& request, const std::string& sample_id = {},
                      CallTrace* trace = nullptr) const;
  WriteResponse write(const WriteRequest& request, const std::string& sample_id = {},
                      CallTrace* trace = nullptr) const;

  [[nodiscard]] const BackendEndpoint& endpoint() const noexcept { return endpoint_; }

 private:
  nlohmann::json call(Capability cap, std::string_view route, const nlohmann::json& body,
                      const std::string& sample_id, CallTrace* trace) const;

  BackendEndpoint endpoint_;
  std::shared_ptr<Transport> transport_;
  RetryPolicy retry_;
};

}  // namespace vthink::gateway
