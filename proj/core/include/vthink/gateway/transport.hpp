#pragma once

#include <atomic>
#include <chrono>
#include <map>
#include <memory>
#include <string>

#include "vthink/common/error.hpp"
#include "vthink/gateway/types.hpp"

namespace vthink::gateway {

struct HttpRequest {
  std::string route;
  std::string body;
  std::chrono::milliseconds timeout{0};
  std::string sample_id;  // sent as X-Sample-Id; keys transcripts and scripted mocks
  std::map<std::string, std::string> headers;
};

struct HttpResult {
  int status = 0;
  std::string body;
};

enum class TransportFaultKind { Timeout, Connection };

/// Thrown by transports when no HTTP response was obtained.
class TransportFault : public Error {
 public:
  TransportFault(TransportFaultKind kind, const std::string& message) : Error(message), kind_(kind) {}
  [[nodiscard]] TransportFaultKind kind() const noexcept { return kind_; }

 private:
  TransportFaultKind kind_;
};

/// A single POST of a JSON body. Implementations must be safe for concurrent use.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResult post(const BackendEndpoint& endpoint, const HttpRequest& request) = 0;
};

/// Real network transport over cpp-httplib. One connection per call.
class HttpTransport final : public Transport {
 public:
  HttpResult post(const BackendEndpoint& endpoint, const HttpRequest& request) override;
};

/// Fails every call and counts attempts. Installed where the network must not be used.
class DenyTransport final : public Transport {
 public:
  HttpResult post(const BackendEndpoint& endpoint, const HttpRequest& request) override;
  [[nodiscard]] int attempts() const noexcept { return attempts_.load(); }

 private:
  std::atomic<int> attempts_{0};
};

}  // namespace vthink::gateway
