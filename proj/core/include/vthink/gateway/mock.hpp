#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vthink/gateway/transport.hpp"

namespace vthink::gateway {

/// In-process backend speaking the wire protocol. Requests are decoded from
/// the serialized JSON body exactly as a server would see them, so base64 and
/// schema handling are exercised end to end. Every built-in handler is a pure
/// function of (request, script).
class MockBackend final : public Transport {
 public:
  using Handler = std::function<HttpResult(const nlohmann::json& body, const std::string& sample_id)>;

  enum class FaultKind { Timeout, Connection, ServerError, BadRequest, Malformed };

  struct Fault {
    FaultKind kind = FaultKind::ServerError;
    int times = -1;          // -1: every matching call
    std::string sample_id;   // empty: any sample
  };

  struct CapturedCall {
    std::string route;
    std::string sample_id;
    nlohmann::json body;
  };

  MockBackend& on(std::string_view route, Handler handler);
  MockBackend& inject(std::string_view route, Fault fault);
  MockBackend& set_latency(std::chrono::milliseconds latency);
  MockBackend& set_capture(bool enabled);

  HttpResult post(const BackendEndpoint& endpoint, const HttpRequest& request) override;

  [[nodiscard]] int calls(std::string_view route) const;
  [[nodiscard]] int total_calls() const;
  [[nodiscard]] int max_in_flight() const noexcept { return max_in_flight_.load(); }
  [[nodiscard]] std::vector<CapturedCall> captured() const;
  [[nodiscard]] std::vector<CapturedCall> captured(std::string_view route) const;
  void reset_counters();

 private:
  struct FaultState {
    Fault fault;
    int fired = 0;
  };

  mutable std::mutex mu_;
  std::map<std::string, Handler, std::less<>> handlers_;
  std::map<std::string, std::vector<FaultState>, std::less<>> faults_;
  std::map<std::string, int, std::less<>> calls_;
  std::vector<CapturedCall> captured_;
  bool capture_ = false;
  std::chrono::milliseconds latency_{0};
  std::atomic<int> in_flight_{0};
  std::atomic<int> max_in_flight_{0};
};

namespace mock {

/// Overwrites a 32-byte region (after the first 64 bytes, or appended for
/// smaller inputs) with SHA-256(instruction). The header is left intact.
Bytes stamp_image(ByteView image, std::string_view instruction);

MockBackend::Handler identity_edit();
MockBackend::Handler stamp_edit();
MockBackend::Handler failing_edit();

/// Picks an option label from a hash of the question, options and the set of
/// distinct image contents. Duplicate images do not change the answer.
MockBackend::Handler hashed_understand();
/// Answers from `by_sample`, else defers to `fallback` (hashed when empty).
MockBackend::Handler scripted_understand(std::map<std::string, std::string> by_sample,
                                         MockBackend::Handler fallback = {});
/// Answers by the number of images received; unmapped counts return "A".
MockBackend::Handler image_count_understand(std::map<std::size_t, std::string> by_count);

MockBackend::Handler fixed_judge(double semantic_consistency, double perceptual_quality);
MockBackend::Handler scripted_judge(std::map<std::string, std::pair<double, double>> by_sample,
                                    MockBackend::Handler fallback = {});
MockBackend::Handler hashed_judge();

/// Returns script[min(k, size-1)] on the k-th call (0-based) for a given sample.
MockBackend::Handler scripted_writer(std::vector<std::string> script);
MockBackend::Handler hashed_writer();

/// Builds a mock from a `mock://<profile>?key=value&...` URL. Profiles:
/// `identity` and `stamp` (edit behaviour); `fail-edit` (edit always 500).
/// All profiles answer, judge and write with the hashed handlers. Query keys:
/// `latency_ms`, `fail_samples` (comma list; every route returns 500 for them).
std::shared_ptr<MockBackend> from_url(std::string_view url);

}  // namespace mock
}  // namespace vthink::gateway
