#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "vthink/common/error.hpp"
#include "vthink/gateway/transport.hpp"

namespace vthink::gateway {

/// One backend exchange, keyed by (sample_id, route, attempt).
struct TranscriptEntry {
  std::string sample_id;
  std::string route;
  int attempt = 1;
  int status = 0;      // HTTP status; 0 when the transport faulted
  std::string body;    // response body
  std::string fault;   // "", "timeout" or "connection"
  bool cached = false; // synthesised from a cache hit rather than a live call

  bool operator==(const TranscriptEntry&) const = default;
};

struct SampleOutcome {
  bool ok = true;
  std::string error;

  bool operator==(const SampleOutcome&) const = default;
};

/// A recorded run: a free-form header (run configuration, samples), every
/// backend exchange, and a terminal outcome per finished sample.
struct Transcript {
  nlohmann::json header = nlohmann::json::object();
  std::vector<TranscriptEntry> calls;
  std::map<std::string, SampleOutcome> outcomes;
};

enum class TranscriptErrc { TranscriptIncomplete, MalformedTranscript };

std::string_view to_string(TranscriptErrc e);

using TranscriptError = CodedError<TranscriptErrc>;

/// Writes the header line, then for each sample in `sample_order` its calls
/// (sorted by route, attempt) followed by its end marker.
void write_transcript(const Transcript& transcript, const std::vector<std::string>& sample_order,
                      std::ostream& out);
Transcript read_transcript(std::istream& in);

/// Thread-safe sink shared by every recording transport of a run.
class TranscriptLog {
 public:
  int next_attempt(const std::string& sample_id, const std::string& route);
  void append(TranscriptEntry entry);
  void finish(const std::string& sample_id, SampleOutcome outcome);

  [[nodiscard]] Transcript snapshot(nlohmann::json header) const;

 private:
  mutable std::mutex mu_;
  std::map<std::pair<std::string, std::string>, int> attempts_;
  std::vector<TranscriptEntry> calls_;
  std::map<std::string, SampleOutcome> outcomes_;
};

class RecordingTransport final : public Transport {
 public:
  RecordingTransport(std::shared_ptr<Transport> inner, std::shared_ptr<TranscriptLog> log);
  HttpResult post(const BackendEndpoint& endpoint, const HttpRequest& request) override;

 private:
  std::shared_ptr<Transport> inner_;
  std::shared_ptr<TranscriptLog> log_;
};

/// Serves recorded responses in attempt order; never touches the network.
/// A call with no recorded exchange throws TranscriptError(TranscriptIncomplete).
class ReplayTransport final : public Transport {
 public:
  explicit ReplayTransport(const std::vector<TranscriptEntry>& calls);
  HttpResult post(const BackendEndpoint& endpoint, const HttpRequest& request) override;

 private:
  std::mutex mu_;
  std::map<std::tuple<std::string, std::string, int>, TranscriptEntry> entries_;
  std::map<std::pair<std::string, std::string>, int> attempts_;
};

}  // namespace vthink::gateway
