#include "vthink/gateway/transcript.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>

#include <fmt/format.h>

namespace vthink::gateway {

using nlohmann::json;

std::string_view to_string(TranscriptErrc e) {
  return e == TranscriptErrc::TranscriptIncomplete ? "TranscriptIncomplete" : "MalformedTranscript";
}

namespace {

json entry_to_json(const TranscriptEntry& e) {
  json j = {{"kind", "call"},        {"sample_id", e.sample_id}, {"route", e.route},
            {"attempt", e.attempt},  {"status", e.status}};
  if (!e.fault.empty()) {
    j["fault"] = e.fault;
    if (!e.body.empty()) j["body_raw"] = e.body;
  } else {
    auto parsed = json::parse(e.body, nullptr, false);
    if (parsed.is_discarded()) {
      j["body_raw"] = e.body;
    } else {
      j["body"] = std::move(parsed);
    }
  }
  if (e.cached) j["cached"] = true;
  return j;
}

[[noreturn]] void malformed(std::size_t line, const std::string& msg) {
  throw TranscriptError(TranscriptErrc::MalformedTranscript,
                        fmt::format("MalformedTranscript at line {}: {}", line, msg));
}

}  // namespace

void write_transcript(const Transcript& t, const std::vector<std::string>& sample_order,
                      std::ostream& out) {
  json header = t.header;
  header["kind"] = "header";
  out << header.dump() << '\n';

  std::map<std::string, std::vector<const TranscriptEntry*>> by_sample;
  for (const auto& c : t.calls) by_sample[c.sample_id].push_back(&c);

  auto emit = [&](const std::string& id) {
    if (auto it = by_sample.find(id); it != by_sample.end()) {
      auto& calls = it->second;
      std::sort(calls.begin(), calls.end(), [](const auto* a, const auto* b) {
        return std::tie(a->route, a->attempt) < std::tie(b->route, b->attempt);
      });
      for (const auto* c : calls) out << entry_to_json(*c).dump() << '\n';
    }
    if (auto it = t.outcomes.find(id); it != t.outcomes.end()) {
      json end = {{"kind", "end"}, {"sample_id", id}, {"status", it->second.ok ? "ok" : "error"}};
      if (!it->second.error.empty()) end["error"] = it->second.error;
      out << end.dump() << '\n';
    }
  };

  std::set<std::string> seen;
  for (const auto& id : sample_order) {
    if (seen.insert(id).second) emit(id);
  }
  // Calls not tied to a listed sample keep a stable order at the end.
  for (const auto& [id, _] : by_sample) {
    if (seen.insert(id).second) emit(id);
  }
}

Transcript read_transcript(std::istream& in) {
  Transcript t;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
      malformed(line_no, "not a transcript record");
    }
    auto kind = j["kind"].get<std::string>();
    if (kind == "header") {
      if (have_header) malformed(line_no, "duplicate header");
      j.erase("kind");
      t.header = std::move(j);
      have_header = true;
      continue;
    }
    if (!have_header) malformed(line_no, "first record must be the header");
    try {
      if (kind == "call") {
        TranscriptEntry e;
        e.sample_id = j.at("sample_id").get<std::string>();
        e.route = j.at("route").get<std::string>();
        e.attempt = j.at("attempt").get<int>();
        e.status = j.at("status").get<int>();
        if (j.contains("fault")) e.fault = j["fault"].get<std::string>();
        if (j.contains("body")) e.body = j["body"].dump();
        if (j.contains("body_raw")) e.body = j["body_raw"].get<std::string>();
        e.cached = j.value("cached", false);
        t.calls.push_back(std::move(e));
      } else if (kind == "end") {
        SampleOutcome o;
        o.ok = j.at("status").get<std::string>() == "ok";
        o.error = j.value("error", std::string());
        t.outcomes[j.at("sample_id").get<std::string>()] = std::move(o);
      } else {
        malformed(line_no, fmt::format("unknown record kind '{}'", kind));
      }
    } catch (const json::exception& e) {
      malformed(line_no, e.what());
    }
  }
  if (!have_header) {
    throw TranscriptError(TranscriptErrc::TranscriptIncomplete, "TranscriptIncomplete: empty transcript");
  }
  return t;
}

int TranscriptLog::next_attempt(const std::string& sample_id, const std::string& route) {
  std::lock_guard lock(mu_);
  return ++attempts_[{sample_id, route}];
}

void TranscriptLog::append(TranscriptEntry entry) {
  std::lock_guard lock(mu_);
  calls_.push_back(std::move(entry));
}

void TranscriptLog::finish(const std::string& sample_id, SampleOutcome outcome) {
  std::lock_guard lock(mu_);
  outcomes_[sample_id] = std::move(outcome);
}

Transcript TranscriptLog::snapshot(json header) const {
  std::lock_guard lock(mu_);
  return {std::move(header), calls_, outcomes_};
}

RecordingTransport::RecordingTransport(std::shared_ptr<Transport> inner,
                                       std::shared_ptr<TranscriptLog> log)
    : inner_(std::move(inner)), log_(std::move(log)) {}

HttpResult RecordingTransport::post(const BackendEndpoint& endpoint, const HttpRequest& request) {
  TranscriptEntry e;
  e.sample_id = request.sample_id;
  e.route = request.route;
  e.attempt = log_->next_attempt(request.sample_id, request.route);
  try {
    auto result = inner_->post(endpoint, request);
    e.status = result.status;
    e.body = result.body;
    log_->append(std::move(e));
    return result;
  } catch (const TransportFault& fault) {
    e.fault = fault.kind() == TransportFaultKind::Timeout ? "timeout" : "connection";
    e.body = fault.what();
    log_->append(std::move(e));
    throw;
  }
}

ReplayTransport::ReplayTransport(const std::vector<TranscriptEntry>& calls) {
  for (const auto& c : calls) entries_[{c.sample_id, c.route, c.attempt}] = c;
}

HttpResult ReplayTransport::post(const BackendEndpoint&, const HttpRequest& request) {
  TranscriptEntry e;
  int attempt = 0;
  {
    std::lock_guard lock(mu_);
    attempt = ++attempts_[{request.sample_id, request.route}];
    auto it = entries_.find({request.sample_id, request.route, attempt});
    if (it == entries_.end()) {
      throw TranscriptError(TranscriptErrc::TranscriptIncomplete,
                            fmt::format("TranscriptIncomplete: no recorded {} attempt {} for sample '{}'",
                                        request.route, attempt, request.sample_id));
    }
    e = it->second;
  }
  if (e.fault == "timeout") throw TransportFault(TransportFaultKind::Timeout, "replayed timeout");
  if (e.fault == "connection") throw TransportFault(TransportFaultKind::Connection, "replayed connection failure");
  return {e.status, e.body};
}

}  // namespace vthink::gateway
