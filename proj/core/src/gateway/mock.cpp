#include "vthink/gateway/mock.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

#include "vthink/common/base64.hpp"
#include "vthink/common/hash.hpp"

namespace vthink::gateway {

using nlohmann::json;

MockBackend& MockBackend::on(std::string_view route, Handler handler) {
  std::lock_guard lock(mu_);
  handlers_[std::string(route)] = std::move(handler);
  return *this;
}

MockBackend& MockBackend::inject(std::string_view route, Fault fault) {
  std::lock_guard lock(mu_);
  faults_[std::string(route)].push_back({std::move(fault), 0});
  return *this;
}

MockBackend& MockBackend::set_latency(std::chrono::milliseconds latency) {
  std::lock_guard lock(mu_);
  latency_ = latency;
  return *this;
}

MockBackend& MockBackend::set_capture(bool enabled) {
  std::lock_guard lock(mu_);
  capture_ = enabled;
  return *this;
}

namespace {

struct InFlight {
  std::atomic<int>& current;
  explicit InFlight(std::atomic<int>& c, std::atomic<int>& peak) : current(c) {
    int now = ++current;
    int prev = peak.load();
    while (now > prev && !peak.compare_exchange_weak(prev, now)) {
    }
  }
  ~InFlight() { --current; }
};

}  // namespace

HttpResult MockBackend::post(const BackendEndpoint&, const HttpRequest& request) {
  InFlight guard(in_flight_, max_in_flight_);

  Handler handler;
  std::optional<FaultKind> fault;
  std::chrono::milliseconds latency;
  bool capture = false;
  {
    std::lock_guard lock(mu_);
    ++calls_[request.route];
    latency = latency_;
    capture = capture_;
    if (auto it = handlers_.find(request.route); it != handlers_.end()) handler = it->second;
    if (auto it = faults_.find(request.route); it != faults_.end()) {
      for (auto& state : it->second) {
        bool sample_match = state.fault.sample_id.empty() || state.fault.sample_id == request.sample_id;
        bool budget = state.fault.times < 0 || state.fired < state.fault.times;
        if (sample_match && budget) {
          ++state.fired;
          fault = state.fault.kind;
          break;
        }
      }
    }
  }

  if (latency.count() > 0) std::this_thread::sleep_for(latency);

  auto body = json::parse(request.body, nullptr, false);
  if (capture) {
    std::lock_guard lock(mu_);
    captured_.push_back({request.route, request.sample_id, body});
  }

  if (fault) {
    switch (*fault) {
      case FaultKind::Timeout:
        throw TransportFault(TransportFaultKind::Timeout, "mock: injected timeout");
      case FaultKind::Connection:
        throw TransportFault(TransportFaultKind::Connection, "mock: injected connection failure");
      case FaultKind::ServerError:
        return {500, error_body("injected", "mock: injected server error").dump()};
      case FaultKind::BadRequest:
        return {400, error_body("bad_request", "mock: injected client error").dump()};
      case FaultKind::Malformed:
        return {200, R"({"unexpected":true})"};
    }
  }

  if (!handler) return {404, error_body("not_found", "mock: no handler for route").dump()};
  if (body.is_discarded()) return {400, error_body("bad_json", "mock: body is not JSON").dump()};
  try {
    return handler(body, request.sample_id);
  } catch (const GatewayError& e) {
    return {400, error_body("bad_request", e.what()).dump()};
  }
}

int MockBackend::calls(std::string_view route) const {
  std::lock_guard lock(mu_);
  auto it = calls_.find(route);
  return it == calls_.end() ? 0 : it->second;
}

int MockBackend::total_calls() const {
  std::lock_guard lock(mu_);
  int total = 0;
  for (const auto& [_, n] : calls_) total += n;
  return total;
}

std::vector<MockBackend::CapturedCall> MockBackend::captured() const {
  std::lock_guard lock(mu_);
  return captured_;
}

std::vector<MockBackend::CapturedCall> MockBackend::captured(std::string_view route) const {
  std::lock_guard lock(mu_);
  std::vector<CapturedCall> out;
  for (const auto& c : captured_) {
    if (c.route == route) out.push_back(c);
  }
  return out;
}

void MockBackend::reset_counters() {
  std::lock_guard lock(mu_);
  calls_.clear();
  captured_.clear();
  for (auto& [_, states] : faults_) {
    for (auto& s : states) s.fired = 0;
  }
  max_in_flight_ = 0;
}

namespace mock {

namespace {

HttpResult ok(const json& body) { return {200, body.dump()}; }

std::uint64_t hash_of(std::string_view s) { return stable_hash64(s); }

std::string hashed_answer(const UnderstandRequest& req) {
  std::set<std::string> images;
  for (const auto& img : req.images) images.insert(sha256_hex(ByteView(img)));
  std::string key = req.question;
  for (const auto& o : req.options) key += "|" + o.label + "=" + o.text;
  for (const auto& h : images) key += "#" + h;
  auto h = hash_of(key);
  if (req.options.empty()) return (h & 1) != 0 ? "Yes" : "No";
  return req.options[h % req.options.size()].label;
}

double hashed_score(std::string_view key) {
  // Two decimals in [2, 9].
  auto h = hash_of(key);
  return 2.0 + static_cast<double>(h % 701) / 100.0;
}

}  // namespace

Bytes stamp_image(ByteView image, std::string_view instruction) {
  Bytes out(image.begin(), image.end());
  std::string digest = sha256_hex(instruction);
  constexpr std::size_t kOffset = 64;
  constexpr std::size_t kLen = 32;
  if (out.size() < kOffset + kLen) out.resize(kOffset + kLen, 0);
  for (std::size_t i = 0; i < kLen; ++i) {
    auto hi = digest[2 * i];
    auto lo = digest[2 * i + 1];
    auto nib = [](char c) { return static_cast<std::uint8_t>(c <= '9' ? c - '0' : c - 'a' + 10); };
    out[kOffset + i] = static_cast<std::uint8_t>((nib(hi) << 4) | nib(lo));
  }
  return out;
}

MockBackend::Handler identity_edit() {
  return [](const json& body, const std::string&) {
    auto req = decode_edit_request(body);
    return ok(encode(EditResponse{req.image, req.params, 1.0}));
  };
}

MockBackend::Handler stamp_edit() {
  return [](const json& body, const std::string&) {
    auto req = decode_edit_request(body);
    return ok(encode(EditResponse{stamp_image(req.image, req.instruction), req.params, 1.0}));
  };
}

MockBackend::Handler failing_edit() {
  return [](const json&, const std::string&) {
    return HttpResult{500, error_body("inference_failed", "mock: edit always fails").dump()};
  };
}

MockBackend::Handler hashed_understand() {
  return [](const json& body, const std::string&) {
    auto req = decode_understand_request(body);
    return ok(encode(UnderstandResponse{hashed_answer(req), 1.0}));
  };
}

MockBackend::Handler scripted_understand(std::map<std::string, std::string> by_sample,
                                         MockBackend::Handler fallback) {
  if (!fallback) fallback = hashed_understand();
  return [by_sample = std::move(by_sample), fallback](const json& body, const std::string& sample_id) {
    auto req = decode_understand_request(body);
    if (auto it = by_sample.find(sample_id); it != by_sample.end()) {
      return ok(encode(UnderstandResponse{it->second, 1.0}));
    }
    return fallback(body, sample_id);
  };
}

MockBackend::Handler image_count_understand(std::map<std::size_t, std::string> by_count) {
  return [by_count = std::move(by_count)](const json& body, const std::string&) {
    auto req = decode_understand_request(body);
    auto it = by_count.find(req.images.size());
    return ok(encode(UnderstandResponse{it == by_count.end() ? "A" : it->second, 1.0}));
  };
}

MockBackend::Handler fixed_judge(double sc, double pq) {
  return [sc, pq](const json& body, const std::string&) {
    decode_judge_request(body);
    return ok(json{{"semantic_consistency", sc}, {"perceptual_quality", pq}, {"rationale", "fixed"}});
  };
}

MockBackend::Handler scripted_judge(std::map<std::string, std::pair<double, double>> by_sample,
                                    MockBackend::Handler fallback) {
  if (!fallback) fallback = hashed_judge();
  return [by_sample = std::move(by_sample), fallback](const json& body, const std::string& sample_id) {
    decode_judge_request(body);
    if (auto it = by_sample.find(sample_id); it != by_sample.end()) {
      return ok(json{{"semantic_consistency", it->second.first},
                     {"perceptual_quality", it->second.second},
                     {"rationale", "scripted"}});
    }
    return fallback(body, sample_id);
  };
}

MockBackend::Handler hashed_judge() {
  return [](const json& body, const std::string&) {
    auto req = decode_judge_request(body);
    auto key = sha256_hex(ByteView(req.original)) + sha256_hex(ByteView(req.edited)) + req.instruction;
    return ok(encode(JudgeResponse{hashed_score("sc" + key), hashed_score("pq" + key), "hashed"}));
  };
}

MockBackend::Handler scripted_writer(std::vector<std::string> script) {
  if (script.empty()) throw std::invalid_argument("scripted_writer: empty script");
  auto counters = std::make_shared<std::pair<std::mutex, std::map<std::string, std::size_t>>>();
  return [script = std::move(script), counters](const json& body, const std::string& sample_id) {
    decode_write_request(body);
    std::size_t k = 0;
    {
      std::lock_guard lock(counters->first);
      k = counters->second[sample_id]++;
    }
    return ok(encode(WriteResponse{script[std::min(k, script.size() - 1)]}));
  };
}

MockBackend::Handler hashed_writer() {
  static const std::vector<std::string> kPhrases = {
      "Sharpen the image and enhance fine details around the main subject.",
      "Zoom in on the central area and restore crisp edges.",
      "Brighten the dark regions and increase local contrast.",
      "Remove background clutter and outline the important structures.",
      "Render the scene from a slightly rotated viewpoint to expose hidden sides.",
      "Draw guide lines along the principal edges and shapes."};
  return [](const json& body, const std::string&) {
    auto req = decode_write_request(body);
    return ok(encode(WriteResponse{kPhrases[hash_of(req.question) % kPhrases.size()]}));
  };
}

std::shared_ptr<MockBackend> from_url(std::string_view url) {
  constexpr std::string_view kScheme = "mock://";
  if (!url.starts_with(kScheme)) throw std::invalid_argument(fmt::format("not a mock url: {}", url));
  auto rest = url.substr(kScheme.size());
  auto q = rest.find('?');
  auto profile = std::string(rest.substr(0, std::min(q, rest.find('/'))));

  auto backend = std::make_shared<MockBackend>();
  if (profile == "identity") {
    backend->on(kEditRoute, identity_edit());
  } else if (profile == "stamp") {
    backend->on(kEditRoute, stamp_edit());
  } else if (profile == "fail-edit") {
    backend->on(kEditRoute, failing_edit());
  } else {
    throw std::invalid_argument(fmt::format("unknown mock profile '{}'", profile));
  }
  backend->on(kUnderstandRoute, hashed_understand())
      .on(kJudgeRoute, hashed_judge())
      .on(kWriteRoute, hashed_writer());

  if (q != std::string_view::npos) {
    std::stringstream query{std::string(rest.substr(q + 1))};
    std::string pair;
    while (std::getline(query, pair, '&')) {
      auto eq = pair.find('=');
      auto key = pair.substr(0, eq);
      auto value = eq == std::string::npos ? std::string() : pair.substr(eq + 1);
      if (key == "latency_ms") {
        backend->set_latency(std::chrono::milliseconds(std::stoi(value)));
      } else if (key == "fail_samples") {
        std::stringstream ids(value);
        std::string id;
        while (std::getline(ids, id, ',')) {
          for (auto route : {kEditRoute, kUnderstandRoute, kJudgeRoute, kWriteRoute}) {
            backend->inject(route, {MockBackend::FaultKind::ServerError, -1, id});
          }
        }
      } else {
        throw std::invalid_argument(fmt::format("unknown mock query key '{}'", key));
      }
    }
  }
  return backend;
}

}  // namespace mock
}  // namespace vthink::gateway
