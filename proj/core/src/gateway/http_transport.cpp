#include <httplib.h>

#include <fmt/format.h>

#include "vthink/gateway/transport.hpp"

namespace vthink::gateway {

HttpResult HttpTransport::post(const BackendEndpoint& endpoint, const HttpRequest& request) {
  std::string base = endpoint.base_url;
  std::string prefix;
  // Split "scheme://host:port/prefix" so the prefix can be prepended to routes.
  if (auto scheme_end = base.find("://"); scheme_end != std::string::npos) {
    if (auto path = base.find('/', scheme_end + 3); path != std::string::npos) {
      prefix = base.substr(path);
      base.resize(path);
    }
  }
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();

  httplib::Client client(base);
  auto secs = request.timeout.count() / 1000;
  auto usecs = (request.timeout.count() % 1000) * 1000;
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);

  httplib::Headers headers;
  for (const auto& [k, v] : request.headers) {
    if (k != "Content-Type") headers.emplace(k, v);
  }
  if (!request.sample_id.empty()) headers.emplace("X-Sample-Id", request.sample_id);

  auto res = client.Post(prefix + request.route, headers, request.body, "application/json");
  if (!res) {
    auto err = res.error();
    auto kind = (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read)
                    ? TransportFaultKind::Timeout
                    : TransportFaultKind::Connection;
    throw TransportFault(kind, fmt::format("{}{}: {}", endpoint.base_url, request.route,
                                           httplib::to_string(err)));
  }
  return {res->status, res->body};
}

HttpResult DenyTransport::post(const BackendEndpoint& endpoint, const HttpRequest& request) {
  ++attempts_;
  throw TransportFault(TransportFaultKind::Connection,
                       fmt::format("network disabled: refused call to {}{}", endpoint.base_url,
                                   request.route));
}

}  // namespace vthink::gateway
