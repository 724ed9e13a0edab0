#include <httplib.h>

#include <regex>

#include "llmnas/core/errors.hpp"
#include "llmnas/llm/client.hpp"

namespace llmnas::llm {

namespace {

struct ParsedUrl {
  std::string scheme_host_port;
  std::string path_prefix;
};

ParsedUrl split_url(const std::string& url) {
  static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, kUrl)) throw ConfigError("endpoint.base_url is not an http(s) URL: " + url);
  ParsedUrl p{m[1].str(), m[2].matched ? m[2].str() : std::string{}};
  while (!p.path_prefix.empty() && p.path_prefix.back() == '/') p.path_prefix.pop_back();
  return p;
}

class HttpTransport : public ChatTransport {
 public:
  HttpReply post_chat(const LlmEndpoint& endpoint, const std::string& body) override {
    const auto url = split_url(endpoint.base_url);
    httplib::Client client(url.scheme_host_port);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(endpoint.request_timeout);
    client.set_connection_timeout(secs);
    client.set_read_timeout(secs);
    client.set_write_timeout(secs);
    httplib::Headers headers;
    if (endpoint.api_key) headers.emplace("Authorization", "Bearer " + *endpoint.api_key);
    auto res = client.Post(url.path_prefix + "/chat/completions", headers, body, "application/json");
    if (!res) {
      throw TransportError("POST " + endpoint.base_url + "/chat/completions failed: " +
                           httplib::to_string(res.error()));
    }
    return HttpReply{res->status, res->body};
  }
};

}  // namespace

std::shared_ptr<ChatTransport> make_http_transport() { return std::make_shared<HttpTransport>(); }

}  // namespace llmnas::llm
