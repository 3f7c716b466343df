#pragma once

// OpenAI-compatible chat-completion provider.
//
//   POST <endpoint>/chat/completions
//   {"model": ..., "temperature": ..., "seed": ...,
//    "messages": [{"role": "system", "content": ...},
//                 {"role": "user", "content": ...}]}
//
// The reply text is read from choices[0].message.content. HTTP 429, 5xx and
// connection failures are retried with exponential backoff; other non-2xx
// statuses surface immediately as ProviderError.

#include <chrono>
#include <memory>
#include <string>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "simrag/error.hpp"
#include "simrag/llm_client.hpp"
#include "simrag/rate_limiter.hpp"

namespace simrag {

struct HttpOptions {
  std::string endpoint = "https://api.openai.com/v1";
  std::string api_key;  ///< sent as a bearer token when non-empty
  std::chrono::milliseconds timeout{60'000};
  double rate_limit = 0.0;
  int transport_retries = 3;
  std::chrono::milliseconds backoff_initial{500};
  double backoff_factor = 2.0;
};

/// Scheme+authority and path prefix of an endpoint URL.
struct EndpointParts {
  std::string base;  ///< e.g. "http://127.0.0.1:8080"
  std::string path;  ///< e.g. "/v1/chat/completions"
};

inline EndpointParts split_endpoint(std::string_view endpoint) {
  const auto scheme_end = endpoint.find("://");
  if (scheme_end == std::string_view::npos) {
    throw ConfigError("endpoint '" + std::string(endpoint) + "' lacks a scheme (http:// or https://)");
  }
  const auto scheme = endpoint.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw ConfigError("unsupported endpoint scheme '" + std::string(scheme) + "'");
  }
  const auto path_start = endpoint.find('/', scheme_end + 3);
  EndpointParts parts;
  parts.base = std::string(endpoint.substr(0, path_start));
  std::string prefix = path_start == std::string_view::npos
                           ? std::string()
                           : std::string(endpoint.substr(path_start));
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  parts.path = prefix + "/chat/completions";
  return parts;
}

inline std::string chat_request_body(const ChatRequest& req) {
  nlohmann::json body = {
      {"model", req.model},
      {"temperature", req.temperature},
      {"seed", req.seed},
      {"messages",
       nlohmann::json::array({{{"role", "system"}, {"content", req.system_prompt}},
                              {{"role", "user"}, {"content", req.user_prompt}}})},
  };
  return body.dump();
}

/// Message text of a chat-completion response body.
inline std::string extract_completion_text(const std::string& body) {
  try {
    const auto j = nlohmann::json::parse(body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw ProviderError(body);
  }
}

class HttpProvider final : public ChatProvider {
 public:
  explicit HttpProvider(HttpOptions options, std::shared_ptr<RateLimiter> limiter = nullptr)
      : options_(std::move(options)),
        parts_(split_endpoint(options_.endpoint)),
        limiter_(limiter ? std::move(limiter) : std::make_shared<RateLimiter>(options_.rate_limit)) {
    if (options_.transport_retries < 0) throw ConfigError("transport_retries must be >= 0");
  }

  std::string complete(const ChatRequest& req) override {
    const std::string body = chat_request_body(req);
    auto delay = options_.backoff_initial;
    for (int attempt = 0;; ++attempt) {
      try {
        return post_once(body);
      } catch (const TransportError& e) {
        if (attempt >= options_.transport_retries) throw;
        warn(std::string(e.what()) + "; retrying in " + std::to_string(delay.count()) + " ms");
      }
      std::this_thread::sleep_for(delay);
      delay = std::chrono::milliseconds(
          static_cast<long long>(static_cast<double>(delay.count()) * options_.backoff_factor));
    }
  }

  ProviderKind kind() const noexcept override { return ProviderKind::http; }
  std::string fingerprint() const override { return "http:" + options_.endpoint; }

  const HttpOptions& options() const noexcept { return options_; }

 private:
  std::string post_once(const std::string& body) {
    limiter_->acquire();
    // httplib clients are not shareable across threads; one per request.
    httplib::Client client(parts_.base);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(options_.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    httplib::Headers headers;
    if (!options_.api_key.empty()) {
      headers.emplace("Authorization", "Bearer " + options_.api_key);
    }
    auto res = client.Post(parts_.path, headers, body, "application/json");
    if (!res) {
      throw TransportError("request to " + options_.endpoint + " failed: " +
                           httplib::to_string(res.error()));
    }
    if (res->status == 429) throw RateLimited("rate limited by provider: " + res->body);
    if (res->status >= 500) {
      throw TransportError("provider returned HTTP " + std::to_string(res->status), res->status);
    }
    if (res->status < 200 || res->status >= 300) {
      throw ProviderError("HTTP " + std::to_string(res->status) + ": " + res->body);
    }
    return extract_completion_text(res->body);
  }

  HttpOptions options_;
  EndpointParts parts_;
  std::shared_ptr<RateLimiter> limiter_;
};

inline HttpOptions http_options_from(const RunConfig& config, std::string api_key) {
  HttpOptions o;
  o.endpoint = config.endpoint;
  o.api_key = std::move(api_key);
  o.timeout = config.timeout;
  o.rate_limit = config.rate_limit;
  return o;
}

}  // namespace simrag
