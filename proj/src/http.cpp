#include "litgraph/http.hpp"

#include <thread>

#include <httplib.h>

#include "litgraph/error.hpp"

namespace litgraph::http {

RateLimiter::RateLimiter(double requests_per_second)
    : interval_(requests_per_second > 0
                    ? std::chrono::nanoseconds(static_cast<long long>(1e9 / requests_per_second))
                    : std::chrono::nanoseconds(0)) {}

void RateLimiter::acquire() {
  std::chrono::steady_clock::time_point slot;
  {
    std::lock_guard lock(mutex_);
    const auto now = std::chrono::steady_clock::now();
    slot = std::max(now, next_slot_);
    next_slot_ = slot + interval_;
  }
  std::this_thread::sleep_until(slot);
}

Client::Client(RateLimiter& limiter, RetryPolicy retry, std::map<std::string, std::string> headers)
    : limiter_(limiter), retry_(retry), headers_(std::move(headers)) {}

std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("not an absolute URL: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

std::string url_encode(const std::string& s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~' || c == ':') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0xF]);
    }
  }
  return out;
}

Response Client::get(const std::string& url) {
  const auto [origin, path] = split_url(url);
  httplib::Client cli(origin);
  cli.set_follow_location(true);
  cli.set_connection_timeout(10);
  cli.set_read_timeout(60);
  httplib::Headers headers(headers_.begin(), headers_.end());

  std::string last_error;
  int last_status = 0;
  for (int attempt = 0; attempt <= retry_.max_retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(retry_.base_delay * (1 << (attempt - 1)));
    limiter_.acquire();
    ++requests_;
    auto res = cli.Get(path, headers);
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      last_status = 0;
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      last_status = res->status;
      continue;
    }
    return Response{res->status, res->body, res->get_header_value("Content-Type")};
  }
  throw FetchError(url + ": " + last_error + " after " + std::to_string(retry_.max_retries) +
                       " retries",
                   last_status, true);
}

}  // namespace litgraph::http
