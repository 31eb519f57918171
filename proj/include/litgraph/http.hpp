#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <map>
#include <mutex>
#include <string>

namespace litgraph::http {

/// Spaces requests at least `min_interval` apart across all callers.
class RateLimiter {
 public:
  explicit RateLimiter(double requests_per_second);

  /// Blocks until the next request slot is available.
  void acquire();
  std::chrono::nanoseconds min_interval() const noexcept { return interval_; }

 private:
  std::mutex mutex_;
  std::chrono::nanoseconds interval_;
  std::chrono::steady_clock::time_point next_slot_{};
};

struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds base_delay{500};
};

struct Response {
  int status = 0;
  std::string body;
  std::string content_type;
};

/// GET with rate limiting and exponential backoff on transport errors,
/// HTTP 429 and 5xx. Other statuses are returned to the caller. Throws
/// FetchError once retries are exhausted.
class Client {
 public:
  Client(RateLimiter& limiter, RetryPolicy retry, std::map<std::string, std::string> headers = {});

  Response get(const std::string& url);
  std::size_t request_count() const noexcept { return requests_; }

 private:
  RateLimiter& limiter_;
  RetryPolicy retry_;
  std::map<std::string, std::string> headers_;
  std::size_t requests_ = 0;
};

/// Splits an absolute URL into "scheme://host[:port]" and the path+query.
std::pair<std::string, std::string> split_url(const std::string& url);

std::string url_encode(const std::string& s);

}  // namespace litgraph::http
