#pragma once

#include <chrono>
#include <cmath>
#include <deque>
#include <mutex>
#include <thread>

namespace simrag {

/// Sliding-window limiter shared by every in-flight request. For a rate
/// r >= 1 at most floor(r) acquisitions fall in any window of one second
/// (plus `guard`); for r < 1 acquisitions are spaced 1/r seconds apart.
/// A rate of zero disables limiting.
class RateLimiter {
 public:
  using Clock = std::chrono::steady_clock;

  explicit RateLimiter(double requests_per_second,
                       std::chrono::milliseconds guard = std::chrono::milliseconds(25))
      : rate_(requests_per_second) {
    if (rate_ <= 0) return;
    if (rate_ >= 1) {
      capacity_ = static_cast<std::size_t>(std::floor(rate_));
      window_ = std::chrono::duration_cast<Clock::duration>(std::chrono::seconds(1) + guard);
    } else {
      capacity_ = 1;
      window_ = std::chrono::duration_cast<Clock::duration>(
                    std::chrono::duration<double>(1.0 / rate_)) + guard;
    }
  }

  double rate() const noexcept { return rate_; }

  /// Blocks until a request may start.
  void acquire() {
    if (rate_ <= 0) return;
    std::unique_lock lock(mutex_);
    for (;;) {
      const auto now = Clock::now();
      while (!starts_.empty() && now - starts_.front() >= window_) starts_.pop_front();
      if (starts_.size() < capacity_) {
        starts_.push_back(now);
        return;
      }
      const auto wake = starts_.front() + window_;
      lock.unlock();
      std::this_thread::sleep_until(wake);
      lock.lock();
    }
  }

 private:
  double rate_;
  std::size_t capacity_ = 0;
  Clock::duration window_{};
  std::mutex mutex_;
  std::deque<Clock::time_point> starts_;
};

}  // namespace simrag
