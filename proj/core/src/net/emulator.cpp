#include "tdh/net/emulator.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "tdh/error.hpp"

namespace tdh::net {

void NetworkProfile::validate() const {
  if (!shaped()) return;
  if (!(bandwidth_mbps > 0) || latency_ms < 0 || mtu == 0) {
    throw Error(ErrorCode::kInvalidArgument, "network profile values must be positive");
  }
}

NetworkProfile local_profile() { return {"local", 0, 0, 0}; }
NetworkProfile lan_profile() { return {"lan", 100, 2, 1500}; }
NetworkProfile wan_profile() { return {"wan", 20, 30, 1500}; }
NetworkProfile longhaul_profile() { return {"longhaul", 1000, 200, 9000}; }

std::vector<NetworkProfile> standard_profiles() {
  return {local_profile(), lan_profile(), wan_profile(), longhaul_profile()};
}

NetworkProfile profile_by_name(std::string_view name) {
  std::string lower;
  for (char c : name) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  for (auto& p : standard_profiles()) {
    if (p.name == lower) return p;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown network profile '" + std::string(name) + "'");
}

std::size_t fragment_count(std::size_t frame_bytes, std::size_t mtu) {
  if (mtu == 0) return 1;
  return std::max<std::size_t>(1, (frame_bytes + mtu - 1) / mtu);
}

LinkShaper::LinkShaper(NetworkProfile profile) : profile_(std::move(profile)) {
  profile_.validate();
  tokens_ = static_cast<double>(profile_.mtu);
}

LinkShaper::Duration LinkShaper::schedule(Duration now, std::size_t frame_bytes) {
  if (!profile_.shaped()) return now;
  const double bytes_per_ns = profile_.bandwidth_mbps * 1e6 / 8.0 / 1e9;
  const double cap = static_cast<double>(profile_.mtu);
  // Fragments leave in order; the link cannot start before the previous frame left.
  Duration t = std::max(now, last_departure_);
  std::size_t remaining = frame_bytes == 0 ? 1 : frame_bytes;
  while (remaining > 0) {
    std::size_t frag = std::min(remaining, profile_.mtu);
    remaining -= frag;
    double elapsed = static_cast<double>((t - last_refill_).count());
    tokens_ = std::min(cap, tokens_ + elapsed * bytes_per_ns);
    last_refill_ = t;
    double need = static_cast<double>(frag);
    if (tokens_ < need) {
      auto wait = Duration(static_cast<std::int64_t>(std::ceil((need - tokens_) / bytes_per_ns)));
      t += wait;
      tokens_ = need;
      last_refill_ = t;
    }
    tokens_ -= need;
  }
  last_departure_ = t;
  return t + Duration(static_cast<std::int64_t>(profile_.latency_ms * 1e6));
}

DelayLine::DelayLine() : worker_([this] { loop(); }) {}

DelayLine::~DelayLine() {
  {
    std::lock_guard lock(mu_);
    stop_ = true;
  }
  cv_.notify_all();
  worker_.join();
}

void DelayLine::post_at(Clock::time_point due, std::function<void()> fn) {
  {
    std::lock_guard lock(mu_);
    items_.push(Item{due, next_seq_++, std::move(fn)});
  }
  cv_.notify_all();
}

void DelayLine::drain() {
  std::unique_lock lock(mu_);
  idle_cv_.wait(lock, [this] { return items_.empty() && !running_; });
}

void DelayLine::loop() {
  std::unique_lock lock(mu_);
  while (true) {
    if (stop_) return;
    if (items_.empty()) {
      idle_cv_.notify_all();
      cv_.wait(lock);
      continue;
    }
    auto due = items_.top().due;
    if (Clock::now() < due) {
      cv_.wait_until(lock, due);
      continue;
    }
    auto fn = std::move(const_cast<Item&>(items_.top()).fn);
    items_.pop();
    running_ = true;
    lock.unlock();
    try {
      fn();
    } catch (...) {
      // A frame for a room that has since closed; nothing to deliver to.
    }
    lock.lock();
    running_ = false;
  }
}

ShapedLink::ShapedLink(NetworkProfile profile, DelayLine& line)
    : shaper_(std::move(profile)), line_(line), epoch_(DelayLine::Clock::now()) {}

void ShapedLink::send(std::size_t frame_bytes, std::function<void()> deliver) {
  if (!shaper_.profile().shaped()) {
    deliver();
    return;
  }
  DelayLine::Clock::time_point due;
  {
    std::lock_guard lock(mu_);
    auto now = std::chrono::duration_cast<LinkShaper::Duration>(DelayLine::Clock::now() - epoch_);
    due = epoch_ + shaper_.schedule(now, frame_bytes);
    // Submission under the lock keeps per-link order for equal due times.
    line_.post_at(due, std::move(deliver));
  }
}

}  // namespace tdh::net
