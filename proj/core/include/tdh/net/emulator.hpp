#pragma once

// Network-condition emulation: named link profiles, a per-link token bucket
// with MTU fragmentation, and a timer thread that releases frames at their
// scheduled delivery time.

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <mutex>
#include <queue>
#include <string>
#include <thread>
#include <vector>

namespace tdh::net {

struct NetworkProfile {
  std::string name;
  double bandwidth_mbps = 0;  // 0 means unshaped
  double latency_ms = 0;      // one way
  std::size_t mtu = 0;

  bool shaped() const { return bandwidth_mbps > 0; }
  void validate() const;  // throws kInvalidArgument
};

NetworkProfile local_profile();
NetworkProfile lan_profile();
NetworkProfile wan_profile();
NetworkProfile longhaul_profile();
// local, lan, wan, longhaul
std::vector<NetworkProfile> standard_profiles();
// Case-insensitive; throws kInvalidArgument.
NetworkProfile profile_by_name(std::string_view name);

std::size_t fragment_count(std::size_t frame_bytes, std::size_t mtu);

// Token bucket refilled at the link bandwidth with a one-MTU burst. Times
// are offsets on whatever clock the caller uses, so tests can drive it with
// a virtual clock.
class LinkShaper {
 public:
  using Duration = std::chrono::nanoseconds;

  explicit LinkShaper(NetworkProfile profile);

  // Delivery time at the far end for a frame handed to the link at `now`.
  // Calls must come with non-decreasing `now`.
  Duration schedule(Duration now, std::size_t frame_bytes);
  // Time the last fragment of the most recent frame left the link.
  Duration departure() const { return last_departure_; }
  const NetworkProfile& profile() const { return profile_; }

 private:
  NetworkProfile profile_;
  double tokens_;  // bytes
  Duration last_refill_{0};
  Duration last_departure_{0};
};

// Runs callbacks at (or just after) their due time on one worker thread.
// Callbacks with equal due times run in submission order.
class DelayLine {
 public:
  using Clock = std::chrono::steady_clock;

  DelayLine();
  ~DelayLine();
  DelayLine(const DelayLine&) = delete;
  DelayLine& operator=(const DelayLine&) = delete;

  void post_at(Clock::time_point due, std::function<void()> fn);
  // Blocks until everything queued so far has run.
  void drain();

 private:
  struct Item {
    Clock::time_point due;
    std::uint64_t seq;
    std::function<void()> fn;
    bool operator>(const Item& o) const { return due != o.due ? due > o.due : seq > o.seq; }
  };
  void loop();

  std::mutex mu_;
  std::condition_variable cv_;
  std::condition_variable idle_cv_;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> items_;
  std::uint64_t next_seq_ = 0;
  bool running_ = false;
  bool stop_ = false;
  std::thread worker_;
};

// A shaped uplink in real time: frames submitted through `send` are handed
// to `deliver` after the profile's serialization and propagation delay, in
// order. Unshaped profiles deliver inline.
class ShapedLink {
 public:
  ShapedLink(NetworkProfile profile, DelayLine& line);

  void send(std::size_t frame_bytes, std::function<void()> deliver);
  const NetworkProfile& profile() const { return shaper_.profile(); }

 private:
  std::mutex mu_;
  LinkShaper shaper_;
  DelayLine& line_;
  DelayLine::Clock::time_point epoch_;
};

}  // namespace tdh::net
