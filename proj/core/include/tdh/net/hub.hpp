#pragma once

// Rooms keyed by a secret request id. Every frame published to a room goes
// to all current members (the publisher included) and into the room's
// ordered history; a joiner gets the full history before any live frame.
// Closing a room wipes its history for good.

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "tdh/bytes.hpp"
#include "tdh/net/emulator.hpp"

namespace tdh::net {

using RoomId = std::array<std::uint8_t, 16>;

enum class FrameType : std::uint8_t {
  kOpen = 1,
  kJoin = 2,
  kPublish = 3,
  kClose = 4,
  kDeliver = 5,
  kLeave = 6,
  kOk = 7,
  kError = 8,
  kFault = 9,
};

// type(1) || room_id(16) || sender identity (u32 length-prefixed) || body
struct HubFrame {
  FrameType type = FrameType::kPublish;
  RoomId room{};
  std::string sender;
  Bytes body;
};

Bytes serialize(const HubFrame& frame);
HubFrame parse_hub_frame(ByteSpan bytes);

using FrameSink = std::function<void(const HubFrame&)>;
// Rewrites the copy of history entry `index` handed to `recipient`.
using FaultHook = std::function<void(const RoomId& room, std::size_t index, const std::string& recipient, Bytes& body)>;

class Hub {
 public:
  explicit Hub(bool allow_faults = false);

  // Idempotent while the room is live; kRoomClosed once it was closed.
  void open(const RoomId& room);
  // Replays history into `sink`, then streams live frames to it.
  void join(const RoomId& room, const std::string& identity, FrameSink sink);
  void leave(const RoomId& room, const std::string& identity);
  void publish(const RoomId& room, const std::string& sender, Bytes body);
  void close(const RoomId& room);

  std::vector<HubFrame> history(const RoomId& room) const;
  std::size_t live_rooms() const;

  // kInvalidArgument unless the hub was built with faults allowed.
  void set_fault_hook(FaultHook hook);
  // Observes every published frame; what an honest-but-curious hub sees.
  void set_tap(std::function<void(const HubFrame&)> tap);

 private:
  struct Room {
    std::mutex mu;
    bool closed = false;
    std::vector<HubFrame> history;
    std::map<std::string, FrameSink> members;
  };
  std::shared_ptr<Room> find(const RoomId& room) const;
  void deliver(Room& room, std::size_t index, const std::string& to, const FrameSink& sink) const;

  bool allow_faults_;
  mutable std::mutex mu_;
  std::map<RoomId, std::shared_ptr<Room>> rooms_;
  std::set<RoomId> closed_;
  std::shared_ptr<const FaultHook> fault_;
  std::shared_ptr<const std::function<void(const HubFrame&)>> tap_;
};

// Client view of a hub, whether in-process or across a socket.
class HubLink {
 public:
  virtual ~HubLink() = default;
  virtual void open(const RoomId& room) = 0;
  virtual void join(const RoomId& room, const std::string& identity, FrameSink sink) = 0;
  virtual void publish(const RoomId& room, const std::string& identity, Bytes body) = 0;
  virtual void leave(const RoomId& room, const std::string& identity) = 0;
  virtual void close(const RoomId& room) = 0;
};

class LocalHubLink final : public HubLink {
 public:
  explicit LocalHubLink(Hub& hub) : hub_(hub) {}
  void open(const RoomId& room) override { hub_.open(room); }
  void join(const RoomId& room, const std::string& identity, FrameSink sink) override {
    hub_.join(room, identity, std::move(sink));
  }
  void publish(const RoomId& room, const std::string& identity, Bytes body) override {
    hub_.publish(room, identity, std::move(body));
  }
  void leave(const RoomId& room, const std::string& identity) override { hub_.leave(room, identity); }
  void close(const RoomId& room) override { hub_.close(room); }

 private:
  Hub& hub_;
};

// Publishes pass through a shaped uplink before reaching `inner`.
class ShapedHubLink final : public HubLink {
 public:
  ShapedHubLink(HubLink& inner, NetworkProfile profile, DelayLine& line) : inner_(inner), link_(std::move(profile), line) {}
  void open(const RoomId& room) override { inner_.open(room); }
  void join(const RoomId& room, const std::string& identity, FrameSink sink) override {
    inner_.join(room, identity, std::move(sink));
  }
  void publish(const RoomId& room, const std::string& identity, Bytes body) override;
  void leave(const RoomId& room, const std::string& identity) override { inner_.leave(room, identity); }
  void close(const RoomId& room) override { inner_.close(room); }
  ShapedLink& link() { return link_; }

 private:
  HubLink& inner_;
  ShapedLink link_;
};

}  // namespace tdh::net
