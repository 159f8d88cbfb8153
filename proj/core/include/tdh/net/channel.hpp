#pragma once

// One member's view of a room: echo broadcast (a payload is delivered only
// once every member has echoed the same digest for it) and AEAD-protected
// pairwise messages keyed by ephemeral X25519 hellos exchanged on join.

#include <chrono>
#include <condition_variable>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tdh/aead.hpp"
#include "tdh/error.hpp"
#include "tdh/hash.hpp"
#include "tdh/net/hub.hpp"

namespace tdh::net {

enum class RoomMessage : std::uint8_t { kHello = 1, kBroadcast = 2, kEcho = 3, kDirect = 4, kAbort = 5 };

struct ChannelEvent {
  enum class Kind { kBroadcast, kDirect, kAbort };
  Kind kind = Kind::kBroadcast;
  std::string from;
  Bytes payload;
  // kAbort: the code the peer reported.
  ErrorCode code = ErrorCode::kSessionAborted;
  // kBroadcast: number of matching echoes collected before delivery.
  std::size_t confirmations = 0;
};

class RoomChannel {
 public:
  using Clock = std::chrono::steady_clock;

  RoomChannel(HubLink& link, const RoomId& room, std::string self, std::vector<std::string> members, Rng& rng);
  ~RoomChannel();
  RoomChannel(const RoomChannel&) = delete;
  RoomChannel& operator=(const RoomChannel&) = delete;

  // Joins the room and announces this member's ephemeral key.
  void join();
  void broadcast(ByteSpan payload);
  // Queued until the recipient's hello has been seen. kUnknownRecipient for non-members.
  void send(const std::string& to, ByteSpan payload);
  // Tells the other members this session is over. Sent at most once.
  void abort(ErrorCode code);
  // Next delivered event, or nullopt once `deadline` passes. Throws
  // kDigestMismatch / kAuthFailure when the room's traffic is inconsistent;
  // the channel stays failed afterwards.
  std::optional<ChannelEvent> next(Clock::time_point deadline);
  void leave();

  const std::string& self() const { return self_; }
  const std::vector<std::string>& members() const { return members_; }

  // Opens a direct frame addressed to someone else with this member's keys.
  // Always fails with kAuthFailure unless the frame was meant for us; exposed
  // for tests.
  Bytes try_open_direct(const HubFrame& frame);

 private:
  struct Pending {
    std::optional<Digest> mine;
    std::map<std::string, Digest> echoes;
    Bytes payload;
    bool delivered = false;
  };

  void on_frame(const HubFrame& frame);
  void handle(const HubFrame& frame);
  void handle_broadcast(const std::string& from, ByteReader& r);
  void handle_echo(const std::string& from, ByteReader& r);
  void handle_direct(const std::string& from, ByteReader& r);
  void check(const std::pair<std::string, std::uint32_t>& key);
  void publish(Bytes body);
  void flush_queued(const std::string& peer);
  AeadKey pair_key(const std::string& peer, ByteSpan peer_public) const;
  Bytes direct_aad(const std::string& from, const std::string& to) const;
  [[noreturn]] void fail(ErrorCode code, const std::string& what);

  HubLink& link_;
  RoomId room_;
  std::string self_;
  std::vector<std::string> members_;
  Rng& rng_;
  X25519KeyPair ephemeral_;

  std::mutex inbox_mu_;
  std::condition_variable inbox_cv_;
  std::deque<HubFrame> inbox_;

  std::recursive_mutex state_mu_;
  bool joined_ = false;
  bool aborted_ = false;
  std::optional<ErrorCode> failed_;
  std::uint32_t next_seq_ = 0;
  std::map<std::string, AeadKey> keys_;
  std::map<std::string, std::vector<Bytes>> queued_;
  std::map<std::pair<std::string, std::uint32_t>, Pending> pending_;
  std::deque<ChannelEvent> ready_;
};

}  // namespace tdh::net
