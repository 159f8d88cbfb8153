#include "tdh/net/channel.hpp"

#include <algorithm>

namespace tdh::net {

RoomChannel::RoomChannel(HubLink& link, const RoomId& room, std::string self, std::vector<std::string> members,
                         Rng& rng)
    : link_(link), room_(room), self_(std::move(self)), members_(std::move(members)), rng_(rng), ephemeral_(rng) {
  std::sort(members_.begin(), members_.end());
  if (std::adjacent_find(members_.begin(), members_.end()) != members_.end()) {
    throw Error(ErrorCode::kInvalidArgument, "duplicate room member");
  }
  if (!std::binary_search(members_.begin(), members_.end(), self_)) {
    throw Error(ErrorCode::kInvalidArgument, "channel owner is not a room member");
  }
}

RoomChannel::~RoomChannel() {
  leave();
  for (auto& [peer, key] : keys_) secure_zero(key);
}

void RoomChannel::on_frame(const HubFrame& frame) {
  {
    std::lock_guard lock(inbox_mu_);
    inbox_.push_back(frame);
  }
  inbox_cv_.notify_all();
}

void RoomChannel::publish(Bytes body) { link_.publish(room_, self_, std::move(body)); }

void RoomChannel::join() {
  std::lock_guard lock(state_mu_);
  if (joined_) return;
  link_.join(room_, self_, [this](const HubFrame& f) { on_frame(f); });
  joined_ = true;
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(RoomMessage::kHello)).raw(ephemeral_.public_key());
  publish(std::move(w).take());
}

void RoomChannel::broadcast(ByteSpan payload) {
  std::lock_guard lock(state_mu_);
  if (failed_) throw Error(*failed_, "channel failed");
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(RoomMessage::kBroadcast)).u32(next_seq_++).var(payload);
  publish(std::move(w).take());
}

AeadKey RoomChannel::pair_key(const std::string& peer, ByteSpan peer_public) const {
  auto shared = ephemeral_.agree(peer_public);
  const std::string& lo = std::min(self_, peer);
  const std::string& hi = std::max(self_, peer);
  ByteWriter info;
  info.str("TDH-P2P-v1").raw(room_).str(lo).str(hi);
  AeadKey key = hmac_sha256(shared, info.bytes());
  secure_zero(shared);
  return key;
}

Bytes RoomChannel::direct_aad(const std::string& from, const std::string& to) const {
  ByteWriter w;
  w.raw(room_).str(from).str(to);
  return std::move(w).take();
}

void RoomChannel::send(const std::string& to, ByteSpan payload) {
  std::lock_guard lock(state_mu_);
  if (failed_) throw Error(*failed_, "channel failed");
  if (!std::binary_search(members_.begin(), members_.end(), to) || to == self_) {
    throw Error(ErrorCode::kUnknownRecipient, "'" + to + "' is not another member of the room");
  }
  queued_[to].emplace_back(payload.begin(), payload.end());
  if (keys_.contains(to)) flush_queued(to);
}

void RoomChannel::flush_queued(const std::string& peer) {
  auto it = queued_.find(peer);
  if (it == queued_.end()) return;
  const AeadKey& key = keys_.at(peer);
  for (auto& plain : it->second) {
    AeadNonce nonce;
    rng_.fill(nonce);
    Bytes sealed = aead_seal(key, nonce, direct_aad(self_, peer), plain);
    secure_zero(plain);
    ByteWriter w;
    w.u8(static_cast<std::uint8_t>(RoomMessage::kDirect)).str(peer).raw(nonce).var(sealed);
    publish(std::move(w).take());
  }
  queued_.erase(it);
}

void RoomChannel::abort(ErrorCode code) {
  std::lock_guard lock(state_mu_);
  if (aborted_ || !joined_) return;
  aborted_ = true;
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(RoomMessage::kAbort)).u16(static_cast<std::uint16_t>(code));
  try {
    publish(std::move(w).take());
  } catch (const Error&) {
    // The room may already be gone.
  }
}

void RoomChannel::leave() {
  std::lock_guard lock(state_mu_);
  if (!joined_) return;
  joined_ = false;
  try {
    link_.leave(room_, self_);
  } catch (const Error&) {
  }
}

void RoomChannel::fail(ErrorCode code, const std::string& what) {
  failed_ = code;
  abort(code);
  throw Error(code, what);
}

std::optional<ChannelEvent> RoomChannel::next(Clock::time_point deadline) {
  while (true) {
    {
      std::lock_guard lock(state_mu_);
      if (failed_) throw Error(*failed_, "channel failed");
      if (!ready_.empty()) {
        ChannelEvent ev = std::move(ready_.front());
        ready_.pop_front();
        return ev;
      }
    }
    std::deque<HubFrame> batch;
    {
      std::unique_lock lock(inbox_mu_);
      if (!inbox_cv_.wait_until(lock, deadline, [this] { return !inbox_.empty(); })) return std::nullopt;
      batch.swap(inbox_);
    }
    std::lock_guard lock(state_mu_);
    for (const auto& f : batch) handle(f);
  }
}

void RoomChannel::handle(const HubFrame& frame) {
  const std::string& from = frame.sender;
  if (!std::binary_search(members_.begin(), members_.end(), from)) return;
  ByteReader r(frame.body);
  try {
    auto type = static_cast<RoomMessage>(r.u8());
    switch (type) {
      case RoomMessage::kHello: {
        auto pub = r.raw(32);
        r.expect_done();
        if (from == self_) return;
        AeadKey key = pair_key(from, pub);
        auto it = keys_.find(from);
        if (it != keys_.end()) {
          if (!constant_time_equal(it->second, key)) fail(ErrorCode::kAuthFailure, "member re-keyed mid-session");
          return;
        }
        keys_.emplace(from, key);
        flush_queued(from);
        return;
      }
      case RoomMessage::kBroadcast:
        handle_broadcast(from, r);
        return;
      case RoomMessage::kEcho:
        handle_echo(from, r);
        return;
      case RoomMessage::kDirect:
        handle_direct(from, r);
        return;
      case RoomMessage::kAbort: {
        auto code = static_cast<ErrorCode>(r.u16());
        if (from == self_) return;
        ready_.push_back(ChannelEvent{ChannelEvent::Kind::kAbort, from, {}, code, 0});
        return;
      }
    }
    fail(ErrorCode::kInvalidEncoding, "unknown room message");
  } catch (const Error& e) {
    if (failed_) throw;
    // Undecodable traffic from a member means members no longer see the same room.
    fail(e.code() == ErrorCode::kInvalidEncoding ? ErrorCode::kDigestMismatch : e.code(), e.what());
  }
}

void RoomChannel::handle_broadcast(const std::string& from, ByteReader& r) {
  std::uint32_t seq = r.u32();
  Bytes payload = r.var();
  r.expect_done();
  auto key = std::make_pair(from, seq);
  Pending& p = pending_[key];
  if (p.mine) fail(ErrorCode::kDigestMismatch, "broadcast replayed");
  ByteWriter w;
  w.str(from).u32(seq).raw(payload);
  p.mine = sha256(w.bytes());
  p.payload = std::move(payload);
  ByteWriter echo;
  echo.u8(static_cast<std::uint8_t>(RoomMessage::kEcho)).str(from).u32(seq).raw(*p.mine);
  publish(std::move(echo).take());
  check(key);
}

void RoomChannel::handle_echo(const std::string& from, ByteReader& r) {
  std::string origin = r.str();
  std::uint32_t seq = r.u32();
  auto digest = r.fixed<32>();
  r.expect_done();
  auto key = std::make_pair(origin, seq);
  Pending& p = pending_[key];
  auto [it, fresh] = p.echoes.emplace(from, digest);
  if (!fresh && !constant_time_equal(it->second, digest)) fail(ErrorCode::kDigestMismatch, "member echoed twice");
  check(key);
}

void RoomChannel::check(const std::pair<std::string, std::uint32_t>& key) {
  Pending& p = pending_[key];
  if (!p.mine) return;
  for (const auto& [who, d] : p.echoes) {
    if (!constant_time_equal(d, *p.mine)) {
      fail(ErrorCode::kDigestMismatch, "echo from '" + who + "' disagrees with the received broadcast");
    }
  }
  if (p.delivered || p.echoes.size() != members_.size()) return;
  p.delivered = true;
  ready_.push_back(ChannelEvent{ChannelEvent::Kind::kBroadcast, key.first, std::move(p.payload),
                                ErrorCode::kSessionAborted, p.echoes.size()});
}

void RoomChannel::handle_direct(const std::string& from, ByteReader& r) {
  std::string to = r.str();
  auto nonce = r.fixed<12>();
  Bytes sealed = r.var();
  r.expect_done();
  if (to != self_) return;
  auto it = keys_.find(from);
  if (it == keys_.end()) fail(ErrorCode::kAuthFailure, "direct message before the sender's hello");
  Bytes plain;
  try {
    plain = aead_open(it->second, nonce, direct_aad(from, to), sealed);
  } catch (const Error& e) {
    fail(ErrorCode::kAuthFailure, e.what());
  }
  ready_.push_back(ChannelEvent{ChannelEvent::Kind::kDirect, from, std::move(plain), ErrorCode::kSessionAborted, 0});
}

Bytes RoomChannel::try_open_direct(const HubFrame& frame) {
  std::lock_guard lock(state_mu_);
  ByteReader r(frame.body);
  if (static_cast<RoomMessage>(r.u8()) != RoomMessage::kDirect) throw Error(ErrorCode::kInvalidArgument, "not a direct frame");
  std::string to = r.str();
  auto nonce = r.fixed<12>();
  Bytes sealed = r.var();
  auto it = keys_.find(frame.sender);
  if (it == keys_.end()) throw Error(ErrorCode::kAuthFailure, "no key shared with the sender");
  return aead_open(it->second, nonce, direct_aad(frame.sender, to), sealed);
}

}  // namespace tdh::net
