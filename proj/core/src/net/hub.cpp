#include "tdh/net/hub.hpp"

#include <algorithm>

#include "tdh/error.hpp"

namespace tdh::net {

Bytes serialize(const HubFrame& frame) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(frame.type)).raw(frame.room).str(frame.sender).raw(frame.body);
  return std::move(w).take();
}

HubFrame parse_hub_frame(ByteSpan bytes) {
  ByteReader r(bytes);
  HubFrame f;
  std::uint8_t type = r.u8();
  if (type < 1 || type > 9) throw Error(ErrorCode::kInvalidEncoding, "unknown hub frame type");
  f.type = static_cast<FrameType>(type);
  f.room = r.fixed<16>();
  f.sender = r.str();
  auto rest = r.raw(r.remaining());
  f.body.assign(rest.begin(), rest.end());
  return f;
}

Hub::Hub(bool allow_faults) : allow_faults_(allow_faults) {}

std::shared_ptr<Hub::Room> Hub::find(const RoomId& room) const {
  std::lock_guard lock(mu_);
  auto it = rooms_.find(room);
  if (it == rooms_.end()) {
    if (closed_.contains(room)) throw Error(ErrorCode::kRoomClosed, "room was closed");
    throw Error(ErrorCode::kUnknownRoom, "no such room");
  }
  return it->second;
}

void Hub::open(const RoomId& room) {
  std::lock_guard lock(mu_);
  if (closed_.contains(room)) throw Error(ErrorCode::kRoomClosed, "room was closed");
  if (!rooms_.contains(room)) rooms_.emplace(room, std::make_shared<Room>());
}

void Hub::deliver(Room& room, std::size_t index, const std::string& to, const FrameSink& sink) const {
  const HubFrame& frame = room.history[index];
  std::shared_ptr<const FaultHook> hook;
  {
    std::lock_guard lock(mu_);
    hook = fault_;
  }
  if (hook && *hook) {
    HubFrame copy = frame;
    (*hook)(frame.room, index, to, copy.body);
    sink(copy);
    return;
  }
  sink(frame);
}

void Hub::join(const RoomId& room, const std::string& identity, FrameSink sink) {
  auto r = find(room);
  std::lock_guard lock(r->mu);
  if (r->closed) throw Error(ErrorCode::kRoomClosed, "room was closed");
  for (std::size_t i = 0; i < r->history.size(); ++i) deliver(*r, i, identity, sink);
  r->members[identity] = std::move(sink);
}

void Hub::leave(const RoomId& room, const std::string& identity) {
  auto r = find(room);
  std::lock_guard lock(r->mu);
  r->members.erase(identity);
}

void Hub::publish(const RoomId& room, const std::string& sender, Bytes body) {
  auto r = find(room);
  std::lock_guard lock(r->mu);
  if (r->closed) throw Error(ErrorCode::kRoomClosed, "room was closed");
  if (!r->members.contains(sender)) throw Error(ErrorCode::kUnknownSender, "publisher has not joined the room");
  r->history.push_back(HubFrame{FrameType::kDeliver, room, sender, std::move(body)});
  std::size_t index = r->history.size() - 1;
  std::shared_ptr<const std::function<void(const HubFrame&)>> tap;
  {
    std::lock_guard g(mu_);
    tap = tap_;
  }
  if (tap) (*tap)(r->history[index]);
  for (const auto& [id, sink] : r->members) deliver(*r, index, id, sink);
}

void Hub::close(const RoomId& room) {
  std::shared_ptr<Room> r;
  {
    std::lock_guard lock(mu_);
    auto it = rooms_.find(room);
    if (it == rooms_.end()) {
      if (closed_.contains(room)) return;
      throw Error(ErrorCode::kUnknownRoom, "no such room");
    }
    r = it->second;
    rooms_.erase(it);
    closed_.insert(room);
  }
  std::lock_guard lock(r->mu);
  r->closed = true;
  for (auto& f : r->history) {
    secure_zero(f.body);
    std::fill(f.sender.begin(), f.sender.end(), '\0');
  }
  r->history.clear();
  r->history.shrink_to_fit();
  r->members.clear();
}

std::vector<HubFrame> Hub::history(const RoomId& room) const {
  auto r = find(room);
  std::lock_guard lock(r->mu);
  return r->history;
}

std::size_t Hub::live_rooms() const {
  std::lock_guard lock(mu_);
  return rooms_.size();
}

void Hub::set_fault_hook(FaultHook hook) {
  if (!allow_faults_) throw Error(ErrorCode::kInvalidArgument, "fault injection is disabled on this hub");
  std::lock_guard lock(mu_);
  fault_ = std::make_shared<const FaultHook>(std::move(hook));
}

void Hub::set_tap(std::function<void(const HubFrame&)> tap) {
  std::lock_guard lock(mu_);
  tap_ = std::make_shared<const std::function<void(const HubFrame&)>>(std::move(tap));
}

void ShapedHubLink::publish(const RoomId& room, const std::string& identity, Bytes body) {
  std::size_t size = 1 + room.size() + 4 + identity.size() + body.size();
  link_.send(size, [this, room, identity, body = std::move(body)]() mutable {
    inner_.publish(room, identity, std::move(body));
  });
}

}  // namespace tdh::net
