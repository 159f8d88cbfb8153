#include "tdh/net/hub_server.hpp"

#include <set>

#include "tdh/error.hpp"

namespace tdh::net {

struct HubServer::Connection {
  std::unique_ptr<FramedConnection> stream;
  std::mutex mu;
  std::set<std::pair<RoomId, std::string>> joined;
};

HubServer::HubServer(Hub& hub, const Endpoint& listen) : hub_(hub), listener_(listen) {
  acceptor_ = std::thread([this] { accept_loop(); });
}

HubServer::~HubServer() { stop(); }

void HubServer::stop() {
  if (stopping_.exchange(true)) return;
  listener_.close();
  if (acceptor_.joinable()) acceptor_.join();
  std::vector<std::thread> workers;
  {
    std::lock_guard lock(mu_);
    for (auto& c : connections_) c->stream->shutdown();
    workers.swap(workers_);
  }
  for (auto& t : workers) t.join();
}

void HubServer::accept_loop() {
  while (!stopping_) {
    auto stream = listener_.accept();
    if (!stream) return;
    auto conn = std::make_shared<Connection>();
    conn->stream = std::move(stream);
    std::lock_guard lock(mu_);
    if (stopping_) return;
    connections_.push_back(conn);
    workers_.emplace_back([this, conn] { serve(conn); });
  }
}

namespace {

Bytes error_body(ErrorCode code, std::string_view what) {
  ByteWriter w;
  w.u16(static_cast<std::uint16_t>(code)).str(what);
  return std::move(w).take();
}

}  // namespace

void HubServer::serve(std::shared_ptr<Connection> conn) {
  std::weak_ptr<Connection> weak = conn;
  auto reply = [&](const HubFrame& req, FrameType type, Bytes body) {
    conn->stream->send(serialize(HubFrame{type, req.room, {}, std::move(body)}));
  };
  while (auto raw = conn->stream->receive()) {
    HubFrame req;
    try {
      req = parse_hub_frame(*raw);
    } catch (const Error&) {
      break;
    }
    try {
      switch (req.type) {
        case FrameType::kOpen:
          hub_.open(req.room);
          break;
        case FrameType::kJoin: {
          RoomId room = req.room;
          std::string who = req.sender;
          hub_.join(room, who, [weak, room, who](const HubFrame& f) {
            auto c = weak.lock();
            if (!c) return;
            ByteWriter w;
            w.str(who).raw(f.body);
            try {
              c->stream->send(serialize(HubFrame{FrameType::kDeliver, room, f.sender, std::move(w).take()}));
            } catch (const Error&) {
            }
          });
          std::lock_guard lock(conn->mu);
          conn->joined.insert({room, who});
          break;
        }
        case FrameType::kPublish:
          hub_.publish(req.room, req.sender, req.body);
          break;
        case FrameType::kLeave: {
          hub_.leave(req.room, req.sender);
          std::lock_guard lock(conn->mu);
          conn->joined.erase({req.room, req.sender});
          break;
        }
        case FrameType::kClose:
          hub_.close(req.room);
          break;
        case FrameType::kFault: {
          ByteReader r(req.body);
          std::uint32_t index = r.u32();
          std::string target = r.str();
          RoomId room = req.room;
          hub_.set_fault_hook([room, index, target](const RoomId& rm, std::size_t i, const std::string& to, Bytes& body) {
            if (rm == room && i == index && to == target && !body.empty()) body.back() ^= 0x01;
          });
          break;
        }
        default:
          throw Error(ErrorCode::kInvalidArgument, "unsupported request");
      }
      reply(req, FrameType::kOk, {});
    } catch (const Error& e) {
      try {
        reply(req, FrameType::kError, error_body(e.code(), e.what()));
      } catch (const Error&) {
        break;
      }
    }
  }
  std::set<std::pair<RoomId, std::string>> joined;
  {
    std::lock_guard lock(conn->mu);
    joined.swap(conn->joined);
  }
  for (const auto& [room, who] : joined) {
    try {
      hub_.leave(room, who);
    } catch (const Error&) {
    }
  }
}

TcpHubLink::TcpHubLink(const Endpoint& hub) : conn_(connect(hub)) {
  reader_ = std::thread([this] { read_loop(); });
}

TcpHubLink::~TcpHubLink() {
  conn_->shutdown();
  if (reader_.joinable()) reader_.join();
}

void TcpHubLink::read_loop() {
  while (auto raw = conn_->receive()) {
    HubFrame f;
    try {
      f = parse_hub_frame(*raw);
    } catch (const Error&) {
      break;
    }
    if (f.type == FrameType::kDeliver) {
      ByteReader r(f.body);
      std::string to = r.str();
      auto rest = r.raw(r.remaining());
      FrameSink sink;
      {
        std::lock_guard lock(mu_);
        auto it = sinks_.find({f.room, to});
        if (it != sinks_.end()) sink = it->second;
      }
      if (sink) sink(HubFrame{FrameType::kDeliver, f.room, f.sender, Bytes(rest.begin(), rest.end())});
      continue;
    }
    std::optional<std::promise<void>> slot;
    {
      std::lock_guard lock(mu_);
      if (pending_.empty()) continue;
      slot = std::move(pending_.front());
      pending_.pop_front();
    }
    if (!slot) continue;
    if (f.type == FrameType::kOk) {
      slot->set_value();
    } else {
      ByteReader r(f.body);
      auto code = static_cast<ErrorCode>(r.u16());
      std::string what = r.str();
      slot->set_exception(std::make_exception_ptr(Error(code, what)));
    }
  }
  std::lock_guard lock(mu_);
  closed_ = true;
  for (auto& slot : pending_) {
    if (slot) slot->set_exception(std::make_exception_ptr(Error(ErrorCode::kTransportFailure, "hub connection lost")));
  }
  pending_.clear();
}

void TcpHubLink::request(HubFrame frame) {
  std::future<void> done;
  {
    std::lock_guard lock(mu_);
    if (closed_) throw Error(ErrorCode::kTransportFailure, "hub connection lost");
    std::promise<void> p;
    done = p.get_future();
    pending_.emplace_back(std::move(p));
    conn_->send(serialize(frame));
  }
  done.get();
}

void TcpHubLink::open(const RoomId& room) { request(HubFrame{FrameType::kOpen, room, {}, {}}); }

void TcpHubLink::join(const RoomId& room, const std::string& identity, FrameSink sink) {
  {
    std::lock_guard lock(mu_);
    sinks_[{room, identity}] = std::move(sink);
  }
  try {
    request(HubFrame{FrameType::kJoin, room, identity, {}});
  } catch (...) {
    std::lock_guard lock(mu_);
    sinks_.erase({room, identity});
    throw;
  }
}

void TcpHubLink::publish(const RoomId& room, const std::string& identity, Bytes body) {
  std::lock_guard lock(mu_);
  if (closed_) throw Error(ErrorCode::kTransportFailure, "hub connection lost");
  pending_.emplace_back(std::nullopt);
  conn_->send(serialize(HubFrame{FrameType::kPublish, room, identity, std::move(body)}));
}

void TcpHubLink::leave(const RoomId& room, const std::string& identity) {
  // The reply is read on the reader thread, so once it arrives no delivery
  // to this sink is still running.
  auto forget = [&] {
    std::lock_guard lock(mu_);
    sinks_.erase({room, identity});
  };
  try {
    request(HubFrame{FrameType::kLeave, room, identity, {}});
  } catch (...) {
    forget();
    throw;
  }
  forget();
}

void TcpHubLink::close(const RoomId& room) { request(HubFrame{FrameType::kClose, room, {}, {}}); }

void TcpHubLink::inject_fault(const RoomId& room, std::uint32_t index, const std::string& recipient) {
  ByteWriter w;
  w.u32(index).str(recipient);
  request(HubFrame{FrameType::kFault, room, {}, std::move(w).take()});
}

}  // namespace tdh::net
