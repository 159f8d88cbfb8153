#pragma once

// The hub as a network service, and the matching client link.
//
// Requests (open, join, publish, leave, close, fault) travel as HubFrames;
// the server answers each with kOk or kError (u16 code || message) in
// request order. Room traffic comes back as kDeliver frames whose body is
// recipient identity (length-prefixed) || room message.

#include <atomic>
#include <deque>
#include <future>
#include <map>
#include <mutex>
#include <thread>

#include "tdh/net/hub.hpp"
#include "tdh/net/stream.hpp"

namespace tdh::net {

class HubServer {
 public:
  // Fault frames are honoured only when the hub allows faults.
  HubServer(Hub& hub, const Endpoint& listen);
  ~HubServer();

  std::uint16_t port() const { return listener_.port(); }
  void stop();

 private:
  struct Connection;
  void accept_loop();
  void serve(std::shared_ptr<Connection> conn);

  Hub& hub_;
  FramedListener listener_;
  std::atomic<bool> stopping_{false};
  std::mutex mu_;
  std::vector<std::shared_ptr<Connection>> connections_;
  std::vector<std::thread> workers_;
  std::thread acceptor_;
};

class TcpHubLink final : public HubLink {
 public:
  explicit TcpHubLink(const Endpoint& hub);
  ~TcpHubLink() override;

  void open(const RoomId& room) override;
  void join(const RoomId& room, const std::string& identity, FrameSink sink) override;
  void publish(const RoomId& room, const std::string& identity, Bytes body) override;
  void leave(const RoomId& room, const std::string& identity) override;
  void close(const RoomId& room) override;
  // Corrupts the last byte of history entry `index` as delivered to `recipient`.
  void inject_fault(const RoomId& room, std::uint32_t index, const std::string& recipient);

 private:
  void request(HubFrame frame);
  void read_loop();

  std::unique_ptr<FramedConnection> conn_;
  std::mutex mu_;
  std::map<std::pair<RoomId, std::string>, FrameSink> sinks_;
  // One slot per request in flight; publishes do not wait.
  std::deque<std::optional<std::promise<void>>> pending_;
  bool closed_ = false;
  std::thread reader_;
};

}  // namespace tdh::net
