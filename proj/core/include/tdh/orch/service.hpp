#pragma once

// Network and in-process plumbing for the broker and agents: a generic
// request/response server over framed TCP, the customer client, and the
// broker's two kinds of agent endpoints.

#include <atomic>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "tdh/net/emulator.hpp"
#include "tdh/net/stream.hpp"
#include "tdh/orch/agent.hpp"
#include "tdh/orch/broker.hpp"

namespace tdh::orch {

// Each request frame is answered with handler(frame) on the same connection.
class RequestServer {
 public:
  using Handler = std::function<Bytes(ByteSpan)>;
  RequestServer(const net::Endpoint& listen, Handler handler);
  ~RequestServer();
  std::uint16_t port() const { return listener_.port(); }
  void stop();

 private:
  void accept_loop();

  Handler handler_;
  net::FramedListener listener_;
  std::atomic<bool> stopping_{false};
  std::mutex mu_;
  std::vector<std::shared_ptr<net::FramedConnection>> connections_;
  std::vector<std::thread> workers_;
  std::thread acceptor_;
};

class BrokerClient {
 public:
  explicit BrokerClient(net::Endpoint broker) : broker_(std::move(broker)) {}
  // Throws kTransportFailure when the broker cannot be reached.
  OperationResult submit(const OperationRequest& req);

 private:
  net::Endpoint broker_;
};

class TcpAgentEndpoint final : public AgentEndpoint {
 public:
  TcpAgentEndpoint(std::string name, net::Endpoint endpoint) : name_(std::move(name)), endpoint_(std::move(endpoint)) {}
  const std::string& name() const override { return name_; }
  Bytes call(ByteSpan signed_request) override;

 private:
  std::string name_;
  net::Endpoint endpoint_;
};

// Calls the agent directly, charging the profile's latency and
// transmission time in each direction.
class LocalAgentEndpoint final : public AgentEndpoint {
 public:
  LocalAgentEndpoint(Agent& agent, net::NetworkProfile profile) : agent_(agent), profile_(std::move(profile)) {}
  const std::string& name() const override { return agent_.name(); }
  Bytes call(ByteSpan signed_request) override;

 private:
  void delay(std::size_t bytes) const;

  Agent& agent_;
  net::NetworkProfile profile_;
};

}  // namespace tdh::orch
