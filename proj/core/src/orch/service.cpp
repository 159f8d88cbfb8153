#include "tdh/orch/service.hpp"

#include <chrono>

namespace tdh::orch {

RequestServer::RequestServer(const net::Endpoint& listen, Handler handler)
    : handler_(std::move(handler)), listener_(listen) {
  acceptor_ = std::thread([this] { accept_loop(); });
}

RequestServer::~RequestServer() { stop(); }

void RequestServer::stop() {
  if (stopping_.exchange(true)) return;
  listener_.close();
  if (acceptor_.joinable()) acceptor_.join();
  std::vector<std::thread> workers;
  {
    std::lock_guard lock(mu_);
    for (auto& c : connections_) c->shutdown();
    workers.swap(workers_);
  }
  for (auto& w : workers) w.join();
}

void RequestServer::accept_loop() {
  while (!stopping_) {
    std::shared_ptr<net::FramedConnection> conn = listener_.accept();
    if (!conn) return;
    std::lock_guard lock(mu_);
    if (stopping_) {
      conn->shutdown();
      return;
    }
    connections_.push_back(conn);
    workers_.emplace_back([this, conn] {
      try {
        while (auto frame = conn->receive()) conn->send(handler_(*frame));
      } catch (const std::exception&) {
      }
      conn->shutdown();
    });
  }
}

OperationResult BrokerClient::submit(const OperationRequest& req) {
  auto conn = net::connect(broker_);
  conn->send(serialize(req));
  auto reply = conn->receive();
  if (!reply) throw Error(ErrorCode::kTransportFailure, "broker closed the connection");
  return parse_operation_result(*reply);
}

Bytes TcpAgentEndpoint::call(ByteSpan signed_request) {
  try {
    auto conn = net::connect(endpoint_);
    conn->send(signed_request);
    auto reply = conn->receive();
    if (!reply) throw Error(ErrorCode::kAgentUnavailable, name_ + " closed the connection");
    return std::move(*reply);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kAgentUnavailable) throw;
    throw Error(ErrorCode::kAgentUnavailable, name_ + ": " + e.what());
  }
}

void LocalAgentEndpoint::delay(std::size_t bytes) const {
  if (!profile_.shaped()) return;
  auto wire = std::chrono::duration<double>(static_cast<double>(bytes) * 8.0 / (profile_.bandwidth_mbps * 1e6));
  std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(profile_.latency_ms) + wire);
}

Bytes LocalAgentEndpoint::call(ByteSpan signed_request) {
  delay(signed_request.size());
  Bytes reply = agent_.handle(signed_request);
  delay(reply.size());
  return reply;
}

}  // namespace tdh::orch
