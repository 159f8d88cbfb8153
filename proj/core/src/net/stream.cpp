#include "tdh/net/stream.hpp"

#include <boost/asio.hpp>
#include <charconv>
#include <mutex>

#include "tdh/error.hpp"

namespace tdh::net {

namespace asio = boost::asio;
using asio::ip::tcp;

Endpoint parse_endpoint(std::string_view text) {
  auto colon = text.rfind(':');
  if (colon == std::string_view::npos) throw Error(ErrorCode::kInvalidArgument, "address must be host:port");
  Endpoint ep;
  if (colon > 0) ep.host = std::string(text.substr(0, colon));
  auto port = text.substr(colon + 1);
  unsigned value = 0;
  auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), value);
  if (ec != std::errc() || ptr != port.data() + port.size() || value > 65535) {
    throw Error(ErrorCode::kInvalidArgument, "bad port in '" + std::string(text) + "'");
  }
  ep.port = static_cast<std::uint16_t>(value);
  return ep;
}

namespace {

class AsioConnection final : public FramedConnection {
 public:
  AsioConnection(std::shared_ptr<asio::io_context> io, tcp::socket socket)
      : io_(std::move(io)), socket_(std::move(socket)) {
    boost::system::error_code ec;
    socket_.set_option(tcp::no_delay(true), ec);
    auto remote = socket_.remote_endpoint(ec);
    peer_ = ec ? "?" : remote.address().to_string() + ":" + std::to_string(remote.port());
  }
  ~AsioConnection() override { shutdown(); }

  void send(ByteSpan frame) override {
    if (frame.size() > kMaxFrameBytes) throw Error(ErrorCode::kTransportFailure, "frame too large");
    std::uint8_t header[4] = {static_cast<std::uint8_t>(frame.size() >> 24), static_cast<std::uint8_t>(frame.size() >> 16),
                              static_cast<std::uint8_t>(frame.size() >> 8), static_cast<std::uint8_t>(frame.size())};
    std::array<asio::const_buffer, 2> bufs{asio::buffer(header), asio::buffer(frame.data(), frame.size())};
    std::lock_guard lock(write_mu_);
    boost::system::error_code ec;
    asio::write(socket_, bufs, ec);
    if (ec) throw Error(ErrorCode::kTransportFailure, "send to " + peer_ + " failed: " + ec.message());
  }

  std::optional<Bytes> receive() override {
    std::uint8_t header[4];
    boost::system::error_code ec;
    asio::read(socket_, asio::buffer(header), ec);
    if (ec) return std::nullopt;
    std::size_t len = (std::size_t{header[0]} << 24) | (std::size_t{header[1]} << 16) | (std::size_t{header[2]} << 8) |
                      header[3];
    if (len > kMaxFrameBytes) throw Error(ErrorCode::kTransportFailure, "oversized frame from " + peer_);
    Bytes body(len);
    asio::read(socket_, asio::buffer(body), ec);
    if (ec) return std::nullopt;
    return body;
  }

  void shutdown() override {
    boost::system::error_code ec;
    socket_.shutdown(tcp::socket::shutdown_both, ec);
  }

  std::string peer() const override { return peer_; }

 private:
  std::shared_ptr<asio::io_context> io_;
  tcp::socket socket_;
  std::mutex write_mu_;
  std::string peer_;
};

}  // namespace

std::unique_ptr<FramedConnection> connect(const Endpoint& endpoint) {
  auto io = std::make_shared<asio::io_context>();
  tcp::resolver resolver(*io);
  boost::system::error_code ec;
  auto results = resolver.resolve(endpoint.host, std::to_string(endpoint.port), ec);
  if (ec) throw Error(ErrorCode::kTransportFailure, "cannot resolve " + endpoint.to_string());
  tcp::socket socket(*io);
  asio::connect(socket, results, ec);
  if (ec) throw Error(ErrorCode::kTransportFailure, "cannot connect to " + endpoint.to_string() + ": " + ec.message());
  return std::make_unique<AsioConnection>(io, std::move(socket));
}

struct FramedListener::Impl {
  std::shared_ptr<asio::io_context> io = std::make_shared<asio::io_context>();
  tcp::acceptor acceptor{*io};
  std::mutex mu;
  bool closed = false;
};

FramedListener::FramedListener(const Endpoint& endpoint) : impl_(std::make_unique<Impl>()) {
  boost::system::error_code ec;
  auto addr = asio::ip::make_address(endpoint.host == "localhost" ? "127.0.0.1" : endpoint.host, ec);
  if (ec) throw Error(ErrorCode::kInvalidArgument, "bad listen address " + endpoint.host);
  tcp::endpoint ep(addr, endpoint.port);
  impl_->acceptor.open(ep.protocol(), ec);
  if (!ec) impl_->acceptor.set_option(tcp::acceptor::reuse_address(true), ec);
  if (!ec) impl_->acceptor.bind(ep, ec);
  if (!ec) impl_->acceptor.listen(asio::socket_base::max_listen_connections, ec);
  if (ec) throw Error(ErrorCode::kTransportFailure, "cannot listen on " + endpoint.to_string() + ": " + ec.message());
}

FramedListener::~FramedListener() { close(); }

std::uint16_t FramedListener::port() const { return impl_->acceptor.local_endpoint().port(); }

std::unique_ptr<FramedConnection> FramedListener::accept() {
  tcp::socket socket(*impl_->io);
  boost::system::error_code ec;
  impl_->acceptor.accept(socket, ec);
  if (ec) return nullptr;
  {
    std::lock_guard lock(impl_->mu);
    if (impl_->closed) return nullptr;
  }
  return std::make_unique<AsioConnection>(impl_->io, std::move(socket));
}

void FramedListener::close() {
  std::lock_guard lock(impl_->mu);
  if (impl_->closed) return;
  impl_->closed = true;
  // Unblocks a thread parked in accept(); the descriptor is released with the acceptor.
  ::shutdown(impl_->acceptor.native_handle(), SHUT_RDWR);
}

}  // namespace tdh::net
