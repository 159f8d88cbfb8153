#pragma once

// Length-prefixed (u32 big-endian) binary frames over TCP.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "tdh/bytes.hpp"

namespace tdh::net {

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;

  std::string to_string() const { return host + ":" + std::to_string(port); }
};

// "host:port" or ":port". Throws kInvalidArgument.
Endpoint parse_endpoint(std::string_view text);

inline constexpr std::size_t kMaxFrameBytes = 16u << 20;

class FramedConnection {
 public:
  virtual ~FramedConnection() = default;
  // Thread-safe. Throws kTransportFailure.
  virtual void send(ByteSpan frame) = 0;
  // Blocks; nullopt once the peer has closed the stream.
  virtual std::optional<Bytes> receive() = 0;
  virtual void shutdown() = 0;
  virtual std::string peer() const = 0;
};

// Throws kTransportFailure when nobody is listening.
std::unique_ptr<FramedConnection> connect(const Endpoint& endpoint);

class FramedListener {
 public:
  // Port 0 picks a free port.
  explicit FramedListener(const Endpoint& endpoint);
  ~FramedListener();

  std::uint16_t port() const;
  // nullptr after close().
  std::unique_ptr<FramedConnection> accept();
  void close();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace tdh::net
