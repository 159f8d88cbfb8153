#pragma once

// ChaCha20-Poly1305 and ephemeral X25519 agreement (OpenSSL), used for the
// pairwise P2P channels and for share encryption at rest.

#include <array>

#include "tdh/bytes.hpp"
#include "tdh/rng.hpp"

namespace tdh {

using AeadKey = std::array<std::uint8_t, 32>;
using AeadNonce = std::array<std::uint8_t, 12>;
inline constexpr std::size_t kAeadTagBytes = 16;

// Returns ciphertext || tag.
Bytes aead_seal(const AeadKey& key, const AeadNonce& nonce, ByteSpan aad, ByteSpan plaintext);
// Throws Error(kAuthFailure) on any mismatch.
Bytes aead_open(const AeadKey& key, const AeadNonce& nonce, ByteSpan aad, ByteSpan sealed);

class X25519KeyPair {
 public:
  explicit X25519KeyPair(Rng& rng);
  ~X25519KeyPair();
  X25519KeyPair(const X25519KeyPair&) = delete;
  X25519KeyPair& operator=(const X25519KeyPair&) = delete;

  const std::array<std::uint8_t, 32>& public_key() const { return public_; }
  // Throws kInvalidEncoding for a low-order peer key (all-zero output).
  std::array<std::uint8_t, 32> agree(ByteSpan peer_public) const;

 private:
  std::array<std::uint8_t, 32> private_{};
  std::array<std::uint8_t, 32> public_{};
};

}  // namespace tdh
