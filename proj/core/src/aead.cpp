#include "tdh/aead.hpp"

#include <openssl/evp.h>

#include <memory>

#include "tdh/error.hpp"

namespace tdh {
namespace {

struct CtxFree {
  void operator()(EVP_CIPHER_CTX* c) const { EVP_CIPHER_CTX_free(c); }
};
struct PkeyFree {
  void operator()(EVP_PKEY* k) const { EVP_PKEY_free(k); }
};
struct PkeyCtxFree {
  void operator()(EVP_PKEY_CTX* c) const { EVP_PKEY_CTX_free(c); }
};

int checked_len(std::size_t n) {
  if (n > 0x7fffffff) throw Error(ErrorCode::kInvalidArgument, "buffer too large");
  return static_cast<int>(n);
}

}  // namespace

Bytes aead_seal(const AeadKey& key, const AeadNonce& nonce, ByteSpan aad, ByteSpan plaintext) {
  std::unique_ptr<EVP_CIPHER_CTX, CtxFree> ctx(EVP_CIPHER_CTX_new());
  Bytes out(plaintext.size() + kAeadTagBytes);
  int len = 0;
  if (!ctx || EVP_EncryptInit_ex(ctx.get(), EVP_chacha20_poly1305(), nullptr, key.data(), nonce.data()) != 1 ||
      EVP_EncryptUpdate(ctx.get(), nullptr, &len, aad.data(), checked_len(aad.size())) != 1 ||
      EVP_EncryptUpdate(ctx.get(), out.data(), &len, plaintext.data(), checked_len(plaintext.size())) != 1 ||
      EVP_EncryptFinal_ex(ctx.get(), out.data() + len, &len) != 1 ||
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_AEAD_GET_TAG, kAeadTagBytes, out.data() + plaintext.size()) != 1) {
    throw Error(ErrorCode::kInvalidArgument, "AEAD encryption failed");
  }
  return out;
}

Bytes aead_open(const AeadKey& key, const AeadNonce& nonce, ByteSpan aad, ByteSpan sealed) {
  if (sealed.size() < kAeadTagBytes) throw Error(ErrorCode::kAuthFailure, "ciphertext too short");
  std::size_t body = sealed.size() - kAeadTagBytes;
  std::unique_ptr<EVP_CIPHER_CTX, CtxFree> ctx(EVP_CIPHER_CTX_new());
  Bytes out(body);
  std::array<std::uint8_t, kAeadTagBytes> tag{};
  std::copy(sealed.begin() + static_cast<long>(body), sealed.end(), tag.begin());
  int len = 0;
  bool ok = ctx && EVP_DecryptInit_ex(ctx.get(), EVP_chacha20_poly1305(), nullptr, key.data(), nonce.data()) == 1 &&
            EVP_DecryptUpdate(ctx.get(), nullptr, &len, aad.data(), checked_len(aad.size())) == 1 &&
            EVP_DecryptUpdate(ctx.get(), out.data(), &len, sealed.data(), checked_len(body)) == 1 &&
            EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_AEAD_SET_TAG, kAeadTagBytes, tag.data()) == 1 &&
            EVP_DecryptFinal_ex(ctx.get(), out.data() + len, &len) == 1;
  if (!ok) {
    secure_zero(out);
    throw Error(ErrorCode::kAuthFailure, "AEAD authentication failed");
  }
  return out;
}

X25519KeyPair::X25519KeyPair(Rng& rng) {
  rng.fill(private_);
  std::unique_ptr<EVP_PKEY, PkeyFree> key(
      EVP_PKEY_new_raw_private_key(EVP_PKEY_X25519, nullptr, private_.data(), private_.size()));
  std::size_t len = public_.size();
  if (!key || EVP_PKEY_get_raw_public_key(key.get(), public_.data(), &len) != 1) {
    throw Error(ErrorCode::kRngFailure, "X25519 key generation failed");
  }
}

X25519KeyPair::~X25519KeyPair() { secure_zero(private_); }

std::array<std::uint8_t, 32> X25519KeyPair::agree(ByteSpan peer_public) const {
  if (peer_public.size() != 32) throw Error(ErrorCode::kInvalidEncoding, "X25519 public key must be 32 bytes");
  std::unique_ptr<EVP_PKEY, PkeyFree> mine(
      EVP_PKEY_new_raw_private_key(EVP_PKEY_X25519, nullptr, private_.data(), private_.size()));
  std::unique_ptr<EVP_PKEY, PkeyFree> peer(
      EVP_PKEY_new_raw_public_key(EVP_PKEY_X25519, nullptr, peer_public.data(), peer_public.size()));
  if (!mine || !peer) throw Error(ErrorCode::kInvalidEncoding, "bad X25519 key");
  std::unique_ptr<EVP_PKEY_CTX, PkeyCtxFree> ctx(EVP_PKEY_CTX_new(mine.get(), nullptr));
  std::array<std::uint8_t, 32> out{};
  std::size_t len = out.size();
  if (!ctx || EVP_PKEY_derive_init(ctx.get()) != 1 || EVP_PKEY_derive_set_peer(ctx.get(), peer.get()) != 1 ||
      EVP_PKEY_derive(ctx.get(), out.data(), &len) != 1 || len != out.size()) {
    throw Error(ErrorCode::kInvalidEncoding, "X25519 agreement failed");
  }
  return out;
}

}  // namespace tdh
