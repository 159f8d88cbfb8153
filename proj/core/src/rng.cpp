#include "tdh/rng.hpp"

#include <openssl/evp.h>
#include <openssl/rand.h>

#include <cstdlib>
#include <cstring>
#include <string>

#include "tdh/error.hpp"
#include "tdh/hash.hpp"

namespace tdh {

std::uint64_t Rng::next_u64() {
  std::array<std::uint8_t, 8> b{};
  fill(b);
  std::uint64_t v = 0;
  for (auto x : b) v = v << 8 | x;
  return v;
}

void SystemRng::fill(std::span<std::uint8_t> out) {
  if (out.empty()) return;
  if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1) {
    throw Error(ErrorCode::kRngFailure, "RAND_bytes failed");
  }
}

SeededRng::SeededRng(std::string_view seed) {
  key_ = sha256(ByteSpan(reinterpret_cast<const std::uint8_t*>(seed.data()), seed.size()));
}

SeededRng::SeededRng(std::uint64_t seed) : SeededRng(std::to_string(seed)) {}

void SeededRng::fill(std::span<std::uint8_t> out) {
  if (out.empty()) return;
  // Each call consumes a fresh 64-byte-aligned block range of the keystream.
  std::array<std::uint8_t, 16> iv{};
  std::uint64_t block = counter_;
  for (int i = 0; i < 8; ++i) iv[8 + i] = static_cast<std::uint8_t>(block >> (8 * i));
  std::unique_ptr<EVP_CIPHER_CTX, decltype(&EVP_CIPHER_CTX_free)> ctx(EVP_CIPHER_CTX_new(), EVP_CIPHER_CTX_free);
  if (!ctx || EVP_EncryptInit_ex(ctx.get(), EVP_chacha20(), nullptr, key_.data(), iv.data()) != 1) {
    throw Error(ErrorCode::kRngFailure, "chacha20 init failed");
  }
  std::memset(out.data(), 0, out.size());
  int len = 0;
  if (EVP_EncryptUpdate(ctx.get(), out.data(), &len, out.data(), static_cast<int>(out.size())) != 1) {
    throw Error(ErrorCode::kRngFailure, "chacha20 failed");
  }
  counter_ += (out.size() + 63) / 64;
}

std::unique_ptr<SeededRng> SeededRng::fork(std::string_view label) const {
  std::string material(reinterpret_cast<const char*>(key_.data()), key_.size());
  material += ':';
  material += label;
  return std::make_unique<SeededRng>(material);
}

std::unique_ptr<Rng> make_rng_from_env(std::string_view label) {
  const char* seed = std::getenv("TDH_SEED");
  if (seed == nullptr || *seed == '\0') return std::make_unique<SystemRng>();
  std::string s(seed);
  s += ':';
  s += label;
  return std::make_unique<SeededRng>(s);
}

}  // namespace tdh
