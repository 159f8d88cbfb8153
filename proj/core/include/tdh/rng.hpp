#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>

namespace tdh {

// Source of uniform random bytes. Implementations throw Error(kRngFailure).
class Rng {
 public:
  virtual ~Rng() = default;
  virtual void fill(std::span<std::uint8_t> out) = 0;

  std::uint64_t next_u64();
};

// OpenSSL RAND_bytes.
class SystemRng final : public Rng {
 public:
  void fill(std::span<std::uint8_t> out) override;
};

// Deterministic ChaCha20 keystream keyed by SHA-256(seed). Used for
// reproducible transcripts and seeded tests; never for production keys.
class SeededRng final : public Rng {
 public:
  explicit SeededRng(std::string_view seed);
  explicit SeededRng(std::uint64_t seed);

  void fill(std::span<std::uint8_t> out) override;

  // Independent stream derived from this seed and a label.
  std::unique_ptr<SeededRng> fork(std::string_view label) const;

 private:
  std::array<std::uint8_t, 32> key_{};
  std::uint64_t counter_ = 0;
};

// Returns a SeededRng when TDH_SEED is set (mixed with `label`), otherwise SystemRng.
std::unique_ptr<Rng> make_rng_from_env(std::string_view label);

}  // namespace tdh
