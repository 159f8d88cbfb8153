#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>

#include "tdh/bytes.hpp"

namespace tdh {

using Digest = std::array<std::uint8_t, 32>;

Digest sha256(ByteSpan data);
Digest sha256(std::initializer_list<ByteSpan> parts);
Digest hmac_sha256(ByteSpan key, ByteSpan data);

}  // namespace tdh
