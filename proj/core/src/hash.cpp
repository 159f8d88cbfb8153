#include "tdh/hash.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <memory>

namespace tdh {

Digest sha256(ByteSpan data) { return sha256({data}); }

Digest sha256(std::initializer_list<ByteSpan> parts) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kInvalidArgument, "sha256 init failed");
  }
  for (ByteSpan p : parts) EVP_DigestUpdate(ctx.get(), p.data(), p.size());
  Digest out{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), out.data(), &len);
  return out;
}

Digest hmac_sha256(ByteSpan key, ByteSpan data) {
  Digest out{};
  unsigned int len = 0;
  if (!HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), data.data(), data.size(), out.data(), &len)) {
    throw Error(ErrorCode::kInvalidArgument, "hmac failed");
  }
  return out;
}

}  // namespace tdh
