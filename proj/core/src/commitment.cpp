#include "tdh/commitment.hpp"

#include <algorithm>
#include <limits>

namespace tdh {

namespace {
Digest digest(CommitDomain domain, const std::array<std::uint8_t, 32>& nonce, ByteSpan message) {
  std::string_view tag = commit_domain_tag(domain);
  return sha256({ByteSpan(reinterpret_cast<const std::uint8_t*>(tag.data()), tag.size()), nonce, message});
}
}  // namespace

std::string_view commit_domain_tag(CommitDomain domain) {
  switch (domain) {
    case CommitDomain::kKeygen: return "KGC";
    case CommitDomain::kExchange: return "EXC";
    case CommitDomain::kReshare: return "RSC";
  }
  return "???";
}

std::pair<Commitment, Decommitment> commit(CommitDomain domain, ByteSpan message, Rng& rng) {
  if (message.size() >= std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorCode::kInvalidArgument, "commitment message too long");
  }
  Decommitment d;
  rng.fill(d.nonce);
  d.message.assign(message.begin(), message.end());
  Commitment c{digest(domain, d.nonce, d.message)};
  return {c, std::move(d)};
}

Bytes open(CommitDomain domain, const Commitment& c, const Decommitment& d) {
  Commitment recomputed{digest(domain, d.nonce, d.message)};
  if (!(recomputed == c)) throw Error(ErrorCode::kCommitmentMismatch, "decommitment does not open commitment");
  return d.message;
}

Bytes serialize(const Commitment& c) { return Bytes(c.c.begin(), c.c.end()); }

Commitment parse_commitment(ByteSpan bytes) {
  if (bytes.size() != 32) throw Error(ErrorCode::kInvalidEncoding, "commitment must be 32 bytes");
  Commitment c;
  std::copy(bytes.begin(), bytes.end(), c.c.begin());
  return c;
}

Bytes serialize(const Decommitment& d) { return ByteWriter().raw(d.nonce).var(d.message).bytes(); }

Decommitment parse_decommitment(ByteSpan bytes) {
  ByteReader r(bytes);
  Decommitment d;
  d.nonce = r.fixed<32>();
  d.message = r.var();
  r.expect_done();
  return d;
}

}  // namespace tdh
