#include "tdh/envelope.hpp"

namespace tdh {

std::string_view protocol_name(ProtocolId id) {
  switch (id) {
    case ProtocolId::kNaiveKeygen: return "naive-keygen";
    case ProtocolId::kNaiveExchange: return "naive-exchange";
    case ProtocolId::kNaiveReshare: return "naive-reshare";
    case ProtocolId::kThresholdKeygen: return "threshold-keygen";
    case ProtocolId::kThresholdExchange: return "threshold-exchange";
    case ProtocolId::kThresholdReshare: return "threshold-reshare";
  }
  return "unknown";
}

std::string_view payload_kind_name(PayloadKind kind) {
  switch (kind) {
    case PayloadKind::kCommit: return "commit";
    case PayloadKind::kDecommit: return "decommit";
    case PayloadKind::kVssShare: return "vss-share";
    case PayloadKind::kAck: return "ack";
    case PayloadKind::kPubkey: return "pubkey";
  }
  return "unknown";
}

Bytes serialize(const ProtocolEnvelope& env) {
  ByteWriter w;
  w.raw(env.session_id).u8(static_cast<std::uint8_t>(env.protocol)).u8(env.round).u32(env.sender);
  w.u8(static_cast<std::uint8_t>(env.kind)).var(env.body);
  return std::move(w).take();
}

ProtocolEnvelope parse_envelope(ByteSpan bytes) {
  ByteReader r(bytes);
  ProtocolEnvelope env;
  env.session_id = r.fixed<16>();
  std::uint8_t proto = r.u8();
  if (proto < 1 || proto > 6) throw Error(ErrorCode::kInvalidEncoding, "unknown protocol id");
  env.protocol = static_cast<ProtocolId>(proto);
  env.round = r.u8();
  env.sender = r.u32();
  std::uint8_t kind = r.u8();
  if (kind < 1 || kind > 5) throw Error(ErrorCode::kInvalidEncoding, "unknown payload kind");
  env.kind = static_cast<PayloadKind>(kind);
  env.body = r.var();
  r.expect_done();
  return env;
}

}  // namespace tdh
