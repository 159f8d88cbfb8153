#include "tdh/protocols.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <string>

#include "round_protocol.hpp"

namespace tdh {

std::string_view scheme_name(Scheme scheme) { return scheme == Scheme::kNaive ? "naive" : "threshold"; }

Scheme parse_scheme(std::string_view name) {
  std::string s;
  for (char c : name) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (s == "naive") return Scheme::kNaive;
  if (s == "threshold") return Scheme::kThreshold;
  throw Error(ErrorCode::kInvalidArgument, "unknown scheme '" + std::string(name) + "'");
}

void SchemeParams::validate() const {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "committee size must be positive");
  if (scheme == Scheme::kNaive && t + 1 != n) throw Error(ErrorCode::kInvalidArgument, "naive scheme requires t = n - 1");
  if (t >= n) throw Error(ErrorCode::kInvalidArgument, "threshold must be below committee size");
}

std::vector<PartyId> committee_ids(std::uint16_t n) {
  std::vector<PartyId> out;
  for (std::uint32_t i = 1; i <= n; ++i) out.push_back(PartyId{i});
  return out;
}

void KeyShareRecord::check_consistency() const {
  GroupPoint g = GroupPoint::generator(params.curve);
  if (!(private_share * g == public_share)) throw Error(ErrorCode::kFeldmanReject, "public share mismatch");
  if (params.scheme == Scheme::kThreshold) {
    if (verification.size() != static_cast<std::size_t>(params.t) + 1) {
      throw Error(ErrorCode::kFeldmanReject, "verification vector has wrong length");
    }
    if (!(feldman_eval(verification, self) == public_share)) {
      throw Error(ErrorCode::kFeldmanReject, "share inconsistent with verification data");
    }
    if (!(verification.front() == public_key)) throw Error(ErrorCode::kFeldmanReject, "constant term is not the key");
  }
}

Bytes serialize(const KeyShareRecord& rec) {
  ByteWriter w;
  w.u8(1).u8(static_cast<std::uint8_t>(rec.params.curve)).u8(static_cast<std::uint8_t>(rec.params.scheme));
  w.u16(rec.params.t).u16(rec.params.n).u32(rec.self.value);
  w.raw(rec.private_share.to_bytes()).raw(encode_point(rec.public_share)).raw(encode_point(rec.public_key));
  w.var(serialize(rec.verification));
  w.u16(static_cast<std::uint16_t>(rec.public_shares.size()));
  for (const auto& [id, p] : rec.public_shares) w.u32(id.value).raw(encode_point(p));
  return std::move(w).take();
}

KeyShareRecord parse_key_share_record(ByteSpan bytes) {
  ByteReader r(bytes);
  if (r.u8() != 1) throw Error(ErrorCode::kInvalidEncoding, "unknown key share record version");
  SchemeParams params;
  std::uint8_t curve = r.u8();
  std::uint8_t scheme = r.u8();
  if (curve < 1 || curve > 2 || scheme < 1 || scheme > 2) throw Error(ErrorCode::kInvalidEncoding, "bad record header");
  params.curve = static_cast<CurveId>(curve);
  params.scheme = static_cast<Scheme>(scheme);
  params.t = r.u16();
  params.n = r.u16();
  params.validate();
  PartyId self{r.u32()};
  GroupScalar priv = GroupScalar::from_bytes(params.curve, r.raw(32));
  GroupPoint pub_share = decode_point(r.raw(kEncodedPointBytes), params.curve);
  GroupPoint pub_key = decode_point(r.raw(kEncodedPointBytes), params.curve);
  Bytes comms = r.var();
  FeldmanCommitments verification;
  if (comms.size() > 2) verification = parse_feldman_commitments(comms, params.curve, DecodeMode::kStrict);
  std::map<PartyId, GroupPoint> shares;
  std::uint16_t count = r.u16();
  for (std::uint16_t i = 0; i < count; ++i) {
    PartyId id{r.u32()};
    shares.emplace(id, decode_point(r.raw(kEncodedPointBytes), params.curve));
  }
  r.expect_done();
  return KeyShareRecord{params, self, priv, pub_share, pub_key, std::move(verification), std::move(shares)};
}

Digest derive_psk(const GroupPoint& shared) {
  GroupPoint s = sanitize_point(shared);
  if (s.is_identity()) throw Error(ErrorCode::kProtocolFailure, "shared point is the identity");
  EncodedPoint enc = encode_point(s);
  if (s.curve() == CurveId::kCurve25519) enc[32] = 0;
  static constexpr std::string_view kTag = "TDH-PSK-v1";
  return sha256({ByteSpan(reinterpret_cast<const std::uint8_t*>(kTag.data()), kTag.size()), enc});
}

// ---- Session ----

Session::Session(std::unique_ptr<RoundProtocol> protocol) : protocol_(std::move(protocol)) {}
Session::Session(Session&&) noexcept = default;
Session& Session::operator=(Session&&) noexcept = default;
Session::~Session() = default;

const SessionId& Session::id() const { return protocol_->session(); }
ProtocolId Session::protocol() const { return protocol_->protocol(); }
std::uint32_t Session::self() const { return protocol_->self(); }
const std::vector<std::uint32_t>& Session::participants() const { return protocol_->participants(); }
std::uint8_t Session::final_round() const { return protocol_->final_round(); }

void Session::abort(ErrorCode code) {
  if (!abort_code_) abort_code_ = code;
}

StepResult Session::start() {
  if (abort_code_) throw Error(*abort_code_, "session already aborted");
  if (started_) throw Error(ErrorCode::kInvalidArgument, "session already started");
  started_ = true;
  try {
    StepResult res;
    res.outgoing = protocol_->begin();
    StepResult more = advance();
    res.outgoing.insert(res.outgoing.end(), more.outgoing.begin(), more.outgoing.end());
    res.output = std::move(more.output);
    return res;
  } catch (const Error& e) {
    abort_code_ = e.code();
    throw;
  }
}

StepResult Session::step(std::span<const ProtocolEnvelope> incoming) {
  if (abort_code_) throw Error(*abort_code_, "session aborted");
  if (!started_) throw Error(ErrorCode::kInvalidArgument, "session not started");
  if (finished_) return {};
  try {
    const auto& parts = protocol_->participants();
    for (const auto& env : incoming) {
      if (env.session_id != protocol_->session() || env.protocol != protocol_->protocol()) {
        throw Error(ErrorCode::kUnexpectedMessage, "envelope for another session");
      }
      if (std::find(parts.begin(), parts.end(), env.sender) == parts.end()) {
        throw Error(ErrorCode::kUnknownSender, "sender " + std::to_string(env.sender) + " not in committee");
      }
      if (env.round < round_) throw Error(ErrorCode::kDuplicateMessage, "message for a completed round");
      if (env.round > protocol_->final_round()) throw Error(ErrorCode::kUnexpectedMessage, "round out of range");
      bool is_p2p = env.recipient.has_value();
      if (is_p2p && *env.recipient != protocol_->self()) {
        throw Error(ErrorCode::kUnexpectedMessage, "p2p message for another party");
      }
      auto exp = protocol_->expected(env.round);
      bool wanted = std::any_of(exp.begin(), exp.end(), [&](const Expectation& e) {
        return e.sender == env.sender && e.kind == env.kind && e.p2p == is_p2p;
      });
      if (!wanted) throw Error(ErrorCode::kUnexpectedMessage, "message not expected in this round");
      auto& slot = buffered_[env.round];
      bool dup = std::any_of(slot.begin(), slot.end(), [&](const ProtocolEnvelope& b) {
        return b.sender == env.sender && b.kind == env.kind;
      });
      if (dup) throw Error(ErrorCode::kDuplicateMessage, "duplicate round message");
      slot.push_back(env);
    }
    return advance();
  } catch (const Error& e) {
    abort_code_ = e.code();
    throw;
  }
}

StepResult Session::advance() {
  StepResult res;
  while (!finished_) {
    auto exp = protocol_->expected(round_);
    auto& slot = buffered_[round_];
    if (slot.size() < exp.size()) break;
    Inbox inbox;
    for (const auto& env : slot) inbox.put(env);
    auto outcome = protocol_->process(round_, inbox);
    buffered_.erase(round_);
    res.outgoing.insert(res.outgoing.end(), outcome.outgoing.begin(), outcome.outgoing.end());
    if (outcome.output) {
      finished_ = true;
      res.output = std::move(outcome.output);
      break;
    }
    if (round_ == protocol_->final_round()) {
      throw Error(ErrorCode::kProtocolFailure, "final round produced no output");
    }
    ++round_;
  }
  return res;
}

Session make_keygen_session(const KeygenConfig& cfg, std::unique_ptr<Rng> rng) {
  return Session(make_keygen_protocol(cfg, std::move(rng)));
}
Session make_exchange_session(const ExchangeConfig& cfg, std::unique_ptr<Rng> rng) {
  return Session(make_exchange_protocol(cfg, std::move(rng)));
}
Session make_reshare_old_session(const ReshareConfig& cfg, const KeyShareRecord& old_share, std::unique_ptr<Rng> rng) {
  return Session(make_reshare_protocol(cfg, &old_share, std::nullopt, std::move(rng)));
}
Session make_reshare_new_session(const ReshareConfig& cfg, PartyId new_self, std::unique_ptr<Rng> rng) {
  return Session(make_reshare_protocol(cfg, nullptr, new_self, std::move(rng)));
}

}  // namespace tdh
