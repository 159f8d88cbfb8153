#include "tdh/orch/messages.hpp"

namespace tdh::orch {

std::string_view operation_name(Operation op) {
  switch (op) {
    case Operation::kKeygen:
      return "keygen";
    case Operation::kExchange:
      return "exchange";
    case Operation::kReshare:
      return "reshare";
    case Operation::kPskExchange:
      return "psk-exchange";
  }
  return "?";
}

namespace {

void put_params(ByteWriter& w, const SchemeParams& p) {
  w.u8(static_cast<std::uint8_t>(p.curve)).u8(static_cast<std::uint8_t>(p.scheme)).u16(p.t).u16(p.n);
}

SchemeParams get_params(ByteReader& r) {
  SchemeParams p;
  std::uint8_t curve = r.u8();
  std::uint8_t scheme = r.u8();
  if (curve < 1 || curve > 2 || scheme < 1 || scheme > 2) throw Error(ErrorCode::kInvalidEncoding, "bad scheme parameters");
  p.curve = static_cast<CurveId>(curve);
  p.scheme = static_cast<Scheme>(scheme);
  p.t = r.u16();
  p.n = r.u16();
  return p;
}

void put_error(ByteWriter& w, const std::optional<ErrorCode>& e, const std::string& message) {
  w.u16(e ? static_cast<std::uint16_t>(*e) : 0).str(message);
}

std::optional<ErrorCode> get_error(ByteReader& r) {
  std::uint16_t code = r.u16();
  if (code == 0) return std::nullopt;
  return static_cast<ErrorCode>(code);
}

Operation get_op(ByteReader& r) {
  std::uint8_t op = r.u8();
  if (op < 1 || op > 4) throw Error(ErrorCode::kInvalidEncoding, "unknown operation");
  return static_cast<Operation>(op);
}

}  // namespace

Bytes serialize(const OperationRequest& req) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(req.op)).str(req.credential).str(req.key_id);
  put_params(w, req.params);
  w.var(req.remote_pubkey);
  return std::move(w).take();
}

OperationRequest parse_operation_request(ByteSpan bytes) {
  ByteReader r(bytes);
  OperationRequest req;
  req.op = get_op(r);
  req.credential = r.str();
  req.key_id = r.str();
  req.params = get_params(r);
  req.remote_pubkey = r.var();
  r.expect_done();
  return req;
}

Bytes serialize(const OperationResult& res) {
  ByteWriter w;
  put_error(w, res.error, res.message);
  w.var(res.public_key).var(res.shared_point).var(res.psk).u32(res.version).u32(res.attempts);
  w.u16(static_cast<std::uint16_t>(res.agents.size()));
  for (const auto& a : res.agents) w.str(a);
  return std::move(w).take();
}

OperationResult parse_operation_result(ByteSpan bytes) {
  ByteReader r(bytes);
  OperationResult res;
  res.error = get_error(r);
  res.message = r.str();
  res.public_key = r.var();
  res.shared_point = r.var();
  res.psk = r.var();
  res.version = r.u32();
  res.attempts = r.u32();
  std::uint16_t count = r.u16();
  for (std::uint16_t i = 0; i < count; ++i) res.agents.push_back(r.str());
  r.expect_done();
  return res;
}

Bytes serialize(const AgentRequest& req) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(req.action)).raw(req.request_id).u8(static_cast<std::uint8_t>(req.op)).str(req.key_id);
  put_params(w, req.params);
  put_params(w, req.new_params);
  w.u16(static_cast<std::uint16_t>(req.subset.size()));
  for (auto s : req.subset) w.u32(s);
  w.u16(static_cast<std::uint16_t>(req.roster.size()));
  for (const auto& e : req.roster) w.u32(e.sender).str(e.member).str(e.agent);
  w.var(req.peer_point).var(req.expected_public_key).u32(req.version).u32(req.round_timeout_ms);
  return std::move(w).take();
}

AgentRequest parse_agent_request(ByteSpan bytes) {
  ByteReader r(bytes);
  AgentRequest req;
  std::uint8_t action = r.u8();
  if (action < 1 || action > 5) throw Error(ErrorCode::kInvalidEncoding, "unknown agent action");
  req.action = static_cast<AgentAction>(action);
  req.request_id = r.fixed<16>();
  req.op = get_op(r);
  req.key_id = r.str();
  req.params = get_params(r);
  req.new_params = get_params(r);
  std::uint16_t count = r.u16();
  for (std::uint16_t i = 0; i < count; ++i) req.subset.push_back(r.u32());
  count = r.u16();
  for (std::uint16_t i = 0; i < count; ++i) {
    RosterEntry e;
    e.sender = r.u32();
    e.member = r.str();
    e.agent = r.str();
    req.roster.push_back(std::move(e));
  }
  req.peer_point = r.var();
  req.expected_public_key = r.var();
  req.version = r.u32();
  req.round_timeout_ms = r.u32();
  r.expect_done();
  return req;
}

Bytes serialize(const AgentResult& res) {
  ByteWriter w;
  put_error(w, res.error, res.message);
  w.var(res.public_key).var(res.shared_point).var(res.psk);
  return std::move(w).take();
}

AgentResult parse_agent_result(ByteSpan bytes) {
  ByteReader r(bytes);
  AgentResult res;
  res.error = get_error(r);
  res.message = r.str();
  res.public_key = r.var();
  res.shared_point = r.var();
  res.psk = r.var();
  r.expect_done();
  return res;
}

namespace {

ByteSpan token_bytes(std::string_view token) {
  return ByteSpan(reinterpret_cast<const std::uint8_t*>(token.data()), token.size());
}

}  // namespace

Bytes sign_agent_request(const AgentRequest& req, std::string_view token) {
  Bytes body = serialize(req);
  Digest tag = hmac_sha256(token_bytes(token), body);
  body.insert(body.end(), tag.begin(), tag.end());
  return body;
}

AgentRequest verify_agent_request(ByteSpan signed_bytes, std::string_view token) {
  if (signed_bytes.size() < 32) throw Error(ErrorCode::kAuthFailure, "unsigned agent request");
  ByteSpan body = signed_bytes.first(signed_bytes.size() - 32);
  Digest expected = hmac_sha256(token_bytes(token), body);
  if (!constant_time_equal(expected, signed_bytes.last(32))) {
    throw Error(ErrorCode::kAuthFailure, "agent request signature does not verify");
  }
  return parse_agent_request(body);
}

}  // namespace tdh::orch
