#include "tdh/error.hpp"

#include <array>
#include <utility>

namespace tdh {

namespace {
constexpr std::array<std::pair<ErrorCode, std::string_view>, 27> kNames{{
    {ErrorCode::kInvalidArgument, "InvalidArgument"},
    {ErrorCode::kCurveMismatch, "CurveMismatch"},
    {ErrorCode::kInvalidEncoding, "InvalidEncoding"},
    {ErrorCode::kNotOnCurve, "NotOnCurve"},
    {ErrorCode::kLowOrderPoint, "LowOrderPoint"},
    {ErrorCode::kExceptionalPoint, "ExceptionalPoint"},
    {ErrorCode::kRngFailure, "RngFailure"},
    {ErrorCode::kCommitmentMismatch, "CommitmentMismatch"},
    {ErrorCode::kFeldmanReject, "FeldmanReject"},
    {ErrorCode::kDuplicateMessage, "DuplicateMessage"},
    {ErrorCode::kUnknownSender, "UnknownSender"},
    {ErrorCode::kUnexpectedMessage, "UnexpectedMessage"},
    {ErrorCode::kPreconditionViolation, "PreconditionViolation"},
    {ErrorCode::kProtocolFailure, "ProtocolFailure"},
    {ErrorCode::kSessionAborted, "SessionAborted"},
    {ErrorCode::kMissingConfirmation, "MissingConfirmation"},
    {ErrorCode::kDigestMismatch, "DigestMismatch"},
    {ErrorCode::kAuthFailure, "AuthFailure"},
    {ErrorCode::kUnknownRecipient, "UnknownRecipient"},
    {ErrorCode::kUnknownRoom, "UnknownRoom"},
    {ErrorCode::kRoomClosed, "RoomClosed"},
    {ErrorCode::kInsufficientAgents, "InsufficientAgents"},
    {ErrorCode::kAgentsDisagree, "AgentsDisagree"},
    {ErrorCode::kUnknownKey, "UnknownKey"},
    {ErrorCode::kStorageFailure, "StorageFailure"},
    {ErrorCode::kTransportFailure, "TransportFailure"},
    {ErrorCode::kAgentUnavailable, "AgentUnavailable"},
}};
}  // namespace

std::string_view error_code_name(ErrorCode code) {
  for (const auto& [c, name] : kNames) {
    if (c == code) return name;
  }
  return "Unknown";
}

ErrorCode error_code_from_name(std::string_view name) {
  for (const auto& [c, n] : kNames) {
    if (n == name) return c;
  }
  return ErrorCode::kProtocolFailure;
}

}  // namespace tdh
