#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tdh {

enum class ErrorCode {
  kInvalidArgument,
  kCurveMismatch,
  kInvalidEncoding,
  kNotOnCurve,
  kLowOrderPoint,
  kExceptionalPoint,
  kRngFailure,
  kCommitmentMismatch,
  kFeldmanReject,
  kDuplicateMessage,
  kUnknownSender,
  kUnexpectedMessage,
  kPreconditionViolation,
  kProtocolFailure,
  kSessionAborted,
  kMissingConfirmation,
  kDigestMismatch,
  kAuthFailure,
  kUnknownRecipient,
  kUnknownRoom,
  kRoomClosed,
  kInsufficientAgents,
  kAgentsDisagree,
  kUnknownKey,
  kStorageFailure,
  kTransportFailure,
  kAgentUnavailable,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}
  explicit Error(ErrorCode code) : std::runtime_error(std::string(error_code_name(code))), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Parses a name produced by error_code_name; unknown names map to kProtocolFailure.
ErrorCode error_code_from_name(std::string_view name);

}  // namespace tdh
