#pragma once

#include <stdexcept>
#include <string>

namespace agora {

// Machine-readable error categories. The CLI prints these verbatim so that
// scripts can branch on them without parsing prose.
enum class Errc {
  DuplicateUsername,
  MissingField,
  NonPositiveAge,
  ConfigInvalid,
  InvalidRequest,
  BackendUnreachable,
  MalformedResponse,
  ContextTooLong,
  TooFewComments,
  EmptyHistogram,
  DegenerateVariance,
  RankDeficient,
  InsufficientData,
  StorageFull,
  PermissionDenied,
  CorruptStream,
  NoCompletedDiscussions,
  SerializationError,
  UsageError,
};

const char* to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

}  // namespace agora
