#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qpool {

enum class ErrorKind {
  MalformedWav,
  UnsupportedEncoding,
  ChannelOutOfRange,
  EmptyDataset,
  UnreadablePath,
  SampleRateMismatch,
  InvalidConfig,
  SignalTooShort,
  EmptyInput,
  ShapeMismatch,
  ConfigMismatch,
  IoError,
  FormatError,
  DomainError,
  DegenerateLabels,
  NonFiniteScore,
  InsufficientSamples,
};

/// Stable identifier of an error kind; the CLI prints it as the message prefix.
std::string_view error_name(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace qpool
