#include "qpool/error.hpp"

namespace qpool {

std::string_view error_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::MalformedWav: return "MalformedWav";
    case ErrorKind::UnsupportedEncoding: return "UnsupportedEncoding";
    case ErrorKind::ChannelOutOfRange: return "ChannelOutOfRange";
    case ErrorKind::EmptyDataset: return "EmptyDataset";
    case ErrorKind::UnreadablePath: return "UnreadablePath";
    case ErrorKind::SampleRateMismatch: return "SampleRateMismatch";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::SignalTooShort: return "SignalTooShort";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::ConfigMismatch: return "ConfigMismatch";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::FormatError: return "FormatError";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::DegenerateLabels: return "DegenerateLabels";
    case ErrorKind::NonFiniteScore: return "NonFiniteScore";
    case ErrorKind::InsufficientSamples: return "InsufficientSamples";
  }
  return "Unknown";
}

}  // namespace qpool
