#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fel {

enum class ErrorCode {
  // kb
  DuplicateTitle,
  EmptyTitle,
  MalformedRecord,
  EmptyDataset,
  OutOfRange,
  // text
  EmptyCorpus,
  SpanOutOfBounds,
  SpanSplitsToken,
  InvalidWindow,
  DocBudgetExceeded,
  // retriever
  DimensionMismatch,
  EmptyStore,
  EmptyPositives,
  InsufficientEntities,
  UnknownTokenOverflow,
  // fusion model
  TooManyCandidates,
  SequenceTooLong,
  TargetTooLong,
  DeadEnd,
  NonFiniteGradient,
  DivergenceDetected,
  // grammar
  MalformedSegment,
  EmptyMentionList,
  DuplicateEntity,
  // linker
  NoCandidates,
  // eval
  EmptyInput,
  DocMismatch,
  // plumbing
  IoError,
  ConfigError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Character span, end exclusive.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - start; }
  bool operator==(const Span&) const = default;
  auto operator<=>(const Span&) const = default;
};

// Collapses runs of whitespace to a single space and trims the ends.
std::string normalize_whitespace(const std::string& s);

std::vector<std::string> split_whitespace(const std::string& s);

}  // namespace fel
