#include "core/common.hpp"

#include <cctype>
#include <sstream>

namespace fel {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicateTitle: return "DuplicateTitle";
    case ErrorCode::EmptyTitle: return "EmptyTitle";
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::SpanOutOfBounds: return "SpanOutOfBounds";
    case ErrorCode::SpanSplitsToken: return "SpanSplitsToken";
    case ErrorCode::InvalidWindow: return "InvalidWindow";
    case ErrorCode::DocBudgetExceeded: return "DocBudgetExceeded";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyStore: return "EmptyStore";
    case ErrorCode::EmptyPositives: return "EmptyPositives";
    case ErrorCode::InsufficientEntities: return "InsufficientEntities";
    case ErrorCode::UnknownTokenOverflow: return "UnknownTokenOverflow";
    case ErrorCode::TooManyCandidates: return "TooManyCandidates";
    case ErrorCode::SequenceTooLong: return "SequenceTooLong";
    case ErrorCode::TargetTooLong: return "TargetTooLong";
    case ErrorCode::DeadEnd: return "DeadEnd";
    case ErrorCode::NonFiniteGradient: return "NonFiniteGradient";
    case ErrorCode::DivergenceDetected: return "DivergenceDetected";
    case ErrorCode::MalformedSegment: return "MalformedSegment";
    case ErrorCode::EmptyMentionList: return "EmptyMentionList";
    case ErrorCode::DuplicateEntity: return "DuplicateEntity";
    case ErrorCode::NoCandidates: return "NoCandidates";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::DocMismatch: return "DocMismatch";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "UnknownError";
}

std::string normalize_whitespace(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  bool in_space = true;  // leading whitespace dropped
  for (unsigned char c : s) {
    if (std::isspace(c)) {
      in_space = true;
    } else {
      if (in_space && !out.empty()) out.push_back(' ');
      in_space = false;
      out.push_back(static_cast<char>(c));
    }
  }
  return out;
}

std::vector<std::string> split_whitespace(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream iss(s);
  std::string tok;
  while (iss >> tok) out.push_back(tok);
  return out;
}

}  // namespace fel
