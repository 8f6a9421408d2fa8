#pragma once

#include <array>
#include <istream>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "core/common.hpp"

namespace fel::text {

// Fixed ids of the reserved tokens; always the first vocabulary entries.
struct SpecialTokens {
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kBos = 2;
  static constexpr int kEos = 3;
  static constexpr int kMentionStart = 4;   // <s1>
  static constexpr int kMentionEnd = 5;     // <e1>
  static constexpr int kExtra0 = 6;         // <extra_id_0> .. <extra_id_5>
  static constexpr int kExtra1 = 7;
  static constexpr int kExtra2 = 8;
  static constexpr int kExtra3 = 9;
  static constexpr int kExtra4 = 10;
  static constexpr int kExtra5 = 11;
  static constexpr int kCls = 12;           // [CLS]
  static constexpr int kEnt = 13;           // [ENT]
  static constexpr int kSep = 14;           // [SEP]
  static constexpr int kCount = 15;

  static const std::array<std::string, kCount>& strings();
};

struct TokenSpan {
  std::string token;
  std::size_t start = 0;  // char offset into the source text
  std::size_t end = 0;    // exclusive
};

// Splits text into word / punctuation tokens; the reserved marker strings are
// atomic and never split.
std::vector<TokenSpan> tokenize_with_offsets(const std::string& text);
std::vector<std::string> tokenize(const std::string& text);

class Tokenizer {
 public:
  Tokenizer() = default;

  // Word-level vocabulary from a text stream, one document per line.
  // Tokens with frequency >= min_count are kept, plus all special tokens.
  static Tokenizer build(std::istream& corpus, std::size_t min_count = 1);
  static Tokenizer build_from_texts(const std::vector<std::string>& texts,
                                    std::size_t min_count = 1);

  static Tokenizer load(const std::string& path);
  void save(const std::string& path) const;

  int id_of(const std::string& token) const;  // kUnk for OOV
  const std::string& token_of(int id) const;
  bool contains(const std::string& token) const;
  std::size_t vocab_size() const { return tokens_.size(); }

  std::vector<int> encode(const std::string& text) const;
  std::vector<int> encode_tokens(const std::vector<std::string>& tokens) const;
  std::string decode(const std::vector<int>& ids) const;  // space-joined

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> ids_;

  void append(const std::string& token);
};

std::string detokenize(const std::vector<std::string>& tokens);

}  // namespace fel::text
