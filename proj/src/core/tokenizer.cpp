#include "core/tokenizer.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace fel::text {

const std::array<std::string, SpecialTokens::kCount>& SpecialTokens::strings() {
  static const std::array<std::string, kCount> kStrings = {
      "<pad>",        "<unk>",        "<bos>",        "<eos>",
      "<s1>",         "<e1>",         "<extra_id_0>", "<extra_id_1>",
      "<extra_id_2>", "<extra_id_3>", "<extra_id_4>", "<extra_id_5>",
      "[CLS]",        "[ENT]",        "[SEP]"};
  return kStrings;
}

namespace {

bool is_word_char(unsigned char c) {
  return std::isalnum(c) || c == '_' || c >= 0x80;
}

// Returns the length of a special token starting at `pos`, or 0.
std::size_t match_special(const std::string& text, std::size_t pos) {
  char c = text[pos];
  if (c != '<' && c != '[') return 0;
  for (const auto& s : SpecialTokens::strings()) {
    if (text.compare(pos, s.size(), s) == 0) return s.size();
  }
  return 0;
}

}  // namespace

std::vector<TokenSpan> tokenize_with_offsets(const std::string& text) {
  std::vector<TokenSpan> out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    if (std::size_t len = match_special(text, i); len > 0) {
      out.push_back({text.substr(i, len), i, i + len});
      i += len;
      continue;
    }
    if (is_word_char(c)) {
      std::size_t j = i + 1;
      while (j < n && is_word_char(static_cast<unsigned char>(text[j]))) ++j;
      out.push_back({text.substr(i, j - i), i, j});
      i = j;
    } else {
      out.push_back({text.substr(i, 1), i, i + 1});
      ++i;
    }
  }
  return out;
}

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> out;
  for (auto& ts : tokenize_with_offsets(text)) out.push_back(std::move(ts.token));
  return out;
}

void Tokenizer::append(const std::string& token) {
  ids_.emplace(token, static_cast<int>(tokens_.size()));
  tokens_.push_back(token);
}

Tokenizer Tokenizer::build(std::istream& corpus, std::size_t min_count) {
  std::vector<std::string> texts;
  std::string line;
  while (std::getline(corpus, line)) texts.push_back(line);
  return build_from_texts(texts, min_count);
}

Tokenizer Tokenizer::build_from_texts(const std::vector<std::string>& texts,
                                      std::size_t min_count) {
  bool any = false;
  std::map<std::string, std::size_t> freq;  // ordered: deterministic ties
  for (const auto& t : texts) {
    for (const auto& tok : tokenize(t)) {
      any = true;
      ++freq[tok];
    }
  }
  if (!any) throw Error(ErrorCode::EmptyCorpus, "no tokens in corpus");

  Tokenizer tk;
  for (const auto& s : SpecialTokens::strings()) tk.append(s);

  // Frequency descending, then lexicographic.
  std::vector<std::pair<std::string, std::size_t>> items(freq.begin(),
                                                         freq.end());
  std::stable_sort(items.begin(), items.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  for (const auto& [tok, count] : items) {
    if (count < min_count) continue;
    if (!tk.contains(tok)) tk.append(tok);
  }
  return tk;
}

Tokenizer Tokenizer::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  Tokenizer tk;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    tk.append(line);
  }
  const auto& specials = SpecialTokens::strings();
  for (int i = 0; i < SpecialTokens::kCount; ++i) {
    if (static_cast<std::size_t>(i) >= tk.tokens_.size() ||
        tk.tokens_[i] != specials[i]) {
      throw Error(ErrorCode::ConfigError,
                  "vocabulary file missing special token " + specials[i]);
    }
  }
  return tk;
}

void Tokenizer::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  for (const auto& t : tokens_) out << t << "\n";
}

int Tokenizer::id_of(const std::string& token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? SpecialTokens::kUnk : it->second;
}

const std::string& Tokenizer::token_of(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw Error(ErrorCode::OutOfRange, "token id " + std::to_string(id));
  }
  return tokens_[static_cast<std::size_t>(id)];
}

bool Tokenizer::contains(const std::string& token) const {
  return ids_.count(token) > 0;
}

std::vector<int> Tokenizer::encode(const std::string& text) const {
  return encode_tokens(tokenize(text));
}

std::vector<int> Tokenizer::encode_tokens(
    const std::vector<std::string>& tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(id_of(t));
  return ids;
}

std::string Tokenizer::decode(const std::vector<int>& ids) const {
  std::string out;
  for (int id : ids) {
    if (!out.empty()) out.push_back(' ');
    out += token_of(id);
  }
  return out;
}

std::string detokenize(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

}  // namespace fel::text
