#include "core/text_builders.hpp"

#include <algorithm>

namespace fel::text {

namespace {

void append_tokens(std::vector<std::string>& out,
                   const std::vector<TokenSpan>& spans, std::size_t first,
                   std::size_t last) {
  for (std::size_t i = first; i < last; ++i) out.push_back(spans[i].token);
}

}  // namespace

std::vector<std::string> mark_mention(const std::string& doc, Span span,
                                      std::size_t budget) {
  if (span.start >= span.end || span.end > doc.size()) {
    throw Error(ErrorCode::SpanOutOfBounds,
                "span [" + std::to_string(span.start) + "," +
                    std::to_string(span.end) + ") in doc of size " +
                    std::to_string(doc.size()));
  }
  auto spans = tokenize_with_offsets(doc);
  std::size_t first = spans.size();
  std::size_t last = 0;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    const auto& ts = spans[i];
    if (ts.end <= span.start || ts.start >= span.end) continue;
    if (ts.start < span.start || ts.end > span.end) {
      throw Error(ErrorCode::SpanSplitsToken, "token '" + ts.token + "'");
    }
    first = std::min(first, i);
    last = std::max(last, i + 1);
  }
  if (first >= last) {
    throw Error(ErrorCode::SpanOutOfBounds, "span covers no tokens");
  }

  std::size_t left = first;
  std::size_t right = spans.size() - last;
  std::size_t mention = last - first;
  std::size_t total = left + right + mention + 2;
  if (total > budget && budget >= mention + 2) {
    std::size_t excess = total - budget;
    std::size_t cut_left = std::min(left, excess / 2);
    std::size_t cut_right = std::min(right, excess - cut_left);
    // Rebalance when one side ran out.
    cut_left = std::min(left, excess - cut_right);
    left -= cut_left;
    right -= cut_right;
  }

  std::vector<std::string> out;
  out.reserve(left + mention + right + 2);
  append_tokens(out, spans, first - left, first);
  out.push_back("<s1>");
  append_tokens(out, spans, first, last);
  out.push_back("<e1>");
  append_tokens(out, spans, last, last + right);
  return out;
}

std::vector<Passage> chunk_passages(const kb::AnnotatedDocument& doc,
                                    std::size_t window, std::size_t stride) {
  if (stride == 0 || window == 0 || stride > window) {
    throw Error(ErrorCode::InvalidWindow,
                "window=" + std::to_string(window) +
                    " stride=" + std::to_string(stride));
  }
  auto spans = tokenize_with_offsets(doc.text);
  std::string topic = detokenize(truncate_doc(doc.text));

  std::vector<Passage> out;
  for (std::size_t start = 0; start < spans.size(); start += stride) {
    std::size_t end = std::min(start + window, spans.size());
    Passage p;
    p.doc_id = doc.doc_id;
    p.token_start = start;
    p.token_count = end - start;
    p.char_offset = spans[start].start;
    p.text = doc.text.substr(spans[start].start,
                             spans[end - 1].end - spans[start].start);
    p.topic = topic;
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<std::string> truncate_doc(const std::string& text,
                                      std::size_t budget) {
  auto tokens = tokenize(text);
  if (tokens.size() > budget) tokens.resize(budget);
  return tokens;
}

namespace {

// title <extra_id_3> description, capped at `budget` tokens by trimming the
// description tail; the title and marker always survive.
std::vector<std::string> entity_part(const kb::Entity& e, std::size_t budget) {
  std::vector<std::string> part = tokenize(e.title);
  part.push_back("<extra_id_3>");
  auto desc = tokenize(e.description);
  std::size_t room = budget > part.size() ? budget - part.size() : 0;
  if (desc.size() > room) desc.resize(room);
  part.insert(part.end(), desc.begin(), desc.end());
  return part;
}

}  // namespace

std::vector<std::string> build_ed_input(const std::vector<std::string>& context,
                                        const kb::Entity& e,
                                        std::size_t desc_budget) {
  std::vector<std::string> out = context;
  out.push_back("<extra_id_2>");
  auto part = entity_part(e, desc_budget);
  out.insert(out.end(), part.begin(), part.end());
  return out;
}

std::vector<std::string> build_el_input(
    const std::vector<std::string>& doc_trunc, const Passage& p,
    const kb::Entity& e, std::size_t desc_budget) {
  if (doc_trunc.size() > kDocTruncBudget) {
    throw Error(ErrorCode::DocBudgetExceeded,
                std::to_string(doc_trunc.size()) + " tokens");
  }
  std::vector<std::string> out;
  out.push_back("<extra_id_0>");
  out.insert(out.end(), doc_trunc.begin(), doc_trunc.end());
  out.push_back("<extra_id_1>");
  auto p_tokens = tokenize(p.text);
  out.insert(out.end(), p_tokens.begin(), p_tokens.end());
  out.push_back("<extra_id_2>");
  auto part = entity_part(e, desc_budget);
  out.insert(out.end(), part.begin(), part.end());
  return out;
}

std::vector<std::string> build_retrieval_entity_text(const kb::Entity& e,
                                                     std::size_t desc_budget) {
  std::vector<std::string> out;
  out.push_back("[CLS]");
  auto title = tokenize(e.title);
  out.insert(out.end(), title.begin(), title.end());
  out.push_back("[ENT]");
  auto desc = tokenize(e.description);
  if (desc.size() > desc_budget) desc.resize(desc_budget);
  out.insert(out.end(), desc.begin(), desc.end());
  out.push_back("[SEP]");
  return out;
}

std::vector<std::string> build_retrieval_passage_text(const Passage& p) {
  std::vector<std::string> out;
  out.push_back("[CLS]");
  auto p_tokens = tokenize(p.text);
  out.insert(out.end(), p_tokens.begin(), p_tokens.end());
  out.push_back("[SEP]");
  auto t_tokens = tokenize(p.topic);
  out.insert(out.end(), t_tokens.begin(), t_tokens.end());
  out.push_back("[SEP]");
  return out;
}

}  // namespace fel::text
