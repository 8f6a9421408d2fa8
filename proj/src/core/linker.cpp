#include "core/linker.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <thread>

#include "json.hpp"

namespace fel::linker {

using nlohmann::json;

std::optional<std::string> disambiguate(
    const kb::AnnotatedDocument& doc, Span span, const kb::EntityStore& store,
    const kb::CandidateMap& candidate_map, model::FusionReader& reader,
    const text::Tokenizer& tokenizer, grammar::TargetMode mode,
    std::size_t max_candidates) {
  auto context = text::mark_mention(doc.text, span);
  std::string surface = doc.text.substr(span.start, span.length());
  std::size_t limit = std::min(
      max_candidates, static_cast<std::size_t>(reader.config().n_cand));
  auto candidate_ids = candidate_map.candidates_for(surface, limit);
  if (candidate_ids.empty()) {
    throw Error(ErrorCode::NoCandidates, "surface '" + surface + "'");
  }
  std::vector<kb::Entity> candidates;
  std::vector<std::vector<int>> inputs;
  for (const auto& id : candidate_ids) {
    const kb::Entity* e = store.by_id(id);
    if (!e) continue;
    candidates.push_back(*e);
    inputs.push_back(
        tokenizer.encode_tokens(text::build_ed_input(context, *e)));
  }
  auto decoded = reader.greedy_decode(inputs, 16);
  return grammar::resolve_entity(tokenizer.decode(decoded), candidates, mode);
}

std::vector<Span> ground_mentions(const text::Passage& p,
                                  const std::string& mention) {
  auto spans = text::tokenize_with_offsets(p.text);
  auto needle = text::tokenize(normalize_whitespace(mention));
  std::vector<Span> out;
  if (needle.empty() || needle.size() > spans.size()) return out;
  std::size_t i = 0;
  while (i + needle.size() <= spans.size()) {
    bool match = true;
    for (std::size_t j = 0; j < needle.size(); ++j) {
      if (spans[i + j].token != needle[j]) {
        match = false;
        break;
      }
    }
    if (match) {
      out.push_back({spans[i].start, spans[i + needle.size() - 1].end});
      i += needle.size();  // left-to-right, non-overlapping
    } else {
      ++i;
    }
  }
  return out;
}

std::vector<LinkedAnnotation> resolve_overlaps(
    std::vector<LinkedAnnotation> annotations) {
  // Exact duplicates (same span and entity) collapse first.
  std::sort(annotations.begin(), annotations.end(),
            [](const LinkedAnnotation& a, const LinkedAnnotation& b) {
              return std::tie(a.start, a.end, a.entity_id) <
                     std::tie(b.start, b.end, b.entity_id);
            });
  annotations.erase(
      std::unique(annotations.begin(), annotations.end(),
                  [](const LinkedAnnotation& a, const LinkedAnnotation& b) {
                    return a.same_link(b);
                  }),
      annotations.end());

  // Longest first; ties earlier start, then lower entity id.
  std::vector<LinkedAnnotation> order = annotations;
  std::sort(order.begin(), order.end(),
            [](const LinkedAnnotation& a, const LinkedAnnotation& b) {
              std::size_t la = a.end - a.start;
              std::size_t lb = b.end - b.start;
              if (la != lb) return la > lb;
              if (a.start != b.start) return a.start < b.start;
              return a.entity_id < b.entity_id;
            });
  std::vector<LinkedAnnotation> kept;
  for (const auto& ann : order) {
    bool blocked = false;
    for (const auto& k : kept) {
      bool same_span = k.start == ann.start && k.end == ann.end;
      bool overlap = ann.start < k.end && k.start < ann.end;
      if (overlap && !same_span) {
        blocked = true;
        break;
      }
    }
    if (!blocked) kept.push_back(ann);
  }
  std::sort(kept.begin(), kept.end(),
            [](const LinkedAnnotation& a, const LinkedAnnotation& b) {
              return std::tie(a.start, a.end, a.entity_id) <
                     std::tie(b.start, b.end, b.entity_id);
            });
  return kept;
}

namespace {

struct WindowOutput {
  std::vector<LinkedAnnotation> annotations;
  std::vector<std::string> dropped;
};

WindowOutput link_window(const text::Passage& passage,
                         const std::vector<std::string>& doc_trunc,
                         const kb::EntityStore& store,
                         retriever::RetrieverModel& retriever_model,
                         const retriever::VectorIndex& index,
                         model::FusionReader& reader,
                         const text::Tokenizer& tokenizer,
                         const LinkOptions& opts) {
  WindowOutput out;
  std::size_t k = std::min(
      opts.top_k, static_cast<std::size_t>(reader.config().n_cand));
  auto ranked = index.top_k(retriever_model.encode_passage(passage), k);
  std::vector<kb::Entity> candidates;
  std::vector<std::vector<int>> inputs;
  for (const auto& se : ranked) {
    const kb::Entity* e = store.by_id(se.id);
    if (!e) continue;
    candidates.push_back(*e);
    inputs.push_back(tokenizer.encode_tokens(
        text::build_el_input(doc_trunc, passage, *e)));
  }
  if (inputs.empty()) return out;

  std::string decoded =
      tokenizer.decode(reader.greedy_decode(inputs, opts.max_decode_len));
  grammar::ElPrediction pred =
      grammar::parse_el(decoded, grammar::ParseMode::Lenient);
  for (const auto& entry : pred.entries) {
    auto id =
        grammar::resolve_entity(entry.title, candidates, grammar::TargetMode::Title);
    if (!id) {
      out.dropped.push_back("unresolvable title '" + entry.title + "'");
      continue;
    }
    for (const auto& mention : entry.mentions) {
      auto spans = ground_mentions(passage, mention);
      if (spans.empty()) {
        out.dropped.push_back("ungroundable mention '" + mention + "'");
        continue;
      }
      for (const auto& local : spans) {
        LinkedAnnotation ann;
        ann.start = passage.char_offset + local.start;
        ann.end = passage.char_offset + local.end;
        ann.entity_id = *id;
        ann.provenance = {passage.token_start, decoded};
        out.annotations.push_back(std::move(ann));
      }
    }
  }
  return out;
}

}  // namespace

LinkResult link_document(const kb::AnnotatedDocument& doc,
                         const kb::EntityStore& store,
                         retriever::RetrieverModel& retriever_model,
                         const retriever::VectorIndex& index,
                         model::FusionReader& reader,
                         const text::Tokenizer& tokenizer,
                         const LinkOptions& opts) {
  auto passages = text::chunk_passages(doc, opts.window, opts.stride);
  auto doc_trunc = text::truncate_doc(doc.text);

  std::vector<WindowOutput> outputs(passages.size());
  std::size_t threads = std::max<std::size_t>(1, opts.threads);
  if (threads == 1 || passages.size() <= 1) {
    for (std::size_t i = 0; i < passages.size(); ++i) {
      outputs[i] = link_window(passages[i], doc_trunc, store, retriever_model,
                               index, reader, tokenizer, opts);
    }
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (std::size_t t = 0; t < std::min(threads, passages.size()); ++t) {
      pool.emplace_back([&]() {
        while (true) {
          std::size_t i = next.fetch_add(1);
          if (i >= passages.size()) return;
          outputs[i] = link_window(passages[i], doc_trunc, store,
                                   retriever_model, index, reader, tokenizer,
                                   opts);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  LinkResult result;
  result.doc_id = doc.doc_id;
  std::vector<LinkedAnnotation> all;
  for (auto& w : outputs) {
    all.insert(all.end(), w.annotations.begin(), w.annotations.end());
    result.dropped.insert(result.dropped.end(), w.dropped.begin(),
                          w.dropped.end());
  }
  result.annotations = resolve_overlaps(std::move(all));
  return result;
}

void write_link_results(const std::string& path,
                        const std::vector<LinkResult>& results) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  for (const auto& r : results) {
    json anns = json::array();
    for (const auto& a : r.annotations) {
      anns.push_back(
          {{"start", a.start}, {"end", a.end}, {"entity_id", a.entity_id}});
    }
    json line = {{"doc_id", r.doc_id}, {"annotations", anns}};
    out << line.dump() << "\n";
  }
}

std::vector<LinkResult> load_link_results(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::vector<LinkResult> results;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    LinkResult r;
    r.doc_id = j.at("doc_id").get<std::string>();
    for (const auto& a : j.at("annotations")) {
      LinkedAnnotation ann;
      ann.start = a.at("start").get<std::size_t>();
      ann.end = a.at("end").get<std::size_t>();
      ann.entity_id = a.at("entity_id").get<std::string>();
      r.annotations.push_back(std::move(ann));
    }
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace fel::linker
