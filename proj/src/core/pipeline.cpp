#include "core/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <unordered_set>

#include "core/tensor_io.hpp"
#include "json.hpp"

namespace fel::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

text::Tokenizer build_project_vocab(
    const kb::EntityStore& store,
    const std::vector<kb::AnnotatedDocument>& corpus, std::size_t min_count) {
  std::vector<std::string> texts;
  for (const auto& doc : corpus) texts.push_back(doc.text);
  for (const auto& e : store.entities()) {
    texts.push_back(e.title);
    texts.push_back(e.description);
  }
  // Decimal tokens for index-mode targets.
  std::string digits;
  for (int i = 0; i < 256; ++i) digits += std::to_string(i) + " ";
  texts.push_back(digits);
  return text::Tokenizer::build_from_texts(texts, min_count);
}

namespace {

model::ReaderConfig reader_config_from(const cfg::RunConfig& config,
                                       int vocab_size) {
  model::ReaderConfig rc;
  rc.tf.d_model = static_cast<int>(config.get_int("d_model", 64));
  rc.tf.heads = static_cast<int>(config.get_int("heads", 2));
  rc.tf.ffn = static_cast<int>(config.get_int("ffn", 128));
  rc.tf.enc_layers = static_cast<int>(config.get_int("enc_layers", 2));
  rc.tf.dec_layers = static_cast<int>(config.get_int("dec_layers", 2));
  rc.tf.vocab_size = vocab_size;
  rc.n_cand = static_cast<int>(config.get_int("n_cand", 16));
  rc.max_seq_len = static_cast<int>(config.get_int("max_seq_len", 512));
  rc.max_target_len = static_cast<int>(config.get_int("max_target_len", 64));
  return rc;
}

model::TrainConfig train_config_from(const cfg::RunConfig& config) {
  model::TrainConfig tc;
  tc.lr = config.get_double("lr", 1e-4);
  tc.warmup = config.get_double("warmup", 0.01);
  tc.steps = static_cast<std::size_t>(config.get_int("steps", 1000));
  tc.batch = static_cast<std::size_t>(config.get_int("batch", 8));
  tc.eval_every = static_cast<std::size_t>(config.get_int("eval_every", 1000));
  tc.seed = static_cast<std::uint64_t>(config.get_int("seed", 0));
  return tc;
}

grammar::TargetMode parse_target_mode(const std::string& s) {
  if (s == "title") return grammar::TargetMode::Title;
  if (s == "index") return grammar::TargetMode::Index;
  throw Error(ErrorCode::ConfigError, "target_mode must be title|index");
}

const char* target_mode_name(grammar::TargetMode m) {
  return m == grammar::TargetMode::Title ? "title" : "index";
}

json load_checkpoint_config(const std::string& dir, const std::string& type) {
  std::ifstream in(fs::path(dir) / "config.json");
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot open checkpoint config in " + dir);
  }
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || j.value("type", "") != type) {
    throw Error(ErrorCode::ConfigError,
                "not a " + type + " checkpoint: " + dir);
  }
  return j;
}

}  // namespace

void save_reader(const std::string& dir, const model::FusionReader& reader,
                 const text::Tokenizer& tokenizer, grammar::TargetMode mode) {
  fs::create_directories(dir);
  const auto& rc = reader.config();
  json j = {{"type", "reader"},
            {"d_model", rc.tf.d_model},
            {"heads", rc.tf.heads},
            {"ffn", rc.tf.ffn},
            {"enc_layers", rc.tf.enc_layers},
            {"dec_layers", rc.tf.dec_layers},
            {"vocab_size", rc.tf.vocab_size},
            {"n_cand", rc.n_cand},
            {"max_seq_len", rc.max_seq_len},
            {"max_target_len", rc.max_target_len},
            {"target_mode", target_mode_name(mode)}};
  std::ofstream out(fs::path(dir) / "config.json");
  out << j.dump(2) << "\n";
  tokenizer.save((fs::path(dir) / "vocab.txt").string());
  reader.save(dir);
}

ReaderBundle load_reader(const std::string& dir) {
  json j = load_checkpoint_config(dir, "reader");
  model::ReaderConfig rc;
  rc.tf.d_model = j.at("d_model").get<int>();
  rc.tf.heads = j.at("heads").get<int>();
  rc.tf.ffn = j.at("ffn").get<int>();
  rc.tf.enc_layers = j.at("enc_layers").get<int>();
  rc.tf.dec_layers = j.at("dec_layers").get<int>();
  rc.tf.vocab_size = j.at("vocab_size").get<int>();
  rc.n_cand = j.at("n_cand").get<int>();
  rc.max_seq_len = j.at("max_seq_len").get<int>();
  rc.max_target_len = j.at("max_target_len").get<int>();
  ReaderBundle bundle{model::FusionReader(rc, 0),
                      text::Tokenizer::load((fs::path(dir) / "vocab.txt").string()),
                      parse_target_mode(j.value("target_mode", "title"))};
  bundle.reader.load(dir);
  return bundle;
}

void save_retriever(const std::string& dir,
                    const retriever::RetrieverModel& model) {
  fs::create_directories(dir);
  const auto& rc = model.config();
  json j = {{"type", "retriever"},
            {"d_model", rc.tf.d_model},
            {"heads", rc.tf.heads},
            {"ffn", rc.tf.ffn},
            {"enc_layers", rc.tf.enc_layers},
            {"vocab_size", rc.tf.vocab_size},
            {"negatives", rc.negatives},
            {"hard_fraction", rc.hard_fraction}};
  std::ofstream out(fs::path(dir) / "config.json");
  out << j.dump(2) << "\n";
  model.tokenizer().save((fs::path(dir) / "vocab.txt").string());
  model.save(dir);
}

retriever::RetrieverModel load_retriever(const std::string& dir) {
  json j = load_checkpoint_config(dir, "retriever");
  retriever::RetrieverConfig rc;
  rc.tf.d_model = j.at("d_model").get<int>();
  rc.tf.heads = j.at("heads").get<int>();
  rc.tf.ffn = j.at("ffn").get<int>();
  rc.tf.enc_layers = j.at("enc_layers").get<int>();
  rc.tf.dec_layers = 1;  // unused by the encoders
  rc.tf.vocab_size = j.at("vocab_size").get<int>();
  rc.negatives = j.at("negatives").get<std::size_t>();
  rc.hard_fraction = j.at("hard_fraction").get<double>();
  auto tokenizer = text::Tokenizer::load((fs::path(dir) / "vocab.txt").string());
  retriever::RetrieverModel model(rc, tokenizer, 0);
  model.load(dir);
  return model;
}

std::vector<model::TrainExample> build_ed_examples(
    const kb::EntityStore& store, const kb::CandidateMap& map,
    const std::vector<kb::AnnotatedDocument>& corpus,
    const text::Tokenizer& tokenizer, const model::ReaderConfig& rc,
    grammar::TargetMode mode) {
  std::vector<model::TrainExample> examples;
  for (const auto& doc : corpus) {
    for (const auto& ann : doc.annotations) {
      std::string surface = doc.surface(ann);
      auto cand_ids = map.candidates_for(
          surface, static_cast<std::size_t>(rc.n_cand));
      auto gold_pos = std::find(cand_ids.begin(), cand_ids.end(), ann.entity_id);
      if (gold_pos == cand_ids.end()) continue;  // not learnable

      auto context = text::mark_mention(doc.text, {ann.start, ann.end});
      model::TrainExample ex;
      for (const auto& id : cand_ids) {
        const kb::Entity* e = store.by_id(id);
        ex.inputs.push_back(
            tokenizer.encode_tokens(text::build_ed_input(context, *e)));
      }
      if (mode == grammar::TargetMode::Title) {
        ex.target = tokenizer.encode(store.by_id(ann.entity_id)->title);
      } else {
        ex.target = tokenizer.encode(
            std::to_string(gold_pos - cand_ids.begin()));
      }
      examples.push_back(std::move(ex));
    }
  }
  return examples;
}

namespace {

// Gold annotations fully inside the passage window.
std::vector<kb::Annotation> annotations_in(const kb::AnnotatedDocument& doc,
                                           const text::Passage& p) {
  std::vector<kb::Annotation> out;
  std::size_t lo = p.char_offset;
  std::size_t hi = p.char_offset + p.text.size();
  for (const auto& ann : doc.annotations) {
    if (ann.start >= lo && ann.end <= hi) out.push_back(ann);
  }
  return out;
}

grammar::ElPrediction gold_prediction(const kb::AnnotatedDocument& doc,
                                      const kb::EntityStore& store,
                                      const std::vector<kb::Annotation>& anns) {
  grammar::ElPrediction pred;
  for (const auto& ann : anns) {
    const kb::Entity* e = store.by_id(ann.entity_id);
    if (!e) continue;
    std::string mention = normalize_whitespace(doc.surface(ann));
    auto it = std::find_if(pred.entries.begin(), pred.entries.end(),
                           [&](const grammar::EntityMentions& em) {
                             return em.title == e->title;
                           });
    if (it == pred.entries.end()) {
      pred.entries.push_back({e->title, {mention}});
    } else if (std::find(it->mentions.begin(), it->mentions.end(), mention) ==
               it->mentions.end()) {
      it->mentions.push_back(mention);
    }
  }
  return pred;
}

}  // namespace

std::vector<model::TrainExample> build_el_examples(
    const kb::EntityStore& store,
    const std::vector<kb::AnnotatedDocument>& corpus,
    const text::Tokenizer& tokenizer, const model::ReaderConfig& rc,
    retriever::RetrieverModel* retriever_model,
    const retriever::VectorIndex* index, std::size_t k, std::size_t window,
    std::size_t stride, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::size_t n_cand = std::min(k, static_cast<std::size_t>(rc.n_cand));
  std::vector<model::TrainExample> examples;
  for (const auto& doc : corpus) {
    auto doc_trunc = text::truncate_doc(doc.text);
    for (const auto& p : text::chunk_passages(doc, window, stride)) {
      auto anns = annotations_in(doc, p);
      std::vector<std::string> gold_ids;
      std::unordered_set<std::string> gold_set;
      for (const auto& a : anns) {
        if (gold_set.insert(a.entity_id).second) gold_ids.push_back(a.entity_id);
      }

      std::vector<std::string> cand_ids;
      if (retriever_model && index) {
        for (const auto& se :
             index->top_k(retriever_model->encode_passage(p), n_cand)) {
          cand_ids.push_back(se.id);
        }
      }
      // Training-time guarantee: gold is always among the candidates.
      for (const auto& gid : gold_ids) {
        if (std::find(cand_ids.begin(), cand_ids.end(), gid) == cand_ids.end()) {
          cand_ids.push_back(gid);
        }
      }
      while (cand_ids.size() < n_cand && cand_ids.size() < store.size()) {
        std::uniform_int_distribution<std::size_t> pick(0, store.size() - 1);
        const std::string& id = store.entities()[pick(rng)].id;
        if (std::find(cand_ids.begin(), cand_ids.end(), id) == cand_ids.end()) {
          cand_ids.push_back(id);
        }
      }
      while (cand_ids.size() > n_cand) {
        // Trim non-gold from the tail.
        auto it = std::find_if(cand_ids.rbegin(), cand_ids.rend(),
                               [&](const std::string& id) {
                                 return !gold_set.count(id);
                               });
        if (it == cand_ids.rend()) break;
        cand_ids.erase(std::next(it).base());
      }

      model::TrainExample ex;
      for (const auto& id : cand_ids) {
        const kb::Entity* e = store.by_id(id);
        if (!e) continue;
        ex.inputs.push_back(tokenizer.encode_tokens(
            text::build_el_input(doc_trunc, p, *e)));
      }
      if (ex.inputs.empty()) continue;
      ex.target = tokenizer.encode(
          grammar::serialize_el(gold_prediction(doc, store, anns)));
      examples.push_back(std::move(ex));
    }
  }
  return examples;
}

std::vector<retriever::RetrievalExample> build_retrieval_examples(
    const std::vector<kb::AnnotatedDocument>& corpus, std::size_t window,
    std::size_t stride) {
  std::vector<retriever::RetrievalExample> out;
  for (const auto& doc : corpus) {
    for (const auto& p : text::chunk_passages(doc, window, stride)) {
      retriever::RetrievalExample ex;
      ex.passage = p;
      std::unordered_set<std::string> seen;
      for (const auto& a : annotations_in(doc, p)) {
        if (seen.insert(a.entity_id).second) ex.gold_ids.push_back(a.entity_id);
      }
      out.push_back(std::move(ex));
    }
  }
  return out;
}

void write_loss_csv(const std::string& path,
                    const std::vector<model::LossPoint>& curve) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << "step,loss,lr\n";
  for (const auto& p : curve) {
    out << p.step << "," << p.loss << "," << p.lr << "\n";
  }
}

// --- pipelines --------------------------------------------------------------

void run_ingest(const cfg::RunConfig& config) {
  auto store = kb::load_entities_file(config.require("kb"));
  std::cout << "entities: " << store.size() << "\n";
  if (auto path = config.get("candidates")) {
    auto map = kb::load_candidates_file(*path, store);
    std::cout << "candidate lists: " << map.size() << "\n";
  }
  std::vector<kb::AnnotatedDocument> corpus;
  if (auto path = config.get("corpus")) {
    corpus = kb::load_corpus_file(*path);
    std::size_t anns = 0;
    for (const auto& d : corpus) anns += d.annotations.size();
    std::cout << "documents: " << corpus.size() << " annotations: " << anns
              << "\n";
  }
  if (auto out = config.get("vocab_out")) {
    auto tokenizer = build_project_vocab(
        store, corpus,
        static_cast<std::size_t>(config.get_int("min_count", 1)));
    tokenizer.save(*out);
    std::cout << "vocabulary: " << tokenizer.vocab_size() << " tokens -> "
              << *out << "\n";
  }
}

void run_build_index(const cfg::RunConfig& config) {
  auto model = load_retriever(config.require("retriever_checkpoint"));
  auto store = kb::load_entities_file(config.require("kb"));
  auto index = retriever::VectorIndex::build(model, store);
  std::string out = config.require("out");
  io::write_embeddings(out, index.embeddings(), index.ids());
  std::cout << "wrote " << index.size() << " embeddings of dim "
            << index.embeddings().cols() << " to " << out << "\n";
}

void run_train_retriever(const cfg::RunConfig& config) {
  auto store = kb::load_entities_file(config.require("kb"));
  auto corpus = kb::load_corpus_file(config.require("corpus"));
  text::Tokenizer tokenizer =
      config.has("vocab")
          ? text::Tokenizer::load(config.require("vocab"))
          : build_project_vocab(store, corpus,
                                static_cast<std::size_t>(
                                    config.get_int("min_count", 1)));

  retriever::RetrieverConfig rc;
  rc.tf.d_model = static_cast<int>(config.get_int("d_model", 64));
  rc.tf.heads = static_cast<int>(config.get_int("heads", 2));
  rc.tf.ffn = static_cast<int>(config.get_int("ffn", 128));
  rc.tf.enc_layers = static_cast<int>(config.get_int("enc_layers", 2));
  rc.tf.dec_layers = 1;
  rc.tf.vocab_size = static_cast<int>(tokenizer.vocab_size());
  rc.negatives = static_cast<std::size_t>(config.get_int("negatives", 32));
  rc.hard_fraction = config.get_double("hard_fraction", 0.1);

  retriever::RetrieverModel model(
      rc, tokenizer, static_cast<std::uint64_t>(config.get_int("seed", 0)));
  auto examples = build_retrieval_examples(
      corpus, static_cast<std::size_t>(config.get_int("window", 20)),
      static_cast<std::size_t>(config.get_int("stride", 10)));
  auto curve = retriever::train_retriever(model, examples, store,
                                          train_config_from(config));

  std::string out = config.require("out");
  save_retriever(out, model);
  write_loss_csv((fs::path(out) / "loss.csv").string(), curve);
  std::size_t k = static_cast<std::size_t>(config.get_int("k", 100));
  double recall = retriever::recall_at_k(model, examples, store,
                                         std::min(k, store.size()));
  std::cout << "recall@" << k << " on training passages: " << recall << "\n";
}

void run_train_reader(const cfg::RunConfig& config) {
  auto store = kb::load_entities_file(config.require("kb"));
  auto corpus = kb::load_corpus_file(config.require("corpus"));
  text::Tokenizer tokenizer =
      config.has("vocab")
          ? text::Tokenizer::load(config.require("vocab"))
          : build_project_vocab(store, corpus,
                                static_cast<std::size_t>(
                                    config.get_int("min_count", 1)));

  model::ReaderConfig rc =
      reader_config_from(config, static_cast<int>(tokenizer.vocab_size()));
  grammar::TargetMode mode =
      parse_target_mode(config.get_or("target_mode", "title"));
  std::string task = config.get_or("task", "ed");

  std::vector<model::TrainExample> examples;
  if (task == "ed") {
    auto map = kb::load_candidates_file(config.require("candidates"), store);
    examples = build_ed_examples(store, map, corpus, tokenizer, rc, mode);
  } else if (task == "el") {
    std::optional<retriever::RetrieverModel> retr;
    std::optional<retriever::VectorIndex> index;
    if (auto dir = config.get("retriever_checkpoint")) {
      retr = load_retriever(*dir);
      index = retriever::VectorIndex::build(*retr, store);
    }
    examples = build_el_examples(
        store, corpus, tokenizer, rc, retr ? &*retr : nullptr,
        index ? &*index : nullptr,
        static_cast<std::size_t>(config.get_int("k", rc.n_cand)),
        static_cast<std::size_t>(config.get_int("window", 20)),
        static_cast<std::size_t>(config.get_int("stride", 10)),
        static_cast<std::uint64_t>(config.get_int("seed", 0)));
  } else {
    throw Error(ErrorCode::ConfigError, "task must be ed|el");
  }
  if (examples.empty()) {
    throw Error(ErrorCode::EmptyDataset, "no training examples constructed");
  }

  model::FusionReader reader(
      rc, static_cast<std::uint64_t>(config.get_int("seed", 0)));
  auto curve = reader.train(examples, train_config_from(config));

  std::string out = config.require("out");
  save_reader(out, reader, tokenizer, mode);
  write_loss_csv((fs::path(out) / "loss.csv").string(), curve);
  std::cout << "trained " << task << " reader on " << examples.size()
            << " examples for " << curve.size() << " steps; final loss "
            << (curve.empty() ? 0.0 : curve.back().loss) << "\n";
}

void run_disambiguate(const cfg::RunConfig& config) {
  auto store = kb::load_entities_file(config.require("kb"));
  auto map = kb::load_candidates_file(config.require("candidates"), store);
  auto corpus = kb::load_corpus_file(config.require("input"));
  ReaderBundle bundle = load_reader(config.require("checkpoint"));
  grammar::TargetMode mode =
      config.has("target_mode")
          ? parse_target_mode(config.require("target_mode"))
          : bundle.target_mode;

  std::vector<linker::LinkResult> results;
  std::vector<std::pair<std::string, std::string>> pairs;  // (gold, pred)
  for (const auto& doc : corpus) {
    linker::LinkResult r;
    r.doc_id = doc.doc_id;
    for (const auto& ann : doc.annotations) {
      std::string predicted;
      try {
        auto id = linker::disambiguate(doc, {ann.start, ann.end}, store, map,
                                       bundle.reader, bundle.tokenizer, mode);
        if (id) predicted = *id;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NoCandidates) throw;
      }
      pairs.emplace_back(ann.entity_id, predicted);
      linker::LinkedAnnotation out;
      out.start = ann.start;
      out.end = ann.end;
      out.entity_id = predicted;
      r.annotations.push_back(std::move(out));
    }
    results.push_back(std::move(r));
  }
  if (auto out = config.get("out")) linker::write_link_results(*out, results);
  double accuracy = eval::ed_accuracy(pairs);
  std::cout << "ED accuracy: " << accuracy << " over " << pairs.size()
            << " mentions\n";

  if (auto prior_path = config.get("prior_corpus")) {
    auto prior_corpus = kb::load_corpus_file(*prior_path);
    auto priors = kb::compute_prior(prior_corpus);
    std::vector<eval::EdPrediction> preds;
    std::size_t i = 0;
    for (const auto& doc : corpus) {
      for (const auto& ann : doc.annotations) {
        preds.push_back(
            {doc.surface(ann), ann.entity_id, pairs[i++].second});
      }
    }
    auto table = eval::bracket_report(preds, priors);
    std::cout << eval::report_text({}, table);
  }
}

void run_link(const cfg::RunConfig& config) {
  auto store = kb::load_entities_file(config.require("kb"));
  auto corpus = kb::load_corpus_file(config.require("input"));
  ReaderBundle bundle = load_reader(config.require("checkpoint"));
  auto retr = load_retriever(config.require("retriever_checkpoint"));
  auto index = retriever::VectorIndex::build(retr, store);

  linker::LinkOptions opts;
  opts.window = static_cast<std::size_t>(config.get_int("window", 20));
  opts.stride = static_cast<std::size_t>(config.get_int("stride", 10));
  opts.top_k = static_cast<std::size_t>(config.get_int("k", 100));
  opts.threads = static_cast<std::size_t>(config.get_int("threads", 1));
  opts.max_decode_len =
      static_cast<std::size_t>(config.get_int("max_decode_len", 48));

  std::vector<linker::LinkResult> results;
  for (const auto& doc : corpus) {
    results.push_back(linker::link_document(doc, store, retr, index,
                                            bundle.reader, bundle.tokenizer,
                                            opts));
  }
  linker::write_link_results(config.require("out"), results);
  std::size_t total = 0;
  for (const auto& r : results) total += r.annotations.size();
  std::cout << "linked " << corpus.size() << " documents, " << total
            << " annotations\n";
}

void run_evaluate(const cfg::RunConfig& config) {
  auto store = kb::load_entities_file(config.require("kb"));
  auto pred = linker::load_link_results(config.require("pred"));
  auto gold = linker::load_link_results(config.require("gold"));
  auto prf = eval::micro_prf(pred, gold, store);

  std::map<std::string, eval::BracketStats> brackets;
  if (auto prior_path = config.get("prior_corpus")) {
    auto prior_corpus = kb::load_corpus_file(*prior_path);
    auto priors = kb::compute_prior(prior_corpus);
    // Pair pred/gold annotations by exact span for a bracket breakdown.
    std::vector<eval::EdPrediction> preds;
    std::unordered_map<std::string, const linker::LinkResult*> pred_by_doc;
    for (const auto& p : pred) pred_by_doc[p.doc_id] = &p;
    std::unordered_map<std::string, const kb::AnnotatedDocument*> doc_text;
    for (const auto& d : prior_corpus) doc_text[d.doc_id] = &d;
    for (const auto& g : gold) {
      const linker::LinkResult* p = pred_by_doc.count(g.doc_id)
                                        ? pred_by_doc[g.doc_id]
                                        : nullptr;
      const kb::AnnotatedDocument* d =
          doc_text.count(g.doc_id) ? doc_text[g.doc_id] : nullptr;
      for (const auto& ga : g.annotations) {
        std::string predicted;
        if (p) {
          for (const auto& pa : p->annotations) {
            if (pa.start == ga.start && pa.end == ga.end) {
              predicted = pa.entity_id;
              break;
            }
          }
        }
        std::string surface =
            d ? d->text.substr(ga.start, ga.end - ga.start) : "";
        preds.push_back({surface, ga.entity_id, predicted});
      }
    }
    brackets = eval::bracket_report(preds, priors);
  }

  std::cout << eval::report_text(prf, brackets);
  if (auto out = config.get("out")) {
    std::ofstream os(*out);
    if (!os) throw Error(ErrorCode::IoError, "cannot write " + *out);
    os << eval::report_json(config.get_or("dataset", "dataset"), prf, brackets)
       << "\n";
  }
}

double run_gradcheck(const cfg::RunConfig& config) {
  int d_model = static_cast<int>(config.get_int("d_model", 8));
  std::uint64_t seed = static_cast<std::uint64_t>(config.get_int("seed", 0));
  int n_inputs = static_cast<int>(config.get_int("candidates_n", 2));
  double eps = config.get_double("eps", 1e-4);

  std::vector<std::string> words = {"alpha", "beta", "gamma", "delta", "epsilon",
                                    "zeta", "eta", "theta"};
  auto tokenizer = text::Tokenizer::build_from_texts(
      {"alpha beta gamma delta epsilon zeta eta theta"}, 1);

  model::ReaderConfig rc;
  rc.tf.d_model = d_model;
  rc.tf.heads = 2;
  rc.tf.ffn = 2 * d_model;
  rc.tf.enc_layers = 2;
  rc.tf.dec_layers = 2;
  rc.tf.vocab_size = static_cast<int>(tokenizer.vocab_size());
  rc.n_cand = std::max(n_inputs, 2);

  model::FusionReader reader(rc, seed);
  std::mt19937_64 rng(seed + 1);
  std::uniform_int_distribution<int> pick(text::SpecialTokens::kCount,
                                          rc.tf.vocab_size - 1);
  std::vector<std::vector<int>> inputs;
  for (int c = 0; c < n_inputs; ++c) {
    std::vector<int> seq;
    for (int i = 0; i < 6; ++i) seq.push_back(pick(rng));
    inputs.push_back(std::move(seq));
  }
  std::vector<int> target;
  for (int i = 0; i < 3; ++i) target.push_back(pick(rng));

  return reader.grad_check(inputs, target, eps, rng);
}

}  // namespace fel::pipeline
