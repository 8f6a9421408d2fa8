#pragma once

#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/eval.hpp"
#include "core/fusion_model.hpp"
#include "core/grammar.hpp"
#include "core/kb.hpp"
#include "core/linker.hpp"
#include "core/retriever.hpp"
#include "core/synth.hpp"

namespace fel::pipeline {

// Vocabulary over document texts, entity titles/descriptions, and the small
// decimal tokens used by index-mode targets.
text::Tokenizer build_project_vocab(
    const kb::EntityStore& store,
    const std::vector<kb::AnnotatedDocument>& corpus, std::size_t min_count = 1);

struct ReaderBundle {
  model::FusionReader reader;
  text::Tokenizer tokenizer;
  grammar::TargetMode target_mode = grammar::TargetMode::Title;
};

void save_reader(const std::string& dir, const model::FusionReader& reader,
                 const text::Tokenizer& tokenizer, grammar::TargetMode mode);
ReaderBundle load_reader(const std::string& dir);

void save_retriever(const std::string& dir,
                    const retriever::RetrieverModel& model);
retriever::RetrieverModel load_retriever(const std::string& dir);

// --- training example construction -----------------------------------------

std::vector<model::TrainExample> build_ed_examples(
    const kb::EntityStore& store, const kb::CandidateMap& map,
    const std::vector<kb::AnnotatedDocument>& corpus,
    const text::Tokenizer& tokenizer, const model::ReaderConfig& rc,
    grammar::TargetMode mode);

// Per-window reader examples; candidates come from the retriever index when
// provided, otherwise gold plus seeded random distractors. Gold entities are
// always present among the training candidates.
std::vector<model::TrainExample> build_el_examples(
    const kb::EntityStore& store,
    const std::vector<kb::AnnotatedDocument>& corpus,
    const text::Tokenizer& tokenizer, const model::ReaderConfig& rc,
    retriever::RetrieverModel* retriever_model,
    const retriever::VectorIndex* index, std::size_t k, std::size_t window,
    std::size_t stride, std::uint64_t seed);

std::vector<retriever::RetrievalExample> build_retrieval_examples(
    const std::vector<kb::AnnotatedDocument>& corpus, std::size_t window,
    std::size_t stride);

void write_loss_csv(const std::string& path,
                    const std::vector<model::LossPoint>& curve);

// --- CLI-facing pipelines; all throw fel::Error on failure ------------------

void run_ingest(const cfg::RunConfig& config);
void run_build_index(const cfg::RunConfig& config);
void run_train_retriever(const cfg::RunConfig& config);
void run_train_reader(const cfg::RunConfig& config);
void run_disambiguate(const cfg::RunConfig& config);
void run_link(const cfg::RunConfig& config);
void run_evaluate(const cfg::RunConfig& config);
double run_gradcheck(const cfg::RunConfig& config);

}  // namespace fel::pipeline
