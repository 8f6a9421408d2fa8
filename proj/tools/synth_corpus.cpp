#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "core/synth.hpp"

int main(int argc, char** argv) {
  CLI::App app{"generate a small synthetic linking dataset"};
  fel::synth::SynthOptions opts;
  std::string out_dir = "synth";
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--entities", opts.n_entities, "number of entities");
  app.add_option("--docs", opts.n_docs, "number of documents");
  app.add_option("--mentions", opts.mentions_per_doc, "mentions per document");
  app.add_option("--filler", opts.filler_run, "filler tokens between mentions");
  app.add_option("--distractors", opts.distractors,
                 "distractor candidates per mention");
  app.add_option("--seed", opts.seed, "random seed");
  CLI11_PARSE(app, argc, argv);

  try {
    fel::synth::write_jsonl(fel::synth::make(opts), out_dir);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  std::printf("wrote entities.jsonl, corpus.jsonl, candidates.jsonl to %s\n",
              out_dir.c_str());
  return 0;
}
