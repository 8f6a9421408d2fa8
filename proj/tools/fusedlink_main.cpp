#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fusedlink.h"

namespace {

struct Options {
  std::string config_path;
  std::map<std::string, std::string> overrides;
};

// Shared flags; each maps 1:1 onto a config key, command-line wins over file.
void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config_path, "key=value config file");
  auto opt = [&o, cmd](const char* flag, const char* key, const char* help) {
    cmd->add_option_function<std::string>(
        flag, [&o, key](const std::string& v) { o.overrides[key] = v; }, help);
  };
  opt("--kb", "kb", "entities JSONL ({id,title,description})");
  opt("--candidates", "candidates", "candidate lists JSONL ({mention,candidates})");
  opt("--corpus", "corpus", "annotated corpus JSONL");
  opt("--input", "input", "input corpus JSONL");
  opt("--vocab", "vocab", "vocabulary file (one token per line)");
  opt("--vocab-out", "vocab_out", "write the built vocabulary here");
  opt("--checkpoint", "checkpoint", "reader checkpoint directory");
  opt("--retriever-checkpoint", "retriever_checkpoint",
      "retriever checkpoint directory");
  opt("--out", "out", "output path");
  opt("--pred", "pred", "predicted links JSONL");
  opt("--gold", "gold", "gold links JSONL");
  opt("--prior-corpus", "prior_corpus", "corpus for mention-entity priors");
  opt("--dataset", "dataset", "dataset name for reports [dataset]");
  opt("--task", "task", "reader task: ed|el [ed]");
  opt("--target-mode", "target_mode", "decode target: title|index [title]");
  opt("--d-model", "d_model", "model width [64]");
  opt("--heads", "heads", "attention heads [2]");
  opt("--ffn", "ffn", "feed-forward width [128]");
  opt("--enc-layers", "enc_layers", "encoder layers [2]");
  opt("--dec-layers", "dec_layers", "decoder layers [2]");
  opt("--n-cand", "n_cand", "fused candidates per example [16]");
  opt("--window", "window", "window size in tokens [20]");
  opt("--stride", "stride", "window stride in tokens [10]");
  opt("--k", "k", "retrieval depth [100]");
  opt("--lr", "lr", "peak learning rate [1e-4]");
  opt("--steps", "steps", "training steps [1000]");
  opt("--warmup", "warmup", "warmup fraction of steps [0.01]");
  opt("--batch", "batch", "batch size [8]");
  opt("--eval-every", "eval_every", "evaluation interval in steps [1000]");
  opt("--negatives", "negatives", "negatives per training step [32]");
  opt("--hard-fraction", "hard_fraction", "hard negative fraction [0.1]");
  opt("--min-count", "min_count", "vocabulary frequency cutoff [1]");
  opt("--threads", "threads", "linking worker threads [1]");
  opt("--seed", "seed", "random seed [0]");
  opt("--eps", "eps", "finite-difference epsilon [1e-4]");
  opt("--candidates-n", "candidates_n", "gradcheck fused inputs [2]");
}

int fill(fel_config* cfg, const Options& o) {
  if (!o.config_path.empty() &&
      fel_config_load(cfg, o.config_path.c_str()) != FEL_OK) {
    std::fprintf(stderr, "error: %s\n", fel_last_error());
    return 1;
  }
  for (const auto& [k, v] : o.overrides) {
    fel_config_set(cfg, k.c_str(), v.c_str());
  }
  return 0;
}

int run(fel_status (*fn)(const fel_config*), const Options& o) {
  fel_config* cfg = fel_config_new();
  int rc = fill(cfg, o);
  if (rc == 0) {
    fel_status st = fn(cfg);
    if (st != FEL_OK) std::fprintf(stderr, "error: %s\n", fel_last_error());
    rc = static_cast<int>(st);
  }
  fel_config_free(cfg);
  return rc;
}

int run_gradcheck(const Options& o) {
  fel_config* cfg = fel_config_new();
  int rc = fill(cfg, o);
  if (rc == 0) {
    double err = 0.0;
    fel_status st = fel_run_gradcheck(cfg, &err);
    if (st != FEL_OK) {
      std::fprintf(stderr, "error: %s\n", fel_last_error());
      rc = static_cast<int>(st);
    } else {
      std::printf("max relative error: %.3e\n", err);
      rc = err < 1e-3 ? 0 : 2;
    }
  }
  fel_config_free(cfg);
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"entity disambiguation and linking toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", fel_version());

  struct Sub {
    const char* name;
    const char* help;
    fel_status (*fn)(const fel_config*);
  };
  const std::vector<Sub> subs = {
      {"ingest", "validate data files and optionally build a vocabulary",
       fel_run_ingest},
      {"build-index", "dump entity embeddings from a trained retriever",
       fel_run_build_index},
      {"train-retriever", "train the bi-encoder retriever",
       fel_run_train_retriever},
      {"train-reader", "train the fusion reader (ed or el task)",
       fel_run_train_reader},
      {"disambiguate", "resolve annotated mentions against candidate lists",
       fel_run_disambiguate},
      {"link", "end-to-end linking over raw documents", fel_run_link},
      {"evaluate", "score predicted links against gold", fel_run_evaluate},
  };

  std::vector<Options> opts(subs.size() + 1);
  for (std::size_t i = 0; i < subs.size(); ++i) {
    add_common(app.add_subcommand(subs[i].name, subs[i].help), opts[i]);
  }
  add_common(app.add_subcommand(
                 "gradcheck", "verify gradients with finite differences"),
             opts.back());

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (app.get_subcommand(subs[i].name)->parsed()) {
      return run(subs[i].fn, opts[i]);
    }
  }
  if (app.get_subcommand("gradcheck")->parsed()) {
    return run_gradcheck(opts.back());
  }
  return 1;
}
