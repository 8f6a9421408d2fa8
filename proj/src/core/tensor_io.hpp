#pragma once

#include <string>

#include "core/autograd.hpp"
#include "core/transformer.hpp"

namespace fel::io {

// Binary tensor files: one JSON header line {"count":rows,"dim":cols}
// followed by count*dim little-endian float32 values, row-major.
void write_tensor(const std::string& path, const ad::Mat& m);
ad::Mat read_tensor(const std::string& path);

// Embedding dump for an id-keyed matrix; ids go to `path + ".ids"`,
// one id per line in row order.
void write_embeddings(const std::string& path, const ad::Mat& m,
                      const std::vector<std::string>& ids);

// Checkpoint directory: config.json, vocab.txt, tensors/<name>.bin.
// Saving/loading the parameter tensors only; the caller owns config/vocab.
void save_params(const std::string& dir, const model::ParamStore& store);
void load_params(const std::string& dir, model::ParamStore& store);

}  // namespace fel::io
