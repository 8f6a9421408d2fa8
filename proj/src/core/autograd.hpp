#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "core/common.hpp"

namespace fel::ad {

using Mat = Eigen::MatrixXd;

// A named trainable tensor; gradients are accumulated here by Tape::backward.
struct Parameter {
  std::string name;
  Mat value;
  Mat grad;

  Parameter(std::string n, Eigen::Index rows, Eigen::Index cols)
      : name(std::move(n)), value(Mat::Zero(rows, cols)),
        grad(Mat::Zero(rows, cols)) {}

  void zero_grad() { grad.setZero(); }
};

struct Node;
using Var = std::shared_ptr<Node>;

struct Node {
  Mat value;
  Mat grad;  // same shape as value, lazily zero-initialized
  bool requires_grad = false;
  std::vector<Var> parents;
  std::function<void(Node&)> backprop;  // pushes this->grad into parents
  Parameter* param = nullptr;           // set for parameter leaves
};

// Records ops in creation order; backward() replays the tape in reverse.
class Tape {
 public:
  Var constant(Mat v);
  Var param(Parameter& p);

  Var add(const Var& a, const Var& b);
  Var sub(const Var& a, const Var& b);
  Var add_rowvec(const Var& a, const Var& row);  // broadcast 1 x d over rows
  Var scale(const Var& a, double s);
  Var matmul(const Var& a, const Var& b);     // A * B
  Var matmul_nt(const Var& a, const Var& b);  // A * B^T
  Var relu(const Var& a);
  Var softmax_rows(const Var& a);
  Var layer_norm(const Var& a, const Var& gain, const Var& bias,
                 double eps = 1e-5);
  Var concat_rows(const std::vector<Var>& parts);
  Var concat_cols(const std::vector<Var>& parts);
  std::vector<Var> split_cols(const Var& a, int parts);
  Var embedding(const Var& table, const std::vector<int>& ids);
  Var mean_rows(const Var& a);  // 1 x d column means
  Var logsumexp_row(const Var& a);  // 1 x n -> 1 x 1
  // Mean token-level cross-entropy; logits T x V, targets length T.
  Var cross_entropy_mean(const Var& logits, const std::vector<int>& targets);

  // Seeds d(loss)=1 and propagates through the tape. `loss` must be 1 x 1.
  void backward(const Var& loss);

  std::size_t size() const { return order_.size(); }

 private:
  std::vector<Var> order_;

  Var record(Mat value, std::vector<Var> parents,
             std::function<void(Node&)> backprop);
  static void ensure_grad(Node& n);
};

}  // namespace fel::ad
