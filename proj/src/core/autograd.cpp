#include "core/autograd.hpp"

#include <cmath>

namespace fel::ad {

Var Tape::record(Mat value, std::vector<Var> parents,
                 std::function<void(Node&)> backprop) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  node->parents = std::move(parents);
  node->backprop = std::move(backprop);
  for (const auto& p : node->parents) {
    if (p->requires_grad) {
      node->requires_grad = true;
      break;
    }
  }
  order_.push_back(node);
  return node;
}

void Tape::ensure_grad(Node& n) {
  if (n.grad.size() == 0) n.grad = Mat::Zero(n.value.rows(), n.value.cols());
}

Var Tape::constant(Mat v) { return record(std::move(v), {}, nullptr); }

Var Tape::param(Parameter& p) {
  auto node = std::make_shared<Node>();
  node->value = p.value;
  node->requires_grad = true;
  node->param = &p;
  node->backprop = [](Node& n) { n.param->grad += n.grad; };
  order_.push_back(node);
  return node;
}

Var Tape::add(const Var& a, const Var& b) {
  return record(a->value + b->value, {a, b}, [](Node& n) {
    auto& a = *n.parents[0];
    auto& b = *n.parents[1];
    if (a.requires_grad) { ensure_grad(a); a.grad += n.grad; }
    if (b.requires_grad) { ensure_grad(b); b.grad += n.grad; }
  });
}

Var Tape::sub(const Var& a, const Var& b) {
  return record(a->value - b->value, {a, b}, [](Node& n) {
    auto& a = *n.parents[0];
    auto& b = *n.parents[1];
    if (a.requires_grad) { ensure_grad(a); a.grad += n.grad; }
    if (b.requires_grad) { ensure_grad(b); b.grad -= n.grad; }
  });
}

Var Tape::add_rowvec(const Var& a, const Var& row) {
  Mat v = a->value;
  v.rowwise() += row->value.row(0);
  return record(std::move(v), {a, row}, [](Node& n) {
    auto& a = *n.parents[0];
    auto& r = *n.parents[1];
    if (a.requires_grad) { ensure_grad(a); a.grad += n.grad; }
    if (r.requires_grad) {
      ensure_grad(r);
      r.grad.row(0) += n.grad.colwise().sum();
    }
  });
}

Var Tape::scale(const Var& a, double s) {
  return record(a->value * s, {a}, [s](Node& n) {
    auto& a = *n.parents[0];
    if (a.requires_grad) { ensure_grad(a); a.grad += n.grad * s; }
  });
}

Var Tape::matmul(const Var& a, const Var& b) {
  if (a->value.cols() != b->value.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "matmul");
  }
  return record(a->value * b->value, {a, b}, [](Node& n) {
    auto& a = *n.parents[0];
    auto& b = *n.parents[1];
    if (a.requires_grad) { ensure_grad(a); a.grad += n.grad * b.value.transpose(); }
    if (b.requires_grad) { ensure_grad(b); b.grad += a.value.transpose() * n.grad; }
  });
}

Var Tape::matmul_nt(const Var& a, const Var& b) {
  if (a->value.cols() != b->value.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "matmul_nt");
  }
  return record(a->value * b->value.transpose(), {a, b}, [](Node& n) {
    auto& a = *n.parents[0];
    auto& b = *n.parents[1];
    if (a.requires_grad) { ensure_grad(a); a.grad += n.grad * b.value; }
    if (b.requires_grad) { ensure_grad(b); b.grad += n.grad.transpose() * a.value; }
  });
}

Var Tape::relu(const Var& a) {
  Mat v = a->value.cwiseMax(0.0);
  return record(std::move(v), {a}, [](Node& n) {
    auto& a = *n.parents[0];
    if (!a.requires_grad) return;
    ensure_grad(a);
    a.grad += (a.value.array() > 0.0).cast<double>().matrix().cwiseProduct(n.grad);
  });
}

Var Tape::softmax_rows(const Var& a) {
  Mat v = a->value;
  for (Eigen::Index r = 0; r < v.rows(); ++r) {
    double m = v.row(r).maxCoeff();
    v.row(r) = (v.row(r).array() - m).exp();
    v.row(r) /= v.row(r).sum();
  }
  return record(std::move(v), {a}, [](Node& n) {
    auto& a = *n.parents[0];
    if (!a.requires_grad) return;
    ensure_grad(a);
    for (Eigen::Index r = 0; r < n.value.rows(); ++r) {
      double dot = n.grad.row(r).dot(n.value.row(r));
      a.grad.row(r) += n.value.row(r).cwiseProduct(
          (n.grad.row(r).array() - dot).matrix());
    }
  });
}

Var Tape::layer_norm(const Var& a, const Var& gain, const Var& bias,
                     double eps) {
  const Mat& x = a->value;
  const Eigen::Index d = x.cols();
  Mat xhat(x.rows(), d);
  Eigen::VectorXd inv_std(x.rows());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    double mu = x.row(r).mean();
    double var = (x.row(r).array() - mu).square().mean();
    double is = 1.0 / std::sqrt(var + eps);
    inv_std(r) = is;
    xhat.row(r) = (x.row(r).array() - mu).matrix() * is;
  }
  Mat y = xhat;
  for (Eigen::Index r = 0; r < y.rows(); ++r) {
    y.row(r) = y.row(r).cwiseProduct(gain->value.row(0)) + bias->value.row(0);
  }
  return record(std::move(y), {a, gain, bias},
                [xhat, inv_std](Node& n) {
    auto& a = *n.parents[0];
    auto& g = *n.parents[1];
    auto& b = *n.parents[2];
    const Eigen::Index d = a.value.cols();
    if (g.requires_grad) {
      ensure_grad(g);
      g.grad.row(0) += n.grad.cwiseProduct(xhat).colwise().sum();
    }
    if (b.requires_grad) {
      ensure_grad(b);
      b.grad.row(0) += n.grad.colwise().sum();
    }
    if (a.requires_grad) {
      ensure_grad(a);
      for (Eigen::Index r = 0; r < a.value.rows(); ++r) {
        Eigen::RowVectorXd dxhat =
            n.grad.row(r).cwiseProduct(g.value.row(0));
        double m1 = dxhat.mean();
        double m2 = dxhat.cwiseProduct(xhat.row(r)).mean();
        a.grad.row(r) +=
            inv_std(r) *
            (dxhat.array() - m1 - xhat.row(r).array() * m2).matrix();
      }
    }
  });
}

Var Tape::concat_rows(const std::vector<Var>& parts) {
  Eigen::Index rows = 0;
  const Eigen::Index cols = parts.front()->value.cols();
  for (const auto& p : parts) rows += p->value.rows();
  Mat v(rows, cols);
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    v.middleRows(at, p->value.rows()) = p->value;
    at += p->value.rows();
  }
  return record(std::move(v), parts, [](Node& n) {
    Eigen::Index at = 0;
    for (auto& pv : n.parents) {
      auto& p = *pv;
      if (p.requires_grad) {
        ensure_grad(p);
        p.grad += n.grad.middleRows(at, p.value.rows());
      }
      at += p.value.rows();
    }
  });
}

Var Tape::concat_cols(const std::vector<Var>& parts) {
  const Eigen::Index rows = parts.front()->value.rows();
  Eigen::Index cols = 0;
  for (const auto& p : parts) cols += p->value.cols();
  Mat v(rows, cols);
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    v.middleCols(at, p->value.cols()) = p->value;
    at += p->value.cols();
  }
  return record(std::move(v), parts, [](Node& n) {
    Eigen::Index at = 0;
    for (auto& pv : n.parents) {
      auto& p = *pv;
      if (p.requires_grad) {
        ensure_grad(p);
        p.grad += n.grad.middleCols(at, p.value.cols());
      }
      at += p.value.cols();
    }
  });
}

std::vector<Var> Tape::split_cols(const Var& a, int parts) {
  const Eigen::Index width = a->value.cols() / parts;
  std::vector<Var> out;
  for (int i = 0; i < parts; ++i) {
    Eigen::Index at = i * width;
    out.push_back(record(a->value.middleCols(at, width), {a},
                         [at, width](Node& n) {
      auto& p = *n.parents[0];
      if (!p.requires_grad) return;
      ensure_grad(p);
      p.grad.middleCols(at, width) += n.grad;
    }));
  }
  return out;
}

Var Tape::embedding(const Var& table, const std::vector<int>& ids) {
  Mat v(static_cast<Eigen::Index>(ids.size()), table->value.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    v.row(static_cast<Eigen::Index>(i)) = table->value.row(ids[i]);
  }
  return record(std::move(v), {table}, [ids](Node& n) {
    auto& t = *n.parents[0];
    if (!t.requires_grad) return;
    ensure_grad(t);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      t.grad.row(ids[i]) += n.grad.row(static_cast<Eigen::Index>(i));
    }
  });
}

Var Tape::mean_rows(const Var& a) {
  Mat v = a->value.colwise().mean();
  return record(std::move(v), {a}, [](Node& n) {
    auto& a = *n.parents[0];
    if (!a.requires_grad) return;
    ensure_grad(a);
    double inv = 1.0 / static_cast<double>(a.value.rows());
    a.grad += Mat::Ones(a.value.rows(), 1) * (n.grad * inv);
  });
}

Var Tape::logsumexp_row(const Var& a) {
  double m = a->value.maxCoeff();
  double sum = (a->value.array() - m).exp().sum();
  Mat v(1, 1);
  v(0, 0) = m + std::log(sum);
  return record(std::move(v), {a}, [](Node& n) {
    auto& a = *n.parents[0];
    if (!a.requires_grad) return;
    ensure_grad(a);
    double lse = n.value(0, 0);
    a.grad += ((a.value.array() - lse).exp() * n.grad(0, 0)).matrix();
  });
}

Var Tape::cross_entropy_mean(const Var& logits,
                             const std::vector<int>& targets) {
  const Eigen::Index T = logits->value.rows();
  if (static_cast<std::size_t>(T) != targets.size()) {
    throw Error(ErrorCode::DimensionMismatch, "cross_entropy_mean");
  }
  Mat probs = logits->value;
  for (Eigen::Index r = 0; r < T; ++r) {
    double m = probs.row(r).maxCoeff();
    probs.row(r) = (probs.row(r).array() - m).exp();
    probs.row(r) /= probs.row(r).sum();
  }
  double loss = 0.0;
  for (Eigen::Index r = 0; r < T; ++r) {
    loss -= std::log(std::max(probs(r, targets[static_cast<std::size_t>(r)]),
                              1e-300));
  }
  loss /= static_cast<double>(T);
  Mat v(1, 1);
  v(0, 0) = loss;
  return record(std::move(v), {logits}, [probs, targets](Node& n) {
    auto& l = *n.parents[0];
    if (!l.requires_grad) return;
    ensure_grad(l);
    double g = n.grad(0, 0) / static_cast<double>(probs.rows());
    Mat d = probs;
    for (Eigen::Index r = 0; r < d.rows(); ++r) {
      d(r, targets[static_cast<std::size_t>(r)]) -= 1.0;
    }
    l.grad += d * g;
  });
}

void Tape::backward(const Var& loss) {
  if (loss->value.rows() != 1 || loss->value.cols() != 1) {
    throw Error(ErrorCode::DimensionMismatch, "backward expects a scalar");
  }
  loss->grad = Mat::Ones(1, 1);
  for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
    Node& n = **it;
    if (!n.requires_grad && !n.param) continue;
    if (n.grad.size() == 0) continue;  // not on the path to the loss
    if (n.backprop) n.backprop(n);
  }
}

}  // namespace fel::ad
