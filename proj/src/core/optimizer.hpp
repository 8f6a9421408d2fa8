#pragma once

#include <unordered_map>

#include "core/transformer.hpp"

namespace fel::model {

struct TrainConfig {
  double lr = 1e-4;          // peak learning rate
  double warmup = 0.01;      // fraction of total steps spent ramping up
  std::size_t steps = 1000;
  std::size_t batch = 8;
  std::size_t eval_every = 1000;
  std::uint64_t seed = 0;
};

struct LossPoint {
  std::size_t step;
  double loss;
  double lr;
};

// Linear warmup from 0 to peak over the first `warmup` fraction of steps,
// then linear decay back to 0 at the final step. `step` is 1-based.
double lr_at_step(std::size_t step, std::size_t total_steps, double peak,
                  double warmup_fraction);

class Adam {
 public:
  explicit Adam(double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : beta1_(beta1), beta2_(beta2), eps_(eps) {}

  // Applies one update to every parameter from its accumulated gradient.
  void step(ParamStore& store, double lr);

 private:
  struct State {
    ad::Mat m;
    ad::Mat v;
  };
  double beta1_, beta2_, eps_;
  std::size_t t_ = 0;
  std::unordered_map<const ad::Parameter*, State> state_;
};

}  // namespace fel::model
