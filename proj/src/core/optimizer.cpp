#include "core/optimizer.hpp"

#include <cmath>

namespace fel::model {

double lr_at_step(std::size_t step, std::size_t total_steps, double peak,
                  double warmup_fraction) {
  if (total_steps == 0) return 0.0;
  double s = static_cast<double>(step);
  double total = static_cast<double>(total_steps);
  double warm = warmup_fraction * total;
  if (warm > 0.0 && s <= warm) return peak * s / warm;
  return peak * (total - s) / (total - warm);
}

void Adam::step(ParamStore& store, double lr) {
  ++t_;
  double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (auto& p : store.all()) {
    auto& st = state_[p.get()];
    if (st.m.size() == 0) {
      st.m = ad::Mat::Zero(p->value.rows(), p->value.cols());
      st.v = ad::Mat::Zero(p->value.rows(), p->value.cols());
    }
    st.m = beta1_ * st.m + (1.0 - beta1_) * p->grad;
    st.v = beta2_ * st.v.array().matrix() +
           (1.0 - beta2_) * p->grad.cwiseProduct(p->grad);
    ad::Mat mhat = st.m / bc1;
    ad::Mat vhat = st.v / bc2;
    p->value.array() -=
        lr * mhat.array() / (vhat.array().sqrt() + eps_);
  }
}

}  // namespace fel::model
