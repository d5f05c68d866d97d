// SPDX-License-Identifier: Apache-2.0
#include "ddi/nn/adam.hpp"

#include <cmath>

namespace ddi::nn {

template <typename T>
void Adam<T>::step(const ParameterList<T>& params) {
  ++step_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(step_));
  const T b1 = static_cast<T>(config_.beta1), b2 = static_cast<T>(config_.beta2);
  const T lr = static_cast<T>(config_.lr), wd = static_cast<T>(config_.weight_decay), eps = static_cast<T>(config_.eps);
  for (Parameter<T>* p : params) {
    if (!p->trainable) continue;
    auto [it, inserted] = state_.try_emplace(p->name);
    Moments& s = it->second;
    if (inserted || s.m.rows() != p->value.rows() || s.m.cols() != p->value.cols()) {
      s.m = Matrix<T>::Zero(p->value.rows(), p->value.cols());
      s.v = Matrix<T>::Zero(p->value.rows(), p->value.cols());
    }
    const Eigen::Index n = p->value.size();
    T* w = p->value.data();
    const T* g0 = p->grad.data();
    T* m = s.m.data();
    T* v = s.v.data();
    for (Eigen::Index i = 0; i < n; ++i) {
      const T g = g0[i] + wd * w[i];
      m[i] = b1 * m[i] + (T(1) - b1) * g;
      v[i] = b2 * v[i] + (T(1) - b2) * g * g;
      const T mhat = m[i] / static_cast<T>(c1);
      const T vhat = v[i] / static_cast<T>(c2);
      w[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
  }
}

template class Adam<float>;
template class Adam<double>;

}  // namespace ddi::nn
