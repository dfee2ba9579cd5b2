// Copyright 2026 The cifscd Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "cifscd/nn.hpp"

namespace cifscd::optim {

// Linear warmup to the peak rate, then constant.
struct WarmupHoldSchedule {
  double peak = 1e-3;
  std::size_t warmup_steps = 100;

  double At(std::size_t step) const {
    if (warmup_steps == 0 || step >= warmup_steps) return peak;
    return peak * static_cast<double>(step + 1) / static_cast<double>(warmup_steps);
  }
};

class Adam {
 public:
  Adam(nn::ParameterSet params, WarmupHoldSchedule schedule, double beta1 = 0.9,
       double beta2 = 0.999, double eps = 1e-8)
      : params_(std::move(params)), schedule_(schedule), beta1_(beta1), beta2_(beta2), eps_(eps) {
    for (const auto& [_, v] : params_.entries()) {
      m_.emplace_back(v.value().size(), 0.0);
      v_.emplace_back(v.value().size(), 0.0);
    }
  }

  void Step() {
    const double lr = schedule_.At(step_);
    ++step_;
    const double c1 = 1 - std::pow(beta1_, static_cast<double>(step_));
    const double c2 = 1 - std::pow(beta2_, static_cast<double>(step_));
    auto& entries = params_.entries();
    for (std::size_t k = 0; k < entries.size(); ++k) {
      auto& var = entries[k].second;
      auto& values = var.mutable_value().values();
      const auto& grad = var.grad();
      for (std::size_t i = 0; i < values.size(); ++i) {
        m_[k][i] = beta1_ * m_[k][i] + (1 - beta1_) * grad[i];
        v_[k][i] = beta2_ * v_[k][i] + (1 - beta2_) * grad[i] * grad[i];
        values[i] -= lr * (m_[k][i] / c1) / (std::sqrt(v_[k][i] / c2) + eps_);
      }
    }
  }

  void ZeroGrad() { params_.ZeroGrad(); }
  std::size_t steps() const { return step_; }

 private:
  nn::ParameterSet params_;
  WarmupHoldSchedule schedule_;
  double beta1_, beta2_, eps_;
  std::size_t step_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

class SgdMomentum {
 public:
  SgdMomentum(nn::ParameterSet params, WarmupHoldSchedule schedule, double momentum = 0.9)
      : params_(std::move(params)), schedule_(schedule), momentum_(momentum) {
    for (const auto& [_, v] : params_.entries()) velocity_.emplace_back(v.value().size(), 0.0);
  }

  void Step() {
    const double lr = schedule_.At(step_++);
    auto& entries = params_.entries();
    for (std::size_t k = 0; k < entries.size(); ++k) {
      auto& values = entries[k].second.mutable_value().values();
      const auto& grad = entries[k].second.grad();
      for (std::size_t i = 0; i < values.size(); ++i) {
        velocity_[k][i] = momentum_ * velocity_[k][i] + grad[i];
        values[i] -= lr * velocity_[k][i];
      }
    }
  }

  void ZeroGrad() { params_.ZeroGrad(); }

 private:
  nn::ParameterSet params_;
  WarmupHoldSchedule schedule_;
  double momentum_;
  std::size_t step_ = 0;
  std::vector<std::vector<double>> velocity_;
};

}  // namespace cifscd::optim
