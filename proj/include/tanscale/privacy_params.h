//
// Copyright 2026 The tanscale Authors
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
//

#ifndef TANSCALE_PRIVACY_PARAMS_H_
#define TANSCALE_PRIVACY_PARAMS_H_

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tanscale/errors.h"

namespace tanscale {

// Accounting inputs of one DP-SGD run with Poisson sampling.
struct PrivacyParams {
  std::int64_t dataset_size = 0;  // N
  std::int64_t batch_size = 0;    // B, expected batch size
  std::int64_t steps = 0;         // S
  double noise_multiplier = 0.0;  // sigma
  double delta = 0.0;

  double sampling_rate() const {
    return static_cast<double>(batch_size) / static_cast<double>(dataset_size);
  }

  // Throws DomainError naming the first invalid field.
  void Validate() const {
    internal::Require(dataset_size >= 1, "N", "dataset size must be >= 1");
    internal::Require(batch_size >= 1, "B", "batch size must be >= 1");
    internal::Require(batch_size <= dataset_size, "B",
                      "batch size must not exceed dataset size");
    internal::Require(steps >= 1, "S", "number of steps must be >= 1");
    internal::Require(std::isfinite(noise_multiplier) && noise_multiplier > 0,
                      "sigma", "noise multiplier must be positive");
    internal::Require(delta > 0 && delta < 1, "delta",
                      "delta must lie in (0, 1)");
  }

  friend bool operator==(const PrivacyParams&, const PrivacyParams&) = default;
};

// Strictly increasing integer Renyi orders, each >= 2.
class AlphaGrid {
 public:
  explicit AlphaGrid(std::vector<int> orders) : orders_(std::move(orders)) {
    internal::Require(!orders_.empty(), "alpha_grid", "grid is empty");
    for (std::size_t i = 0; i < orders_.size(); ++i) {
      internal::Require(orders_[i] >= 2, "alpha_grid", "orders must be >= 2");
      if (i > 0) {
        internal::Require(orders_[i] > orders_[i - 1], "alpha_grid",
                          "orders must be strictly increasing");
      }
    }
  }

  // {2, ..., 512} plus a sparse tail {768, 1024, 1536, 2048}.
  static AlphaGrid Default() {
    std::vector<int> orders;
    orders.reserve(515);
    for (int a = 2; a <= 512; ++a) orders.push_back(a);
    for (int a : {768, 1024, 1536, 2048}) orders.push_back(a);
    return AlphaGrid(std::move(orders));
  }

  static AlphaGrid Range(int first, int last) {
    std::vector<int> orders;
    for (int a = first; a <= last; ++a) orders.push_back(a);
    return AlphaGrid(std::move(orders));
  }

  const std::vector<int>& orders() const { return orders_; }
  int largest() const { return orders_.back(); }

 private:
  std::vector<int> orders_;
};

}  // namespace tanscale

#endif  // TANSCALE_PRIVACY_PARAMS_H_
