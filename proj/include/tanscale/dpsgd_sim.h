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

// A deterministic toy DP-SGD trainer: binary logistic regression on two
// seeded Gaussian clusters, Poisson sampling, per-sample clipping,
// augmentation multiplicity and Gaussian noise with std C * sigma / B.
//
// The update at each step is
//
//   theta <- theta - lr * ( 1/B sum_{i in batch} clip_C( 1/K sum_j grad_ij )
//                           + N(0, C^2 sigma^2 / B^2) ),
//
// where B is the nominal batch size even though the Poisson-sampled batch has
// random cardinality.

#ifndef TANSCALE_DPSGD_SIM_H_
#define TANSCALE_DPSGD_SIM_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tanscale/errors.h"
#include "tanscale/privacy_params.h"
#include "tanscale/random.h"

namespace tanscale {

using Vector = std::vector<double>;

inline double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double Norm(std::span<const double> v) { return std::sqrt(Dot(v, v)); }

// g * min(1, C / ||g||). The zero vector maps to itself.
inline Vector Clip(std::span<const double> g, double clip_norm) {
  internal::Require(clip_norm > 0, "clip_norm", "clip norm must be positive");
  Vector out(g.begin(), g.end());
  const double norm = Norm(g);
  if (norm > clip_norm) {
    const double scale = clip_norm / norm;
    for (double& x : out) x *= scale;
  }
  return out;
}

// (1/B) sum_i clip_C(g_i) + z with z_j ~ N(0, (C sigma / B)^2). Draws exactly
// `dimension` normals from `rng`, independent of how many gradients are given.
// If `noise_out` is non-null it receives z.
inline Vector NoisyGradient(std::span<const Vector> per_sample_grads,
                            std::size_t dimension, double clip_norm,
                            double sigma, std::int64_t batch_size,
                            RandomStream& rng, Vector* noise_out = nullptr) {
  internal::Require(dimension >= 1, "dimension",
                    "gradient dimension must be >= 1");
  internal::Require(sigma > 0, "sigma", "noise multiplier must be positive");
  internal::Require(batch_size >= 1, "B", "batch size must be >= 1");
  Vector sum(dimension, 0.0);
  for (const Vector& g : per_sample_grads) {
    internal::Require(g.size() == dimension, "dimension",
                      "per-sample gradient has the wrong dimension");
    const Vector clipped = Clip(g, clip_norm);
    for (std::size_t j = 0; j < dimension; ++j) sum[j] += clipped[j];
  }
  const double b = static_cast<double>(batch_size);
  const double noise_std = clip_norm * sigma / b;
  if (noise_out != nullptr) noise_out->assign(dimension, 0.0);
  for (std::size_t j = 0; j < dimension; ++j) {
    const double z = noise_std * rng.Normal();
    if (noise_out != nullptr) (*noise_out)[j] = z;
    sum[j] = sum[j] / b + z;
  }
  return sum;
}

// Average of the K augmentation gradients of one sample. A running mean keeps
// K identical inputs bit-identical to the input.
inline Vector AverageAugmentations(std::span<const Vector> aug_grads) {
  internal::Require(!aug_grads.empty(), "augmult_order",
                    "each sample needs at least one augmentation");
  Vector mean(aug_grads.front().size(), 0.0);
  for (std::size_t k = 0; k < aug_grads.size(); ++k) {
    internal::Require(aug_grads[k].size() == mean.size(), "dimension",
                      "augmentation gradients differ in dimension");
    const double inv = 1.0 / static_cast<double>(k + 1);
    for (std::size_t j = 0; j < mean.size(); ++j) {
      mean[j] += (aug_grads[k][j] - mean[j]) * inv;
    }
  }
  return mean;
}

// Per sample: clip_C of the mean over its augmentations.
inline std::vector<Vector> AugmultGradient(
    std::span<const std::vector<Vector>> per_aug_grads, double clip_norm) {
  std::vector<Vector> out;
  out.reserve(per_aug_grads.size());
  std::size_t dim = 0;
  for (const auto& sample : per_aug_grads) {
    Vector mean = AverageAugmentations(sample);
    if (out.empty()) {
      dim = mean.size();
    } else {
      internal::Require(mean.size() == dim, "dimension",
                        "samples differ in gradient dimension");
    }
    out.push_back(Clip(mean, clip_norm));
  }
  return out;
}

// Each index in [0, n) is kept independently with probability q. Consumes
// exactly n outputs of `rng`.
inline std::vector<std::size_t> PoissonSample(std::size_t n, double q,
                                              RandomStream& rng) {
  internal::Require(q >= 0 && q <= 1, "q", "sampling rate must lie in [0, 1]");
  std::vector<std::size_t> picked;
  for (std::size_t i = 0; i < n; ++i) {
    if (rng.Uniform() < q) picked.push_back(i);
  }
  return picked;
}

// Binary logistic loss log(1 + exp(-y <theta, x>)) with y in {-1, +1}.
inline double LogisticLoss(std::span<const double> theta,
                           std::span<const double> x, double label) {
  const double m = -label * Dot(theta, x);
  return m > 0 ? m + std::log1p(std::exp(-m)) : std::log1p(std::exp(m));
}

inline Vector LogisticGradient(std::span<const double> theta,
                               std::span<const double> x, double label) {
  const double m = -label * Dot(theta, x);
  // sigmoid(m), evaluated without overflow.
  const double s = m >= 0 ? 1.0 / (1.0 + std::exp(-m))
                          : std::exp(m) / (1.0 + std::exp(m));
  Vector g(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) g[j] = -label * s * x[j];
  return g;
}

struct SimConfig {
  std::size_t dimension = 10;
  std::size_t num_samples = 1000;
  // dataset_size must equal num_samples.
  PrivacyParams privacy{1000, 100, 200, 1.0, 1e-5};
  double clip_norm = 1.0;
  double learning_rate = 1.0;
  std::size_t augmult_order = 1;
  double augmentation_noise_scale = 0.0;
  std::uint64_t seed = 42;
  // Distance of each cluster mean from the origin.
  double cluster_separation = 2.0;
  std::size_t histogram_bins = 50;
  // Keep every injected noise vector in the report.
  bool record_noise = false;

  void Validate() const {
    internal::Require(dimension >= 1, "dimension", "dimension must be >= 1");
    internal::Require(num_samples >= 2, "num_samples",
                      "need at least two samples");
    privacy.Validate();
    internal::Require(
        privacy.dataset_size == static_cast<std::int64_t>(num_samples), "N",
        "dataset size must equal num_samples");
    internal::Require(std::isfinite(clip_norm) && clip_norm > 0, "clip_norm",
                      "clip norm must be positive");
    internal::Require(std::isfinite(learning_rate) && learning_rate > 0,
                      "learning_rate", "learning rate must be positive");
    internal::Require(augmult_order >= 1, "augmult_order",
                      "augmentation multiplicity must be >= 1");
    internal::Require(std::isfinite(augmentation_noise_scale) &&
                          augmentation_noise_scale >= 0,
                      "augmentation_noise_scale",
                      "augmentation noise scale must be non-negative");
    internal::Require(std::isfinite(cluster_separation) &&
                          cluster_separation >= 0,
                      "cluster_separation",
                      "cluster separation must be non-negative");
    internal::Require(histogram_bins >= 1, "histogram_bins",
                      "need at least one histogram bin");
  }
};

struct Histogram {
  std::vector<double> edges;  // bins + 1 edges
  std::vector<std::int64_t> counts;

  std::int64_t total() const {
    std::int64_t t = 0;
    for (auto c : counts) t += c;
    return t;
  }
};

// Uniform bins on [lo, hi]; values at or beyond hi land in the last bin.
inline Histogram MakeHistogram(std::span<const double> values, double lo,
                               double hi, std::size_t bins) {
  Histogram h;
  h.edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) {
    h.edges[i] = lo + (hi - lo) * static_cast<double>(i) /
                          static_cast<double>(bins);
  }
  h.counts.assign(bins, 0);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (double v : values) {
    auto bin = static_cast<std::int64_t>(std::floor((v - lo) / width));
    bin = std::clamp<std::int64_t>(bin, 0, static_cast<std::int64_t>(bins) - 1);
    ++h.counts[static_cast<std::size_t>(bin)];
  }
  return h;
}

struct NoiseStats {
  double mean = 0.0;
  double stddev = 0.0;
  std::int64_t count = 0;
};

struct SimReport {
  std::vector<std::pair<std::int64_t, double>> loss_trajectory;
  std::map<std::int64_t, Histogram> grad_norm_histograms;
  NoiseStats noise_stats;
  Vector final_params;
  double final_accuracy = 0.0;
  std::vector<Vector> noise_trace;  // filled when record_noise is set
};

struct Dataset {
  std::vector<Vector> features;
  std::vector<double> labels;  // +1 / -1
};

// Two unit-covariance Gaussian clusters at +mu and -mu with
// ||mu|| = separation, alternating labels.
inline Dataset MakeSyntheticDataset(std::size_t n, std::size_t dimension,
                                    double separation, std::uint64_t seed) {
  RandomStream rng = MakeStream(seed, StreamId::kData);
  const double mu = separation / std::sqrt(static_cast<double>(dimension));
  Dataset data;
  data.features.reserve(n);
  data.labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double y = (i % 2 == 0) ? 1.0 : -1.0;
    Vector x(dimension);
    for (double& v : x) v = y * mu + rng.Normal();
    data.features.push_back(std::move(x));
    data.labels.push_back(y);
  }
  return data;
}

inline double DatasetLoss(const Dataset& data, std::span<const double> theta) {
  double total = 0.0;
  for (std::size_t i = 0; i < data.features.size(); ++i) {
    total += LogisticLoss(theta, data.features[i], data.labels[i]);
  }
  return total / static_cast<double>(data.features.size());
}

inline double DatasetAccuracy(const Dataset& data,
                              std::span<const double> theta) {
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.features.size(); ++i) {
    if (data.labels[i] * Dot(theta, data.features[i]) > 0) ++correct;
  }
  return static_cast<double>(correct) /
         static_cast<double>(data.features.size());
}

// Checkpoints at which gradient-norm histograms are recorded: 1, S/2, S.
inline std::set<std::int64_t> HistogramCheckpoints(std::int64_t steps) {
  return {1, std::max<std::int64_t>(1, steps / 2), steps};
}

inline SimReport Train(const SimConfig& cfg) {
  cfg.Validate();
  const Dataset data = MakeSyntheticDataset(
      cfg.num_samples, cfg.dimension, cfg.cluster_separation, cfg.seed);
  RandomStream sampling = MakeStream(cfg.seed, StreamId::kSampling);
  RandomStream augmentation = MakeStream(cfg.seed, StreamId::kAugmentation);
  RandomStream noise = MakeStream(cfg.seed, StreamId::kNoise);

  const std::size_t d = cfg.dimension;
  const double q = cfg.privacy.sampling_rate();
  const auto checkpoints = HistogramCheckpoints(cfg.privacy.steps);

  SimReport report;
  Vector theta(d, 0.0);
  report.loss_trajectory.emplace_back(0, DatasetLoss(data, theta));
  double noise_sum = 0.0;
  double noise_sq_sum = 0.0;
  Vector z;

  for (std::int64_t step = 1; step <= cfg.privacy.steps; ++step) {
    const auto batch = PoissonSample(cfg.num_samples, q, sampling);
    std::vector<Vector> clipped;
    std::vector<double> norms;
    clipped.reserve(batch.size());
    norms.reserve(batch.size());
    std::vector<Vector> aug_grads(cfg.augmult_order);
    for (std::size_t i : batch) {
      for (std::size_t k = 0; k < cfg.augmult_order; ++k) {
        if (cfg.augmentation_noise_scale > 0) {
          Vector x = data.features[i];
          for (double& v : x) {
            v += cfg.augmentation_noise_scale * augmentation.Normal();
          }
          aug_grads[k] = LogisticGradient(theta, x, data.labels[i]);
        } else {
          aug_grads[k] =
              LogisticGradient(theta, data.features[i], data.labels[i]);
        }
      }
      const Vector mean = AverageAugmentations(aug_grads);
      norms.push_back(Norm(mean));
      clipped.push_back(Clip(mean, cfg.clip_norm));
    }
    if (checkpoints.contains(step)) {
      report.grad_norm_histograms[step] =
          MakeHistogram(norms, 0.0, 2.0 * cfg.clip_norm, cfg.histogram_bins);
    }

    const Vector g =
        NoisyGradient(clipped, d, cfg.clip_norm, cfg.privacy.noise_multiplier,
                      cfg.privacy.batch_size, noise, &z);
    for (double v : z) {
      noise_sum += v;
      noise_sq_sum += v * v;
    }
    if (cfg.record_noise) report.noise_trace.push_back(z);
    for (std::size_t j = 0; j < d; ++j) theta[j] -= cfg.learning_rate * g[j];
    report.loss_trajectory.emplace_back(step, DatasetLoss(data, theta));
  }

  const double count =
      static_cast<double>(cfg.privacy.steps) * static_cast<double>(d);
  report.noise_stats.count = static_cast<std::int64_t>(count);
  report.noise_stats.mean = noise_sum / count;
  report.noise_stats.stddev = std::sqrt(
      std::max(0.0, noise_sq_sum / count -
                        report.noise_stats.mean * report.noise_stats.mean));
  report.final_accuracy = DatasetAccuracy(data, theta);
  report.final_params = std::move(theta);
  return report;
}

}  // namespace tanscale

#endif  // TANSCALE_DPSGD_SIM_H_
