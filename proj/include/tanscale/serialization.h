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

// JSON and CSV encodings of accounting results, plans and simulation reports.
// Schemas for the JSON documents live in schemas/.

#ifndef TANSCALE_SERIALIZATION_H_
#define TANSCALE_SERIALIZATION_H_

#include <cstdio>
#include <ostream>
#include <string>

#include "json.hpp"
#include "tanscale/accountant.h"
#include "tanscale/dpsgd_sim.h"
#include "tanscale/planner.h"
#include "tanscale/privacy_params.h"
#include "tanscale/tan.h"

namespace tanscale {

// Locale-independent, 12 significant digits.
inline std::string FormatDouble(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline nlohmann::json ToJson(const PrivacyParams& p) {
  return {{"N", p.dataset_size},
          {"B", p.batch_size},
          {"S", p.steps},
          {"sigma", p.noise_multiplier},
          {"delta", p.delta},
          {"q", p.sampling_rate()}};
}

inline nlohmann::json ToJson(const RdpAccount& a) {
  return {{"eps_rdp", a.epsilon},
          {"best_order", a.best_order},
          {"grid_truncated", a.grid_truncated},
          {"delta", a.delta}};
}

inline nlohmann::json ToJson(const TanSummary& s) {
  return {{"eta", s.eta},
          {"eta_step", s.eta_step},
          {"total_noise", s.total_noise},
          {"eps_tan", s.eps_tan},
          {"gdp_mu", s.gdp_mu},
          {"gdp_mu_large_sigma", s.gdp_mu_large_sigma},
          {"tcdp_omega", s.tcdp_omega}};
}

inline nlohmann::json ToJson(const ScaledConfig& c) {
  nlohmann::json j = {{"kind", std::string(ToString(c.kind))},
                      {"privacy", ToJson(c.privacy)},
                      {"learning_rate", c.learning_rate},
                      {"compute_factor", c.compute_factor},
                      {"eps_rdp", c.epsilon},
                      {"best_order", c.best_order},
                      {"grid_truncated", c.grid_truncated},
                      {"eps_tan", c.eps_tan},
                      {"eta", c.eta},
                      {"eta_step", c.eta_step},
                      {"simulation_only", c.simulation_only}};
  if (c.exact_batch_size) j["exact_batch_size"] = *c.exact_batch_size;
  if (c.global_snr) j["global_snr"] = *c.global_snr;
  return j;
}

inline nlohmann::json ToJson(const Histogram& h) {
  return {{"edges", h.edges}, {"counts", h.counts}};
}

inline nlohmann::json ToJson(const SimReport& r) {
  nlohmann::json trajectory = nlohmann::json::array();
  for (const auto& [step, loss] : r.loss_trajectory) {
    trajectory.push_back({step, loss});
  }
  nlohmann::json histograms = nlohmann::json::array();
  for (const auto& [step, h] : r.grad_norm_histograms) {
    nlohmann::json entry = ToJson(h);
    entry["step"] = step;
    histograms.push_back(std::move(entry));
  }
  nlohmann::json j = {{"loss_trajectory", std::move(trajectory)},
                      {"grad_norm_histograms", std::move(histograms)},
                      {"noise_stats",
                       {{"mean", r.noise_stats.mean},
                        {"stddev", r.noise_stats.stddev},
                        {"count", r.noise_stats.count}}},
                      {"final_params", r.final_params},
                      {"final_accuracy", r.final_accuracy}};
  if (!r.noise_trace.empty()) j["noise_trace"] = r.noise_trace;
  return j;
}

inline void WriteHistogramCsv(const Histogram& h, std::ostream& out) {
  out << "bin_left,bin_right,count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    out << FormatDouble(h.edges[i]) << ',' << FormatDouble(h.edges[i + 1])
        << ',' << h.counts[i] << '\n';
  }
}

inline constexpr const char* kSweepCsvHeader =
    "step_count,sigma,q,eps_rdp,eps_tan,valid";

inline void WriteSweepCsvRow(const SweepRow& row, std::ostream& out) {
  out << row.steps << ',' << FormatDouble(row.sigma) << ','
      << FormatDouble(row.q) << ',' << FormatDouble(row.eps_rdp) << ','
      << FormatDouble(row.eps_tan) << ',' << (row.valid ? "true" : "false")
      << '\n';
}

}  // namespace tanscale

#endif  // TANSCALE_SERIALIZATION_H_
