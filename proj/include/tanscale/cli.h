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

// Subcommand implementations behind the tanscale command-line tool.
//
// Every command takes a run-spec document (see schemas/runspec.schema.json),
// writes its report to `out`, diagnostics to `err`, and returns the process
// exit code. Command-line flags are merged into the document by the caller
// before dispatch, so flags and spec-file keys are interchangeable.

#ifndef TANSCALE_CLI_H_
#define TANSCALE_CLI_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "tanscale/accountant.h"
#include "tanscale/dpsgd_sim.h"
#include "tanscale/errors.h"
#include "tanscale/planner.h"
#include "tanscale/privacy_params.h"
#include "tanscale/serialization.h"
#include "tanscale/tan.h"

namespace tanscale::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 2,
  kExitGridTruncated = 3,
  kExitUnwritable = 4,
};

namespace internal {

using nlohmann::json;

inline const std::map<std::string, std::set<std::string>>& AllowedKeys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"", {"privacy", "planner", "sim"}},
      {"privacy", {"N", "B", "S", "sigma", "delta"}},
      {"planner", {"learning_rate", "batches", "steps", "beta", "sweep"}},
      {"planner.sweep",
       {"eta", "delta", "steps", "sigma_min", "sigma_max", "resolution"}},
      {"sim",
       {"dimension", "num_samples", "clip_norm", "learning_rate",
        "augmult_order", "augmentation_noise_scale", "seed",
        "cluster_separation", "histogram_bins", "record_noise"}},
  };
  return keys;
}

inline std::string Join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

inline void CheckKeys(const json& node, const std::string& path) {
  const auto& allowed = AllowedKeys();
  const auto it = allowed.find(path);
  if (it == allowed.end()) return;
  if (!node.is_object()) {
    throw DomainError(path.empty() ? "spec" : path, "expected an object");
  }
  for (const auto& [key, value] : node.items()) {
    const std::string child = Join(path, key);
    if (!it->second.contains(key)) throw DomainError(child, "unknown key");
    CheckKeys(value, child);
  }
}

inline const json* Find(const json& node, const std::string& key) {
  if (!node.is_object()) return nullptr;
  const auto it = node.find(key);
  return it == node.end() ? nullptr : &*it;
}

inline double AsDouble(const json& v, const std::string& field) {
  if (!v.is_number()) throw DomainError(field, "expected a number");
  return v.get<double>();
}

inline std::int64_t AsInt(const json& v, const std::string& field) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isfinite(d) && d == std::floor(d) && std::fabs(d) < 9e15) {
      return static_cast<std::int64_t>(d);
    }
  }
  throw DomainError(field, "expected an integer");
}

inline const json& Required(const json& node, const std::string& path,
                            const std::string& key) {
  const json* v = Find(node, key);
  if (v == nullptr) throw DomainError(Join(path, key), "missing");
  return *v;
}

inline std::vector<double> AsDoubleList(const json& v,
                                        const std::string& field) {
  std::vector<double> out;
  if (v.is_array()) {
    for (const auto& e : v) out.push_back(AsDouble(e, field));
  } else {
    out.push_back(AsDouble(v, field));
  }
  if (out.empty()) throw DomainError(field, "list is empty");
  return out;
}

inline std::vector<std::int64_t> AsIntList(const json& v,
                                           const std::string& field) {
  std::vector<std::int64_t> out;
  if (v.is_array()) {
    for (const auto& e : v) out.push_back(AsInt(e, field));
  } else {
    out.push_back(AsInt(v, field));
  }
  if (out.empty()) throw DomainError(field, "list is empty");
  return out;
}

inline PrivacyParams ParsePrivacy(const json& spec) {
  const json* section = Find(spec, "privacy");
  if (section == nullptr) throw DomainError("privacy", "section missing");
  PrivacyParams p;
  p.dataset_size = AsInt(Required(*section, "", "N"), "N");
  p.batch_size = AsInt(Required(*section, "", "B"), "B");
  p.steps = AsInt(Required(*section, "", "S"), "S");
  p.noise_multiplier = AsDouble(Required(*section, "", "sigma"), "sigma");
  p.delta = AsDouble(Required(*section, "", "delta"), "delta");
  p.Validate();
  return p;
}

inline void PrintRow(std::ostream& out, const std::string& key,
                     const std::string& value) {
  out << std::left << std::setw(20) << key << value << '\n';
}

inline std::string TableValue(const json& v) {
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number()) return FormatDouble(v.get<double>());
  return v.get<std::string>();
}

}  // namespace internal

// Throws DomainError if the document contains keys outside the schema.
inline void ValidateSpec(const nlohmann::json& spec) {
  internal::CheckKeys(spec, "");
}

struct AccountOptions {
  bool json = false;
  bool strict = false;
};

// Reports eps_RDP with its minimizing order alongside the TAN summary.
inline int Account(const nlohmann::json& spec, const AccountOptions& options,
                   std::ostream& out, std::ostream& err) {
  try {
    ValidateSpec(spec);
    const PrivacyParams p = internal::ParsePrivacy(spec);
    const RdpAccount account = EpsilonRdp(p);
    const TanSummary tan = Summarize(p);
    const nlohmann::json report = {{"log_base", "e"},
                                   {"privacy", ToJson(p)},
                                   {"rdp", ToJson(account)},
                                   {"tan", ToJson(tan)}};
    if (options.json) {
      out << report.dump(2) << '\n';
    } else {
      for (const char* section : {"privacy", "rdp", "tan"}) {
        for (const auto& [key, value] : report[section].items()) {
          internal::PrintRow(out, key, internal::TableValue(value));
        }
      }
    }
    if (account.grid_truncated) {
      err << "warning: the largest Renyi order attains the minimum; eps_rdp "
             "may be loose\n";
      if (options.strict) return kExitGridTruncated;
    }
    return kExitOk;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
}

struct SweepOptions {
  std::optional<std::filesystem::path> out_dir;
  unsigned threads = 1;
};

inline std::vector<double> LinearGrid(double lo, double hi,
                                      std::int64_t points) {
  if (points == 1) return {lo};
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (std::int64_t i = 0; i < points; ++i) {
    grid[static_cast<std::size_t>(i)] =
        lo + (hi - lo) * static_cast<double>(i) /
                 static_cast<double>(points - 1);
  }
  return grid;
}

// Privacy-wall sweep over (S, sigma) at fixed eta; CSV ordered by (S, sigma).
inline int Sweep(const nlohmann::json& spec, const SweepOptions& options,
                 std::ostream& out, std::ostream& err) {
  std::vector<SweepRow> rows;
  try {
    ValidateSpec(spec);
    const nlohmann::json* planner = internal::Find(spec, "planner");
    const nlohmann::json* sweep =
        planner ? internal::Find(*planner, "sweep") : nullptr;
    if (sweep == nullptr) throw DomainError("planner.sweep", "section missing");
    const std::string path = "planner.sweep";
    const double eta = internal::AsDouble(
        internal::Required(*sweep, path, "eta"), "eta");
    const double delta = internal::AsDouble(
        internal::Required(*sweep, path, "delta"), "delta");
    std::vector<std::int64_t> steps = internal::AsIntList(
        internal::Required(*sweep, path, "steps"), "steps");
    const double lo = internal::AsDouble(
        internal::Required(*sweep, path, "sigma_min"), "sigma_min");
    const double hi = internal::AsDouble(
        internal::Required(*sweep, path, "sigma_max"), "sigma_max");
    const std::int64_t points = internal::AsInt(
        internal::Required(*sweep, path, "resolution"), "resolution");
    tanscale::internal::Require(points >= 1, "resolution",
                                "need at least one grid point");
    tanscale::internal::Require(lo > 0 && (hi > lo || (points == 1)),
                                "sigma_max",
                                "sigma range must satisfy 0 < min < max");
    tanscale::internal::Require(delta > 0 && delta < 1, "delta",
                                "delta must lie in (0, 1)");
    std::sort(steps.begin(), steps.end());
    steps.erase(std::unique(steps.begin(), steps.end()), steps.end());
    const std::vector<double> sigmas = LinearGrid(lo, hi, points);

    for (std::int64_t s : steps) {
      try {
        SweepResult r = PrivacyWallSweep(eta, delta, s, sigmas,
                                         AlphaGrid::Default(), options.threads);
        for (double sigma : r.skipped_sigmas) {
          err << "warning: skipped S=" << s << " sigma=" << FormatDouble(sigma)
              << " (q > 1)\n";
        }
        rows.insert(rows.end(), r.rows.begin(), r.rows.end());
      } catch (const InfeasibleError&) {
        err << "warning: no feasible sigma for S=" << s << '\n';
      }
    }
    if (rows.empty()) throw InfeasibleError("empty sweep: no feasible point");
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const InfeasibleError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  std::ostringstream csv;
  csv << kSweepCsvHeader << '\n';
  for (const SweepRow& row : rows) WriteSweepCsvRow(row, csv);
  if (options.out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(*options.out_dir, ec);
    std::ofstream file(*options.out_dir / "sweep.csv", std::ios::binary);
    if (ec || !file) {
      err << "error: cannot write to " << options.out_dir->string() << '\n';
      return kExitUnwritable;
    }
    file << csv.str();
    out << "wrote " << rows.size() << " rows to "
        << (*options.out_dir / "sweep.csv").string() << '\n';
  } else {
    out << csv.str();
  }
  return kExitOk;
}

struct PlanOptions {
  bool json = false;
};

// Builds a ScalingPlan from exactly one of planner.batches, planner.steps or
// planner.beta.
inline ScalingPlan BuildPlan(const nlohmann::json& spec) {
  ValidateSpec(spec);
  ReferenceConfig ref;
  ref.privacy = internal::ParsePrivacy(spec);
  const nlohmann::json* planner = internal::Find(spec, "planner");
  if (planner == nullptr) throw DomainError("planner", "section missing");
  if (const auto* lr = internal::Find(*planner, "learning_rate")) {
    ref.learning_rate = internal::AsDouble(*lr, "learning_rate");
  }
  ref.Validate();

  const auto* batches = internal::Find(*planner, "batches");
  const auto* steps = internal::Find(*planner, "steps");
  const auto* betas = internal::Find(*planner, "beta");
  const int families = (batches != nullptr) + (steps != nullptr) +
                       (betas != nullptr);
  if (families != 1) {
    throw DomainError("planner",
                      "exactly one of batches, steps or beta is required");
  }
  ScalingPlan plan;
  plan.reference = ref;
  if (batches != nullptr) {
    for (auto b : internal::AsIntList(*batches, "batches")) {
      plan.configs.push_back(BatchScaled(ref, b));
    }
  } else if (steps != nullptr) {
    for (auto s : internal::AsIntList(*steps, "steps")) {
      plan.configs.push_back(StepScaled(ref, s));
    }
  } else {
    for (double beta : internal::AsDoubleList(*betas, "beta")) {
      plan.configs.push_back(DataScaled(ref, beta));
    }
  }
  return plan;
}

inline nlohmann::json ToJson(const ScalingPlan& plan) {
  const RdpAccount account = EpsilonRdp(plan.reference.privacy);
  const TanSummary tan = Summarize(plan.reference.privacy);
  nlohmann::json configs = nlohmann::json::array();
  for (const auto& c : plan.configs) configs.push_back(tanscale::ToJson(c));
  return {{"log_base", "e"},
          {"reference",
           {{"privacy", tanscale::ToJson(plan.reference.privacy)},
            {"learning_rate", plan.reference.learning_rate},
            {"eps_rdp", account.epsilon},
            {"best_order", account.best_order},
            {"eps_tan", tan.eps_tan},
            {"eta", tan.eta}}},
          {"configs", std::move(configs)}};
}

inline int Plan(const nlohmann::json& spec, const PlanOptions& options,
                std::ostream& out, std::ostream& err) {
  ScalingPlan plan;
  try {
    plan = BuildPlan(spec);
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const InfeasibleError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  const nlohmann::json doc = ToJson(plan);
  if (options.json) {
    out << doc.dump(2) << '\n';
    return kExitOk;
  }
  const auto cell = [&](const std::string& s, int width) {
    out << std::left << std::setw(width) << s;
  };
  const auto print_row = [&](const std::string& kind, const PrivacyParams& p,
                             double lr, double factor, double eps, int order,
                             double eps_tan, const std::string& note) {
    cell(kind, 14);
    cell(std::to_string(p.dataset_size), 10);
    cell(std::to_string(p.batch_size), 8);
    cell(std::to_string(p.steps), 9);
    cell(FormatDouble(p.noise_multiplier), 14);
    cell(FormatDouble(p.delta), 10);
    cell(FormatDouble(lr), 10);
    cell(FormatDouble(factor), 16);
    cell(FormatDouble(eps), 16);
    cell(std::to_string(order), 7);
    cell(FormatDouble(eps_tan), 16);
    out << note << '\n';
  };
  cell("kind", 14);
  cell("N", 10);
  cell("B", 8);
  cell("S", 9);
  cell("sigma", 14);
  cell("delta", 10);
  cell("lr", 10);
  cell("compute_factor", 16);
  cell("eps_rdp", 16);
  cell("alpha", 7);
  cell("eps_tan", 16);
  out << "note\n";
  const auto& ref = doc["reference"];
  print_row("reference", plan.reference.privacy, plan.reference.learning_rate,
            1.0, ref["eps_rdp"].get<double>(), ref["best_order"].get<int>(),
            ref["eps_tan"].get<double>(), "");
  for (const auto& c : plan.configs) {
    std::string note;
    if (c.simulation_only) note = "simulation-only";
    if (c.exact_batch_size) note = "B_exact=" + FormatDouble(*c.exact_batch_size);
    if (c.global_snr) note = "N*eta=" + FormatDouble(*c.global_snr);
    if (c.grid_truncated) note += " grid-truncated";
    print_row(std::string(ToString(c.kind)), c.privacy, c.learning_rate,
              c.compute_factor, c.epsilon, c.best_order, c.eps_tan, note);
  }
  return kExitOk;
}

// Builds a SimConfig from the privacy and sim sections.
inline SimConfig ParseSimConfig(const nlohmann::json& spec) {
  ValidateSpec(spec);
  const nlohmann::json* sim = internal::Find(spec, "sim");
  if (sim == nullptr) throw DomainError("sim", "section missing");
  SimConfig cfg;
  cfg.privacy = internal::ParsePrivacy(spec);
  cfg.num_samples = static_cast<std::size_t>(cfg.privacy.dataset_size);
  const auto get_size = [&](const char* key, std::size_t& dst) {
    if (const auto* v = internal::Find(*sim, key)) {
      const std::int64_t i = internal::AsInt(*v, key);
      if (i < 0) throw DomainError(key, "must be non-negative");
      dst = static_cast<std::size_t>(i);
    }
  };
  const auto get_double = [&](const char* key, double& dst) {
    if (const auto* v = internal::Find(*sim, key)) {
      dst = internal::AsDouble(*v, key);
    }
  };
  get_size("dimension", cfg.dimension);
  get_size("num_samples", cfg.num_samples);
  get_double("clip_norm", cfg.clip_norm);
  get_double("learning_rate", cfg.learning_rate);
  get_size("augmult_order", cfg.augmult_order);
  get_double("augmentation_noise_scale", cfg.augmentation_noise_scale);
  get_double("cluster_separation", cfg.cluster_separation);
  get_size("histogram_bins", cfg.histogram_bins);
  if (const auto* v = internal::Find(*sim, "seed")) {
    if (!v->is_number_unsigned() &&
        !(v->is_number_integer() && v->get<std::int64_t>() >= 0)) {
      throw DomainError("seed", "expected a non-negative integer");
    }
    cfg.seed = v->get<std::uint64_t>();
  }
  if (const auto* v = internal::Find(*sim, "record_noise")) {
    if (!v->is_boolean()) throw DomainError("record_noise", "expected a bool");
    cfg.record_noise = v->get<bool>();
  }
  cfg.Validate();
  return cfg;
}

inline nlohmann::json ToJson(const SimConfig& cfg) {
  return {{"privacy", tanscale::ToJson(cfg.privacy)},
          {"dimension", cfg.dimension},
          {"num_samples", cfg.num_samples},
          {"clip_norm", cfg.clip_norm},
          {"learning_rate", cfg.learning_rate},
          {"augmult_order", cfg.augmult_order},
          {"augmentation_noise_scale", cfg.augmentation_noise_scale},
          {"seed", cfg.seed},
          {"cluster_separation", cfg.cluster_separation},
          {"histogram_bins", cfg.histogram_bins}};
}

struct SimulateOptions {
  std::filesystem::path out_dir = ".";
};

// Runs the toy trainer and writes report.json plus one
// hist_step_<step>.csv per checkpoint into the output directory.
inline int Simulate(const nlohmann::json& spec, const SimulateOptions& options,
                    std::ostream& out, std::ostream& err) {
  SimConfig cfg;
  try {
    cfg = ParseSimConfig(spec);
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  std::error_code ec;
  std::filesystem::create_directories(options.out_dir, ec);
  if (ec || !std::filesystem::is_directory(options.out_dir)) {
    err << "error: cannot create output directory "
        << options.out_dir.string() << '\n';
    return kExitUnwritable;
  }

  const SimReport report = Train(cfg);
  nlohmann::json doc = tanscale::ToJson(report);
  doc["config"] = ToJson(cfg);
  doc["noise_stats"]["expected_stddev"] =
      cfg.clip_norm * cfg.privacy.noise_multiplier /
      static_cast<double>(cfg.privacy.batch_size);

  {
    std::ofstream file(options.out_dir / "report.json", std::ios::binary);
    if (!file) {
      err << "error: cannot write " << (options.out_dir / "report.json").string()
          << '\n';
      return kExitUnwritable;
    }
    file << doc.dump(2) << '\n';
  }
  for (const auto& [step, h] : report.grad_norm_histograms) {
    const auto path =
        options.out_dir / ("hist_step_" + std::to_string(step) + ".csv");
    std::ofstream file(path, std::ios::binary);
    if (!file) {
      err << "error: cannot write " << path.string() << '\n';
      return kExitUnwritable;
    }
    WriteHistogramCsv(h, file);
  }

  internal::PrintRow(out, "final_loss",
                     FormatDouble(report.loss_trajectory.back().second));
  internal::PrintRow(out, "final_accuracy",
                     FormatDouble(report.final_accuracy));
  internal::PrintRow(out, "noise_mean", FormatDouble(report.noise_stats.mean));
  internal::PrintRow(out, "noise_stddev",
                     FormatDouble(report.noise_stats.stddev));
  internal::PrintRow(
      out, "expected_stddev",
      FormatDouble(doc["noise_stats"]["expected_stddev"].get<double>()));
  internal::PrintRow(out, "noise_count",
                     std::to_string(report.noise_stats.count));
  return kExitOk;
}

}  // namespace tanscale::cli

#endif  // TANSCALE_CLI_H_
