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

// tanscale: privacy accounting, TAN summaries, privacy-wall sweeps, constant-
// TAN planning and toy DP-SGD simulation.
//
//   tanscale account  --N 1281167 --B 16384 --S 72000 --sigma 2.5 --delta 8e-7
//   tanscale sweep    --eta 0.95 --delta 1e-6 --steps 1000 10000 ...
//   tanscale plan     --spec ref.json --steps 18000
//   tanscale simulate --spec sim.json --out results/

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tanscale/cli.h"

namespace {

using nlohmann::json;

// Flags are collected into a document of overrides and merged over the spec
// file once parsing is done, so that flags win regardless of their order.
class Overrides {
 public:
  template <typename T>
  CLI::Option* Add(CLI::App* app, const std::string& flag,
                   const std::string& pointer, const std::string& help) {
    return app->add_option_function<T>(
        flag,
        [this, pointer](const T& value) {
          doc_[json::json_pointer(pointer)] = value;
        },
        help);
  }

  const json& doc() const { return doc_; }

 private:
  json doc_ = json::object();
};

void AddPrivacyFlags(CLI::App* app, Overrides& o) {
  o.Add<std::int64_t>(app, "--N", "/privacy/N", "dataset size");
  o.Add<std::int64_t>(app, "--B", "/privacy/B", "expected batch size");
  o.Add<std::int64_t>(app, "--S", "/privacy/S", "number of steps");
  o.Add<double>(app, "--sigma", "/privacy/sigma", "noise multiplier");
  o.Add<double>(app, "--delta", "/privacy/delta", "target delta");
}

// Returns the merged run spec, or an exit code on failure.
int LoadSpec(const std::string& path, const json& overrides, json& spec) {
  spec = json::object();
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) {
      std::cerr << "error: spec: cannot read " << path << '\n';
      return tanscale::cli::kExitValidation;
    }
    try {
      spec = json::parse(in);
    } catch (const json::parse_error& e) {
      std::cerr << "error: spec: " << e.what() << '\n';
      return tanscale::cli::kExitValidation;
    }
    if (!spec.is_object()) {
      std::cerr << "error: spec: top level must be an object\n";
      return tanscale::cli::kExitValidation;
    }
  }
  spec.merge_patch(overrides);
  return tanscale::cli::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TAN-based differential privacy accounting and planning"};
  app.require_subcommand(1);

  std::string spec_path;
  std::string out_dir;
  bool as_json = false;
  bool strict = false;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  Overrides overrides;

  auto* account = app.add_subcommand(
      "account", "eps_RDP and TAN summary for one configuration");
  account->add_option("--spec", spec_path, "run spec JSON file");
  account->add_flag("--json", as_json, "emit JSON");
  account->add_flag("--strict", strict,
                    "exit 3 when the Renyi-order grid truncates the minimum");
  AddPrivacyFlags(account, overrides);

  auto* sweep = app.add_subcommand(
      "sweep", "privacy-wall sweep of eps_RDP over (S, sigma) at fixed eta");
  sweep->add_option("--spec", spec_path, "run spec JSON file");
  sweep->add_option("--out", out_dir, "write sweep.csv into this directory");
  sweep->add_option("--threads", threads, "worker threads");
  overrides.Add<double>(sweep, "--eta", "/planner/sweep/eta",
                        "individual signal-to-noise ratio");
  overrides.Add<double>(sweep, "--delta", "/planner/sweep/delta",
                        "target delta");
  overrides.Add<std::vector<std::int64_t>>(sweep, "--steps",
                                           "/planner/sweep/steps",
                                           "step counts");
  overrides.Add<double>(sweep, "--sigma-min", "/planner/sweep/sigma_min",
                        "smallest sigma");
  overrides.Add<double>(sweep, "--sigma-max", "/planner/sweep/sigma_max",
                        "largest sigma");
  overrides.Add<std::int64_t>(sweep, "--resolution",
                              "/planner/sweep/resolution",
                              "number of sigma grid points");

  auto* plan = app.add_subcommand(
      "plan", "constant-TAN configurations derived from a reference run");
  plan->add_option("--spec", spec_path, "run spec JSON file");
  plan->add_flag("--json", as_json, "emit JSON");
  AddPrivacyFlags(plan, overrides);
  overrides.Add<double>(plan, "--learning-rate", "/planner/learning_rate",
                        "reference learning rate");
  overrides.Add<std::vector<std::int64_t>>(plan, "--batches",
                                           "/planner/batches",
                                           "batch-scaled targets");
  overrides.Add<std::vector<std::int64_t>>(plan, "--steps", "/planner/steps",
                                           "step-scaled targets");
  overrides.Add<std::vector<double>>(plan, "--beta", "/planner/beta",
                                     "data-scaled multipliers");

  auto* simulate =
      app.add_subcommand("simulate", "run the toy DP-SGD simulator");
  simulate->add_option("--spec", spec_path, "run spec JSON file");
  simulate->add_option("--out", out_dir,
                       "output directory (default: current directory)");
  AddPrivacyFlags(simulate, overrides);
  overrides.Add<std::int64_t>(simulate, "--dimension", "/sim/dimension",
                              "feature dimension");
  overrides.Add<std::int64_t>(simulate, "--num-samples", "/sim/num_samples",
                              "dataset size (must equal --N)");
  overrides.Add<double>(simulate, "--clip-norm", "/sim/clip_norm",
                        "per-sample clipping norm C");
  overrides.Add<double>(simulate, "--learning-rate", "/sim/learning_rate",
                        "learning rate");
  overrides.Add<std::int64_t>(simulate, "--augmult-order",
                              "/sim/augmult_order",
                              "augmentations per sample K");
  overrides.Add<double>(simulate, "--augmentation-noise-scale",
                        "/sim/augmentation_noise_scale",
                        "feature perturbation scale");
  overrides.Add<std::uint64_t>(simulate, "--seed", "/sim/seed", "random seed");
  overrides.Add<double>(simulate, "--cluster-separation",
                        "/sim/cluster_separation",
                        "distance of each cluster mean from the origin");
  overrides.Add<std::int64_t>(simulate, "--histogram-bins",
                              "/sim/histogram_bins",
                              "gradient-norm histogram bins");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : tanscale::cli::kExitValidation;
  }

  json spec;
  if (int rc = LoadSpec(spec_path, overrides.doc(), spec); rc != 0) return rc;

  if (account->parsed()) {
    return tanscale::cli::Account(spec, {.json = as_json, .strict = strict},
                                  std::cout, std::cerr);
  }
  if (sweep->parsed()) {
    tanscale::cli::SweepOptions options;
    if (!out_dir.empty()) options.out_dir = out_dir;
    options.threads = threads;
    return tanscale::cli::Sweep(spec, options, std::cout, std::cerr);
  }
  if (plan->parsed()) {
    return tanscale::cli::Plan(spec, {.json = as_json}, std::cout, std::cerr);
  }
  tanscale::cli::SimulateOptions options;
  options.out_dir = out_dir.empty() ? "." : out_dir;
  return tanscale::cli::Simulate(spec, options, std::cout, std::cerr);
}
