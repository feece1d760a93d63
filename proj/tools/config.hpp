// Copyright 2026 The infoprocure Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Experiment configuration: a YAML file with optional named presets that
// override the top-level settings. Every numeric field is validated before
// any computation starts; errors carry the file and line of the offending
// entry.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "infoprocure/core.hpp"
#include "infoprocure/simulate.hpp"
#include "infoprocure/verification.hpp"
#include "json.hpp"

namespace infoprocure::cli {

enum class ExperimentKind {
  kAuction,
  kBestResponse,
  kParticipationMap,
  kKappaCurve,
  kFailureProb,
  kSlackBounds,
};

std::string_view kind_name(ExperimentKind kind);
std::optional<ExperimentKind> parse_kind(std::string_view name);
const std::vector<ExperimentKind>& all_kinds();

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GridSpec {
  double lo = 0.0;
  double hi = 0.0;
  double step = 1.0;

  std::vector<double> points() const { return linear_grid(lo, hi, step); }
};

struct AuctionSection {
  std::size_t auctions = 1000;
};

struct BestResponseSection {
  double cost = 0.12;
  std::vector<double> true_variances{10, 11, 12, 13, 14};
  GridSpec report_grid{10, 16, 0.25};
};

struct ParticipationSection {
  GridSpec cost_grid{0.11, 0.19, 0.01};
  GridSpec variance_grid{10, 20, 1};
  ReportGridSpec report_grid{10, 10, 0.25};
};

struct KappaSection {
  std::vector<std::size_t> sellers{10, 100};
  /// "uniform" scores on [score_lo, score_hi], or "prior" for c * V.
  std::string score_prior = "uniform";
  double score_lo = 0.0;
  double score_hi = 1.0;
  GridSpec s_grid{0.05, 0.8, 0.05};
};

struct FailureSection {
  double true_variance = 10.0;
  std::vector<double> reported_variances{10.0};
  std::vector<std::size_t> sample_sizes{50, 158, 200, 500};
};

struct SlackSection {
  std::vector<double> betas{1e2, 1e3, 1e4, 1e5, 1e6};
  double c1 = 1.0, c2 = 1.0, c3 = 1.0, c4 = 1.0;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kAuction;
  std::string preset;
  std::string source;
  std::uint64_t seed = 0;

  Prior prior{{0.1, 0.2}, {10.0, 20.0}};
  Bounds bounds{0.1, 0.2, 10.0, 20.0};
  std::vector<double> betas{1000.0};
  double rho = 1.0;
  std::size_t sellers = 10;
  std::size_t reps = 5000;
  std::vector<VerificationRule> rules{LcbRule(0.05)};

  AuctionSection auction;
  BestResponseSection best_response;
  ParticipationSection participation;
  KappaSection kappa;
  FailureSection failure;
  SlackSection slack;

  /// Effective configuration after preset merging, echoed in the manifest.
  nlohmann::json echo;
};

/// Parses YAML text. `source` names the text in error messages.
ExperimentConfig parse_config(ExperimentKind kind, const std::string& text,
                              const std::string& source, const std::string& preset = "");

ExperimentConfig load_config(ExperimentKind kind, const std::filesystem::path& path,
                             const std::string& preset = "");

/// Names under the file's `presets:` block, in file order.
std::vector<std::string> list_presets(const std::filesystem::path& path);

}  // namespace infoprocure::cli
