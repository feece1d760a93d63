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

// Experiment runners. Each kind produces one results table with a fixed
// header:
//
//   auction            rule,beta,auction,winner,winner_score,second_score,
//                      unit_payment,quantity,voided,winner_utility,
//                      principal_loss,first_best_loss,relative_regret,
//                      regret_bound
//   best-response      rule,beta,true_variance,reported_variance,
//                      utility_mean,utility_se
//   participation-map  rule,beta,cost,true_variance,optimal_report,
//                      utility_mean,utility_se,participates
//   kappa-curve        m,s,kappa_hat,se
//   failure-prob       rule,true_variance,reported_variance,n,reps,failure_prob
//   slack-bounds       beta,N,slack_lower,slack_upper
//
// Reals are written with 17 significant digits.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "config.hpp"

namespace infoprocure::cli {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Header line plus one line per row, LF-terminated.
  std::string to_csv() const;
};

std::string format_real(double x);

struct ExperimentResult {
  Table table;
  /// SVG document, produced only when plotting was requested.
  std::optional<std::string> plot;
};

const std::vector<std::string>& table_header(ExperimentKind kind);

ExperimentResult run_experiment(const ExperimentConfig& config, unsigned threads,
                                bool plot = false);

}  // namespace infoprocure::cli
