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

// infoprocure <experiment-kind> --config <path> [--preset <name>] [--out <dir>]
//             [--plot] [--threads N] [--overwrite]
//
// The default output directory is $INFOPROCURE_OUT_DIR, else ./results.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "config.hpp"
#include "experiments.hpp"
#include "infoprocure/version.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace infoprocure;
using namespace infoprocure::cli;

namespace {

constexpr const char* kOutDirEnv = "INFOPROCURE_OUT_DIR";

struct Options {
  std::string config;
  std::string preset;
  std::string out;
  bool plot = false;
  unsigned threads = 0;
  bool overwrite = false;
};

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  os << contents;
  if (!os) throw std::runtime_error("cannot write " + path.string());
}

int run(ExperimentKind kind, const Options& opt) {
  const ExperimentConfig config = load_config(kind, opt.config, opt.preset);

  fs::path out_dir = opt.out;
  if (out_dir.empty()) {
    const char* env = std::getenv(kOutDirEnv);
    out_dir = env && *env ? env : "results";
  }
  std::string stem(kind_name(kind));
  if (!opt.preset.empty()) stem += "_" + opt.preset;
  const fs::path csv = out_dir / (stem + ".csv");
  const fs::path manifest = out_dir / (stem + ".manifest.json");
  const fs::path plot = out_dir / (stem + ".svg");

  if (!opt.overwrite) {
    for (const auto& p : {csv, manifest, plot}) {
      if (p == plot && !opt.plot) continue;
      if (fs::exists(p)) {
        std::cerr << "error: " << p.string()
                  << " already exists (pass --overwrite to replace it)\n";
        return 3;
      }
    }
  }
  fs::create_directories(out_dir);

  const unsigned threads =
      opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  const auto start = std::chrono::steady_clock::now();
  const auto result = run_experiment(config, threads, opt.plot);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  write_file(csv, result.table.to_csv());
  if (result.plot) write_file(plot, *result.plot);

  nlohmann::json m;
  m["version"] = std::string(kVersion);
  m["kind"] = std::string(kind_name(kind));
  m["preset"] = opt.preset;
  m["config_path"] = opt.config;
  m["seed"] = config.seed;
  m["threads"] = threads;
  m["wall_time_seconds"] = wall;
  m["rows"] = result.table.rows.size();
  m["table"] = csv.filename().string();
  if (result.plot) m["plot"] = plot.filename().string();
  m["config"] = config.echo;
  write_file(manifest, m.dump(2) + "\n");

  fmt::print("{} ({} rows, {:.2f} s)\n", csv.string(), result.table.rows.size(), wall);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Procurement of statistical data under noisy verification: experiment runner"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  Options opt;
  for (auto kind : all_kinds()) {
    auto* sub = app.add_subcommand(std::string(kind_name(kind)));
    sub->add_option("--config", opt.config, "YAML experiment configuration")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--preset", opt.preset, "named preset inside the configuration");
    sub->add_option("--out", opt.out,
                    std::string("output directory (default $") + kOutDirEnv + " or ./results)");
    sub->add_flag("--plot", opt.plot, "also write an SVG plot");
    sub->add_option("--threads", opt.threads, "worker threads (default: all cores)")
        ->check(CLI::Range(1u, 1024u));
    sub->add_flag("--overwrite", opt.overwrite, "replace existing output files");
  }
  CLI11_PARSE(app, argc, argv);

  for (auto kind : all_kinds()) {
    if (!app.got_subcommand(std::string(kind_name(kind)))) continue;
    try {
      return run(kind, opt);
    } catch (const ConfigError& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return 2;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
  }
  return 1;
}
