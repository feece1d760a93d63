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

#include "config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace infoprocure::cli {

namespace {

constexpr std::array<std::pair<ExperimentKind, std::string_view>, 6> kKindNames{{
    {ExperimentKind::kAuction, "auction"},
    {ExperimentKind::kBestResponse, "best-response"},
    {ExperimentKind::kParticipationMap, "participation-map"},
    {ExperimentKind::kKappaCurve, "kappa-curve"},
    {ExperimentKind::kFailureProb, "failure-prob"},
    {ExperimentKind::kSlackBounds, "slack-bounds"},
}};

// Recursively overlays `over` on `base`. Maps merge key by key; anything else
// is replaced. Original nodes are reused so their source marks survive.
YAML::Node merge(const YAML::Node& base, const YAML::Node& over) {
  if (!base.IsMap() || !over.IsMap()) return over;
  YAML::Node out(YAML::NodeType::Map);
  for (const auto& kv : base) out[kv.first.Scalar()] = kv.second;
  for (const auto& kv : over) {
    const std::string key = kv.first.Scalar();
    out[key] = base[key] ? merge(base[key], kv.second) : kv.second;
  }
  return out;
}

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& at, const std::string& message) const {
    std::ostringstream os;
    os << source_;
    if (at.IsDefined() && !at.Mark().is_null()) os << ':' << at.Mark().line + 1;
    os << ": " << message;
    throw ConfigError(os.str());
  }

  void check_keys(const YAML::Node& map, std::initializer_list<std::string_view> allowed,
                  const std::string& section) const {
    if (!map.IsMap()) fail(map, section + " must be a mapping");
    for (const auto& kv : map) {
      const std::string key = kv.first.Scalar();
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        fail(kv.first, "unknown key '" + key + "' in " + section);
      }
    }
  }

  double number(const YAML::Node& n, const std::string& what) const {
    if (!n.IsScalar()) fail(n, what + " must be a number");
    try {
      return n.as<double>();
    } catch (const YAML::Exception&) {
      fail(n, what + " must be a number, got '" + n.Scalar() + "'");
    }
  }

  double positive(const YAML::Node& n, const std::string& what) const {
    const double x = number(n, what);
    if (!(x > 0.0) || !std::isfinite(x)) fail(n, what + " must be positive");
    return x;
  }

  std::uint64_t uint64(const YAML::Node& n, const std::string& what) const {
    if (!n.IsScalar()) fail(n, what + " must be a nonnegative integer");
    try {
      return n.as<std::uint64_t>();
    } catch (const YAML::Exception&) {
      fail(n, what + " must be a nonnegative integer, got '" + n.Scalar() + "'");
    }
  }

  std::size_t count(const YAML::Node& n, const std::string& what, std::size_t min) const {
    const auto v = uint64(n, what);
    if (v < min) fail(n, what + " must be at least " + std::to_string(min));
    return static_cast<std::size_t>(v);
  }

  std::string string(const YAML::Node& n, const std::string& what) const {
    if (!n.IsScalar()) fail(n, what + " must be a string");
    return n.Scalar();
  }

  std::vector<double> positive_list(const YAML::Node& n, const std::string& what) const {
    if (!n.IsSequence() || n.size() == 0) fail(n, what + " must be a nonempty list");
    std::vector<double> out;
    for (const auto& item : n) out.push_back(positive(item, what + " entry"));
    return out;
  }

  std::vector<std::size_t> count_list(const YAML::Node& n, const std::string& what,
                                      std::size_t min) const {
    if (!n.IsSequence() || n.size() == 0) fail(n, what + " must be a nonempty list");
    std::vector<std::size_t> out;
    for (const auto& item : n) out.push_back(count(item, what + " entry", min));
    return out;
  }

  Interval interval(const YAML::Node& n, const std::string& what) const {
    if (!n.IsSequence() || n.size() != 2) fail(n, what + " must be a [lo, hi] pair");
    const double lo = positive(n[0], what + " lower end");
    const double hi = positive(n[1], what + " upper end");
    if (hi < lo) fail(n, what + " must satisfy lo <= hi");
    return {lo, hi};
  }

  GridSpec grid(const YAML::Node& n, const std::string& what, bool allow_zero_lo) const {
    check_keys(n, {"lo", "hi", "step"}, what);
    GridSpec g;
    g.lo = allow_zero_lo ? number(required(n, "lo", what), what + ".lo")
                         : positive(required(n, "lo", what), what + ".lo");
    if (g.lo < 0.0) fail(n["lo"], what + ".lo must be nonnegative");
    g.hi = number(required(n, "hi", what), what + ".hi");
    g.step = positive(required(n, "step", what), what + ".step");
    if (g.hi < g.lo) fail(n["hi"], what + ".hi must be >= lo");
    return g;
  }

  YAML::Node required(const YAML::Node& map, const char* key, const std::string& what) const {
    const YAML::Node n = map[key];
    if (!n) fail(map, what + " is missing required key '" + key + "'");
    return n;
  }

 private:
  std::string source_;
};

nlohmann::json grid_json(const GridSpec& g) { return {{"lo", g.lo}, {"hi", g.hi}, {"step", g.step}}; }

nlohmann::json echo_config(const ExperimentConfig& c) {
  nlohmann::json j;
  j["kind"] = std::string(kind_name(c.kind));
  j["preset"] = c.preset;
  j["seed"] = c.seed;
  j["prior"] = {{"cost", {c.prior.cost().lo, c.prior.cost().hi}},
                {"inv_fisher", {c.prior.inv_fisher().lo, c.prior.inv_fisher().hi}}};
  j["bounds"] = {{"cost", {c.bounds.c_lo(), c.bounds.c_hi()}},
                 {"inv_fisher", {c.bounds.v_lo(), c.bounds.v_hi()}}};
  j["mechanism"] = {{"betas", c.betas}, {"rho", c.rho}};
  j["simulation"] = {{"sellers", c.sellers}, {"reps", c.reps}};
  std::vector<std::string> rules;
  for (const auto& r : c.rules) rules.push_back(rule_name(r));
  j["rules"] = rules;
  switch (c.kind) {
    case ExperimentKind::kAuction:
      j["auction"] = {{"auctions", c.auction.auctions}};
      break;
    case ExperimentKind::kBestResponse:
      j["best_response"] = {{"cost", c.best_response.cost},
                            {"true_variances", c.best_response.true_variances},
                            {"report_grid", grid_json(c.best_response.report_grid)}};
      break;
    case ExperimentKind::kParticipationMap:
      j["participation"] = {
          {"cost_grid", grid_json(c.participation.cost_grid)},
          {"variance_grid", grid_json(c.participation.variance_grid)},
          {"report_grid",
           {{"below", c.participation.report_grid.below},
            {"above", c.participation.report_grid.above},
            {"step", c.participation.report_grid.step}}}};
      break;
    case ExperimentKind::kKappaCurve:
      j["kappa"] = {{"sellers", c.kappa.sellers},
                    {"score_prior", c.kappa.score_prior},
                    {"score_range", {c.kappa.score_lo, c.kappa.score_hi}},
                    {"s_grid", grid_json(c.kappa.s_grid)}};
      break;
    case ExperimentKind::kFailureProb:
      j["failure"] = {{"true_variance", c.failure.true_variance},
                      {"reported_variances", c.failure.reported_variances},
                      {"sample_sizes", c.failure.sample_sizes}};
      break;
    case ExperimentKind::kSlackBounds:
      j["slack"] = {{"betas", c.slack.betas},
                    {"envelope",
                     {{"c1", c.slack.c1}, {"c2", c.slack.c2}, {"c3", c.slack.c3}, {"c4", c.slack.c4}}}};
      break;
  }
  return j;
}

ExperimentConfig build(ExperimentKind kind, const YAML::Node& root, const Reader& rd) {
  ExperimentConfig c;
  c.kind = kind;
  rd.check_keys(root,
                {"kind", "seed", "prior", "bounds", "mechanism", "simulation", "rules", "auction",
                 "best_response", "participation", "kappa", "failure", "slack", "presets"},
                "configuration");

  if (const auto k = root["kind"]) {
    const auto parsed = parse_kind(rd.string(k, "kind"));
    if (!parsed) rd.fail(k, "unknown experiment kind '" + k.Scalar() + "'");
    if (*parsed != kind) {
      rd.fail(k, "configuration is for '" + k.Scalar() + "' but the command is '" +
                     std::string(kind_name(kind)) + "'");
    }
  }
  c.seed = rd.uint64(rd.required(root, "seed", "configuration"), "seed");

  if (const auto p = root["prior"]) {
    rd.check_keys(p, {"cost", "inv_fisher"}, "prior");
    c.prior = Prior(rd.interval(rd.required(p, "cost", "prior"), "prior.cost"),
                    rd.interval(rd.required(p, "inv_fisher", "prior"), "prior.inv_fisher"));
  }
  if (const auto b = root["bounds"]) {
    rd.check_keys(b, {"cost", "inv_fisher"}, "bounds");
    const auto bc = rd.interval(rd.required(b, "cost", "bounds"), "bounds.cost");
    const auto bv = rd.interval(rd.required(b, "inv_fisher", "bounds"), "bounds.inv_fisher");
    if (!(bc.lo < bc.hi)) rd.fail(b["cost"], "bounds.cost must satisfy lo < hi");
    if (!(bv.lo < bv.hi)) rd.fail(b["inv_fisher"], "bounds.inv_fisher must satisfy lo < hi");
    c.bounds = Bounds(bc.lo, bc.hi, bv.lo, bv.hi);
  } else {
    const auto& pc = c.prior.cost();
    const auto& pv = c.prior.inv_fisher();
    if (!(pc.lo < pc.hi) || !(pv.lo < pv.hi)) {
      rd.fail(root["prior"], "a degenerate prior needs explicit bounds");
    }
    c.bounds = Bounds(pc.lo, pc.hi, pv.lo, pv.hi);
  }
  if (!c.prior.within(c.bounds)) rd.fail(root["prior"], "prior support must lie within the bounds");

  if (const auto m = root["mechanism"]) {
    rd.check_keys(m, {"betas", "rho"}, "mechanism");
    if (m["betas"]) c.betas = rd.positive_list(m["betas"], "mechanism.betas");
    if (m["rho"]) {
      c.rho = rd.number(m["rho"], "mechanism.rho");
      if (!(c.rho > 0.0 && c.rho <= 1.0)) rd.fail(m["rho"], "mechanism.rho must lie in (0, 1]");
    }
  }
  if (const auto s = root["simulation"]) {
    rd.check_keys(s, {"sellers", "reps"}, "simulation");
    if (s["sellers"]) c.sellers = rd.count(s["sellers"], "simulation.sellers", 2);
    if (s["reps"]) c.reps = rd.count(s["reps"], "simulation.reps", 1);
  }
  if (const auto r = root["rules"]) {
    if (!r.IsSequence() || r.size() == 0) rd.fail(r, "rules must be a nonempty list");
    c.rules.clear();
    for (const auto& item : r) {
      try {
        c.rules.push_back(parse_rule(rd.string(item, "rule")));
      } catch (const DomainError& e) {
        rd.fail(item, e.what());
      }
    }
  }

  const auto in_cost = [&](double x) { return x >= c.bounds.c_lo() && x <= c.bounds.c_hi(); };
  const auto in_var = [&](double x) { return x >= c.bounds.v_lo() && x <= c.bounds.v_hi(); };

  if (const auto a = root["auction"]) {
    rd.check_keys(a, {"auctions"}, "auction");
    if (a["auctions"]) c.auction.auctions = rd.count(a["auctions"], "auction.auctions", 1);
  }
  if (const auto b = root["best_response"]) {
    rd.check_keys(b, {"cost", "true_variances", "report_grid"}, "best_response");
    if (b["cost"]) c.best_response.cost = rd.positive(b["cost"], "best_response.cost");
    if (!in_cost(c.best_response.cost)) rd.fail(b["cost"], "best_response.cost lies outside the bounds");
    if (b["true_variances"]) {
      c.best_response.true_variances =
          rd.positive_list(b["true_variances"], "best_response.true_variances");
      for (std::size_t i = 0; i < c.best_response.true_variances.size(); ++i) {
        if (!in_var(c.best_response.true_variances[i])) {
          rd.fail(b["true_variances"][i], "true variance lies outside the bounds");
        }
      }
    }
    if (b["report_grid"]) {
      c.best_response.report_grid = rd.grid(b["report_grid"], "best_response.report_grid", false);
      const auto& g = c.best_response.report_grid;
      if (!in_var(g.lo) || !in_var(g.hi)) {
        rd.fail(b["report_grid"], "best_response.report_grid must lie within the quality bounds");
      }
    }
  }
  if (const auto p = root["participation"]) {
    rd.check_keys(p, {"cost_grid", "variance_grid", "report_grid"}, "participation");
    auto& sec = c.participation;
    if (p["cost_grid"]) {
      sec.cost_grid = rd.grid(p["cost_grid"], "participation.cost_grid", false);
      if (!in_cost(sec.cost_grid.lo) || !in_cost(sec.cost_grid.hi)) {
        rd.fail(p["cost_grid"], "participation.cost_grid must lie within the cost bounds");
      }
    }
    if (p["variance_grid"]) {
      sec.variance_grid = rd.grid(p["variance_grid"], "participation.variance_grid", false);
      if (!in_var(sec.variance_grid.lo) || !in_var(sec.variance_grid.hi)) {
        rd.fail(p["variance_grid"], "participation.variance_grid must lie within the quality bounds");
      }
    }
    if (const auto rg = p["report_grid"]) {
      rd.check_keys(rg, {"below", "above", "step"}, "participation.report_grid");
      if (rg["below"]) {
        sec.report_grid.below = rd.number(rg["below"], "participation.report_grid.below");
        if (sec.report_grid.below < 0.0) rd.fail(rg["below"], "below must be nonnegative");
      }
      if (rg["above"]) {
        sec.report_grid.above = rd.number(rg["above"], "participation.report_grid.above");
        if (sec.report_grid.above < 0.0) rd.fail(rg["above"], "above must be nonnegative");
      }
      if (rg["step"]) sec.report_grid.step = rd.positive(rg["step"], "participation.report_grid.step");
    }
  }
  if (const auto k = root["kappa"]) {
    rd.check_keys(k, {"sellers", "score_prior", "score_range", "s_grid"}, "kappa");
    auto& sec = c.kappa;
    if (k["sellers"]) sec.sellers = rd.count_list(k["sellers"], "kappa.sellers", 2);
    if (k["score_prior"]) {
      sec.score_prior = rd.string(k["score_prior"], "kappa.score_prior");
      if (sec.score_prior != "uniform" && sec.score_prior != "prior") {
        rd.fail(k["score_prior"], "kappa.score_prior must be 'uniform' or 'prior'");
      }
    }
    if (const auto r = k["score_range"]) {
      if (!r.IsSequence() || r.size() != 2) rd.fail(r, "kappa.score_range must be a [lo, hi] pair");
      sec.score_lo = rd.number(r[0], "kappa.score_range lower end");
      sec.score_hi = rd.number(r[1], "kappa.score_range upper end");
      if (!(sec.score_lo >= 0.0 && sec.score_lo < sec.score_hi)) {
        rd.fail(r, "kappa.score_range must satisfy 0 <= lo < hi");
      }
    }
    if (sec.score_prior == "prior") {
      sec.score_lo = c.prior.cost().lo * c.prior.inv_fisher().lo;
      sec.score_hi = c.prior.cost().hi * c.prior.inv_fisher().hi;
    }
    if (k["s_grid"]) sec.s_grid = rd.grid(k["s_grid"], "kappa.s_grid", true);
    if (!(sec.s_grid.hi < sec.score_hi)) {
      rd.fail(k["s_grid"] ? k["s_grid"] : k, "kappa.s_grid must stay below the score support's upper end");
    }
  }
  if (const auto f = root["failure"]) {
    rd.check_keys(f, {"true_variance", "reported_variances", "sample_sizes"}, "failure");
    auto& sec = c.failure;
    if (f["true_variance"]) sec.true_variance = rd.positive(f["true_variance"], "failure.true_variance");
    if (f["reported_variances"]) {
      sec.reported_variances = rd.positive_list(f["reported_variances"], "failure.reported_variances");
    }
    if (f["sample_sizes"]) sec.sample_sizes = rd.count_list(f["sample_sizes"], "failure.sample_sizes", 2);
  }
  if (const auto s = root["slack"]) {
    rd.check_keys(s, {"betas", "envelope"}, "slack");
    if (s["betas"]) c.slack.betas = rd.positive_list(s["betas"], "slack.betas");
    if (const auto e = s["envelope"]) {
      rd.check_keys(e, {"c1", "c2", "c3", "c4"}, "slack.envelope");
      if (e["c1"]) c.slack.c1 = rd.positive(e["c1"], "slack.envelope.c1");
      if (e["c2"]) c.slack.c2 = rd.positive(e["c2"], "slack.envelope.c2");
      if (e["c3"]) c.slack.c3 = rd.positive(e["c3"], "slack.envelope.c3");
      if (e["c4"]) c.slack.c4 = rd.positive(e["c4"], "slack.envelope.c4");
    }
  }
  return c;
}

}  // namespace

std::string_view kind_name(ExperimentKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<ExperimentKind> parse_kind(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

const std::vector<ExperimentKind>& all_kinds() {
  static const std::vector<ExperimentKind> kinds = [] {
    std::vector<ExperimentKind> out;
    for (const auto& [k, name] : kKindNames) out.push_back(k);
    return out;
  }();
  return kinds;
}

ExperimentConfig parse_config(ExperimentKind kind, const std::string& text,
                              const std::string& source, const std::string& preset) {
  const Reader rd(source);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  if (!root.IsMap()) throw ConfigError(source + ": configuration must be a mapping");

  YAML::Node effective = root;
  if (!preset.empty()) {
    const auto presets = root["presets"];
    if (!presets || !presets.IsMap() || !presets[preset]) {
      throw ConfigError(source + ": no preset named '" + preset + "'");
    }
    const auto over = presets[preset];
    if (!over.IsMap()) rd.fail(over, "preset '" + preset + "' must be a mapping");
    if (over["presets"]) rd.fail(over["presets"], "presets cannot be nested");
    effective = merge(root, over);
  }

  ExperimentConfig c;
  try {
    c = build(kind, effective, rd);
  } catch (const DomainError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  c.preset = preset;
  c.source = source;
  c.echo = echo_config(c);
  return c;
}

ExperimentConfig load_config(ExperimentKind kind, const std::filesystem::path& path,
                             const std::string& preset) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open configuration file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(kind, ss.str(), path.string(), preset);
}

std::vector<std::string> list_presets(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open configuration file");
  std::ostringstream ss;
  ss << in.rdbuf();
  YAML::Node root;
  try {
    root = YAML::Load(ss.str());
  } catch (const YAML::ParserException& e) {
    throw ConfigError(path.string() + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  std::vector<std::string> names;
  if (root.IsMap() && root["presets"] && root["presets"].IsMap()) {
    for (const auto& kv : root["presets"]) names.push_back(kv.first.as<std::string>());
  }
  return names;
}

}  // namespace infoprocure::cli
