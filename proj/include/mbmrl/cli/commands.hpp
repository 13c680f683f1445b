// Copyright 2026 The mbmrl Authors
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

#ifndef MBMRL_CLI_COMMANDS_HPP_
#define MBMRL_CLI_COMMANDS_HPP_

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "mbmrl/cli/config.hpp"
#include "mbmrl/cli/table.hpp"
#include "mbmrl/meta/meta_train.hpp"
#include "mbmrl/stats/ttest.hpp"

namespace mbmrl::cli {

namespace fs = std::filesystem;

inline void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError(str_cat("cannot open ", path.string()));
  out << j.dump(2) << "\n";
}

inline fs::path prepare_out(const RunConfig& cfg, const char* command) {
  const fs::path out = cfg.out;
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw IoError(str_cat("cannot create ", out.string(), ": ", ec.message()));
  nlohmann::json j = run_config_to_json(cfg);
  j["command"] = command;
  write_json(out / "config.resolved.json", j);
  return out;
}

inline Table episode_metrics_table(const std::vector<EpisodeMetrics>& eps) {
  Table t;
  t.header = {"episode",        "controller",   "steps",         "tracking_error",
              "tracking_reward", "total_reward", "odometry",      "mean_abs_jerk",
              "terminated_early", "train_loss"};
  for (const auto& m : eps) {
    t.rows.push_back({std::to_string(m.episode), m.controller, std::to_string(m.steps),
                      num(m.tracking_error), num(m.tracking_reward), num(m.total_reward),
                      num(m.odometry), num(m.mean_abs_jerk),
                      m.terminated_early ? "1" : "0",
                      std::isnan(m.train_loss) ? "" : num(m.train_loss)});
  }
  return t;
}

// ----- train-expert ----- //

inline ExpertResult cmd_train_expert(const RunConfig& cfg) {
  auto env = cfg.make();
  const fs::path out = prepare_out(cfg, "train-expert");
  const EpisodeConfig ep = cfg.episode_config(*env, cfg.expert.steps);
  ExpertResult res = train_expert(*env, cfg.condition, cfg.expert, ep);

  save_model(out / "model", res.model,
             {{"env", descriptor_to_json(env->descriptor())},
              {"condition", condition_to_json(cfg.condition)},
              {"train", train_config_to_json(cfg.expert.train)}});
  save_dataset(out / "dataset", res.dataset);
  episode_metrics_table(res.episodes).save(out / "episodes.csv");

  Table loss;
  loss.header = {"round", "epoch", "loss"};
  for (std::size_t r = 0; r < res.reports.size(); ++r) {
    for (std::size_t e = 0; e < res.reports[r].epoch_loss.size(); ++e) {
      loss.rows.push_back({std::to_string(r), std::to_string(e),
                           num(res.reports[r].epoch_loss[e])});
    }
  }
  loss.save(out / "loss_curve.csv");
  return res;
}

// ----- meta-train ----- //

inline MetaModel cmd_meta_train(const RunConfig& cfg) {
  if (cfg.meta_datasets.size() < 2) {
    throw ConfigError("meta-train: need at least 2 datasets (meta_datasets)");
  }
  std::vector<Dataset> ds;
  for (const auto& p : cfg.meta_datasets) ds.push_back(load_dataset(p));
  const fs::path out = prepare_out(cfg, "meta-train");
  MetaTrainReport report;
  MetaModel mm = meta_train(ds, cfg.meta, &report);
  save_meta_model(out / "meta", mm, {{"meta", meta_config_to_json(cfg.meta)},
                                     {"datasets", cfg.meta_datasets}});
  Table curve;
  curve.header = {"outer_step", "condition", "inner_start_loss"};
  for (std::size_t n = 0; n < report.inner_start_loss.size(); ++n) {
    curve.rows.push_back({std::to_string(n), std::to_string(n % ds.size()),
                          num(report.inner_start_loss[n])});
  }
  curve.save(out / "meta_curve.csv");
  Table fin;
  fin.header = {"condition", "tag", "loss"};
  for (std::size_t i = 0; i < report.final_condition_loss.size(); ++i) {
    fin.rows.push_back({std::to_string(i), mm.tags[i], num(report.final_condition_loss[i])});
  }
  fin.save(out / "meta_condition_loss.csv");
  return mm;
}

// ----- eval ----- //

struct EvalRow {
  std::string model;
  std::string kind;
  std::string condition;
  std::size_t episode = 0;
  EpisodeMetrics metrics;
};

inline std::string sanitize(std::string s) {
  for (char& c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' && c != '-') c = '_';
  }
  return s;
}

// Runs every model on every condition. Episode e uses the same seed for
// every model and condition, so rows pair up across models.
inline std::vector<EvalRow> cmd_eval(const RunConfig& cfg) {
  auto env = cfg.make();
  const fs::path out = prepare_out(cfg, "eval");
  std::vector<std::string> conds = cfg.eval.conditions;
  if (conds.empty()) conds.push_back(condition_to_json(cfg.condition).dump());
  if (cfg.eval.episodes > 0 && cfg.eval.models.empty()) {
    throw ConfigError("eval: no models given");
  }
  if (!cfg.eval.labels.empty() && cfg.eval.labels.size() != cfg.eval.models.size()) {
    throw ConfigError("eval: labels must match models one to one");
  }
  if (cfg.eval.save_logs) fs::create_directories(out / "logs");

  std::vector<EvalRow> rows;
  for (std::size_t mi = 0; mi < cfg.eval.models.size() && cfg.eval.episodes > 0; ++mi) {
    const std::string& stem = cfg.eval.models[mi];
    const std::string label =
        cfg.eval.labels.empty() ? fs::path(stem).parent_path().filename().string() +
                                      "/" + fs::path(stem).filename().string()
                                : cfg.eval.labels[mi];
    const nlohmann::json side = nn::read_json_file(stem + ".json");
    const bool is_meta = side.value("kind", "expert") == "meta";
    std::optional<MetaModel> mm;
    std::optional<DynamicsModel> expert;
    if (is_meta) {
      mm = load_meta_model(stem);
    } else {
      expert = load_model(stem).model;
    }
    const std::size_t sd = is_meta ? mm->model.state_dim() : expert->state_dim();
    check_dim(sd, env->descriptor().state_dim, "eval model state");

    for (std::size_t ci = 0; ci < conds.size(); ++ci) {
      const ConditionSpec cond = parse_condition(conds[ci]);
      for (std::size_t e = 0; e < cfg.eval.episodes; ++e) {
        EpisodeConfig ec = cfg.episode_config(*env, cfg.eval.steps);
        ec.seed = derive_seed(cfg.seed, e);
        EpisodeLog log;
        if (is_meta) {
          MetaAdapter ad(*mm, cfg.adapt);
          log = run_episode(*env, cond, ad, ec);
        } else {
          FixedModel fm(*expert);
          log = run_episode(*env, cond, fm, ec);
        }
        EvalRow r{label, is_meta ? "meta" : "expert", cond.tag(), e,
                  episode_metrics(log, cfg.reward.velocity_index)};
        r.metrics.episode = e;
        r.metrics.controller = r.kind;
        if (cfg.eval.save_logs) {
          log.header = {{"model", label},
                        {"model_path", stem},
                        {"condition", condition_to_json(cond)},
                        {"episode", e},
                        {"seed", ec.seed}};
          save_episode(out / "logs" / str_cat("m", mi, "_c", ci, "_e", e), log);
        }
        rows.push_back(std::move(r));
      }
    }
  }

  Table t;
  t.header = {"model", "kind", "condition", "episode", "steps", "tracking_error",
              "tracking_reward", "total_reward", "odometry", "mean_abs_jerk",
              "terminated_early"};
  for (const auto& r : rows) {
    const auto& m = r.metrics;
    t.rows.push_back({r.model, r.kind, sanitize(r.condition), std::to_string(r.episode),
                      std::to_string(m.steps), num(m.tracking_error),
                      num(m.tracking_reward), num(m.total_reward), num(m.odometry),
                      num(m.mean_abs_jerk), m.terminated_early ? "1" : "0"});
  }
  t.save(out / "metrics.csv");

  // model x condition summary (the expert-by-condition grid)
  Table s;
  s.header = {"model", "condition", "n", "success_rate", "tracking_error_mean",
              "tracking_error_sd", "odometry_mean", "odometry_sd"};
  std::map<std::pair<std::string, std::string>, std::vector<const EvalRow*>> groups;
  std::vector<std::pair<std::string, std::string>> order;
  for (const auto& r : rows) {
    auto key = std::make_pair(r.model, r.condition);
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(&r);
  }
  for (const auto& key : order) {
    const auto& g = groups[key];
    std::vector<double> err, odo;
    std::size_t ok = 0;
    for (const EvalRow* r : g) {
      err.push_back(r->metrics.tracking_error);
      odo.push_back(r->metrics.odometry);
      ok += r->metrics.terminated_early ? 0 : 1;
    }
    const auto se = stats::summarize(err);
    const auto so = stats::summarize(odo);
    s.rows.push_back({key.first, sanitize(key.second), std::to_string(g.size()),
                      num(static_cast<double>(ok) / static_cast<double>(g.size())),
                      num(se.mean), num(se.sd), num(so.mean), num(so.sd)});
  }
  s.save(out / "summary.csv");
  return rows;
}

// ----- compare ----- //

// Welch t-test for every numeric metric column shared by two tables with the
// same header. Identifier columns are skipped.
inline nlohmann::json cmd_compare(const fs::path& a_path, const fs::path& b_path) {
  const Table a = read_table(a_path);
  const Table b = read_table(b_path);
  if (a.header != b.header) throw ConfigError("compare: tables have different columns");
  nlohmann::json report = {{"a", a_path.string()}, {"b", b_path.string()},
                           {"test", "welch"}, {"metrics", nlohmann::json::object()}};
  for (std::size_t c = 0; c < a.header.size(); ++c) {
    const std::string& name = a.header[c];
    if (name == "episode" || name == "seed" || name == "step") continue;
    auto va = a.numeric(c);
    auto vb = b.numeric(c);
    if (!va || !vb) continue;
    if (va->size() < 2 || vb->size() < 2) {
      throw ConfigError(str_cat("compare: metric '", name, "' has n=", va->size(),
                                " vs n=", vb->size(),
                                "; a t-test needs at least 2 rows per table"));
    }
    const auto sa = stats::summarize(*va);
    const auto sb = stats::summarize(*vb);
    const auto r = stats::welch_t_test(*va, *vb);
    std::string verdict = "n.s.";
    if (r.p < 0.05) verdict = r.mean_diff < 0.0 ? "a<b" : "a>b";
    report["metrics"][name] = {{"n_a", sa.n},     {"n_b", sb.n},   {"mean_a", sa.mean},
                               {"mean_b", sb.mean}, {"sd_a", sa.sd}, {"sd_b", sb.sd},
                               {"t", std::isfinite(r.t) ? nlohmann::json(r.t) : nlohmann::json(nullptr)},
                               {"df", r.df},      {"p", r.p},      {"stars", stats::stars(r.p)},
                               {"verdict", verdict}};
  }
  return report;
}

// ----- replay ----- //

// Re-emits plot-ready traces from a saved episode log.
inline void cmd_replay(const fs::path& log_stem, const fs::path& out) {
  fs::path csv = log_stem;
  csv += ".csv";
  const Table t = read_table(csv);
  fs::create_directories(out);
  const auto time = t.column("time");
  const auto vdes = t.column("v_des");
  const auto odo = t.column("odometry");
  const auto idx = t.column("condition_idx");
  if (!time || !vdes || !idx) throw IoError(str_cat(csv.string(), ": not an episode log"));

  Table vel;
  vel.header = {"time", "v", "v_des", "odometry"};
  Table cond;
  cond.header = {"time", "condition_idx"};
  std::vector<std::size_t> loss_cols;
  for (std::size_t c = 0; c < t.header.size(); ++c) {
    if (t.header[c].rfind("loss_", 0) == 0) {
      loss_cols.push_back(c);
      cond.header.push_back(t.header[c]);
    }
  }
  const auto v = t.column("s_0");
  for (const auto& r : t.rows) {
    vel.rows.push_back({r[*time], v ? r[*v] : "", r[*vdes], odo ? r[*odo] : ""});
    std::vector<std::string> cr = {r[*time], r[*idx]};
    for (std::size_t c : loss_cols) cr.push_back(r[c]);
    cond.rows.push_back(std::move(cr));
  }
  vel.save(out / "velocity_trace.csv");
  cond.save(out / "condition_trace.csv");
}

}  // namespace mbmrl::cli

#endif  // MBMRL_CLI_COMMANDS_HPP_
