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

#ifndef MBMRL_DYNAMICS_DATASET_HPP_
#define MBMRL_DYNAMICS_DATASET_HPP_

#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>

#include "json.hpp"
#include "mbmrl/common.hpp"
#include "mbmrl/nn/weights_io.hpp"

namespace mbmrl {

struct Transition {
  std::size_t episode = 0;
  std::size_t step = 0;
  State s;
  Action a;
  State s_next;
};

// Ordered transitions gathered under one condition. The tag is fixed at
// construction.
class Dataset {
 public:
  Dataset(std::size_t state_dim, std::size_t action_dim, std::string tag = "",
          nlohmann::json metadata = nlohmann::json::object())
      : state_dim_(state_dim),
        action_dim_(action_dim),
        tag_(std::move(tag)),
        metadata_(std::move(metadata)) {
    if (state_dim == 0 || action_dim == 0) {
      throw ConfigError("dataset: state and action dims must be >= 1");
    }
  }

  std::size_t state_dim() const { return state_dim_; }
  std::size_t action_dim() const { return action_dim_; }
  const std::string& tag() const { return tag_; }
  const nlohmann::json& metadata() const { return metadata_; }
  nlohmann::json& metadata() { return metadata_; }

  // 0 keeps everything; otherwise the oldest transitions are evicted.
  void set_capacity(std::size_t cap) {
    capacity_ = cap;
    evict();
  }
  std::size_t capacity() const { return capacity_; }

  void add(Transition t) {
    check_dim(static_cast<std::size_t>(t.s.size()), state_dim_, "dataset s");
    check_dim(static_cast<std::size_t>(t.a.size()), action_dim_, "dataset a");
    check_dim(static_cast<std::size_t>(t.s_next.size()), state_dim_,
              "dataset s_next");
    if (!t.s.allFinite() || !t.a.allFinite() || !t.s_next.allFinite()) {
      throw ConfigError("dataset: non-finite transition");
    }
    auto it = last_step_.find(t.episode);
    if (it != last_step_.end() && t.step <= it->second) {
      throw ConfigError(str_cat("dataset: episode ", t.episode,
                                " steps out of order (", t.step, " after ",
                                it->second, ")"));
    }
    last_step_[t.episode] = t.step;
    items_.push_back(std::move(t));
    evict();
  }

  void add(std::size_t episode, std::size_t step, const State& s,
           const Action& a, const State& s_next) {
    add(Transition{episode, step, s, a, s_next});
  }

  void append(const Dataset& other) {
    check_dim(other.state_dim_, state_dim_, "dataset append state");
    check_dim(other.action_dim_, action_dim_, "dataset append action");
    for (const auto& t : other.items_) add(t);
  }

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const Transition& operator[](std::size_t i) const { return items_[i]; }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }

  // Next unused episode id.
  std::size_t next_episode() const {
    return last_step_.empty() ? 0 : last_step_.rbegin()->first + 1;
  }

  // Columns are [s; a] for each transition.
  Matrix inputs() const {
    Matrix x(static_cast<Eigen::Index>(state_dim_ + action_dim_),
             static_cast<Eigen::Index>(size()));
    for (std::size_t i = 0; i < size(); ++i) {
      const auto c = static_cast<Eigen::Index>(i);
      x.col(c).head(static_cast<Eigen::Index>(state_dim_)) = items_[i].s;
      x.col(c).tail(static_cast<Eigen::Index>(action_dim_)) = items_[i].a;
    }
    return x;
  }

  // Columns are s_next - s.
  Matrix deltas() const {
    Matrix d(static_cast<Eigen::Index>(state_dim_),
             static_cast<Eigen::Index>(size()));
    for (std::size_t i = 0; i < size(); ++i) {
      d.col(static_cast<Eigen::Index>(i)) = items_[i].s_next - items_[i].s;
    }
    return d;
  }

 private:
  void evict() {
    while (capacity_ > 0 && items_.size() > capacity_) items_.pop_front();
  }

  std::size_t state_dim_;
  std::size_t action_dim_;
  std::string tag_;
  nlohmann::json metadata_;
  std::size_t capacity_ = 0;
  std::deque<Transition> items_;
  std::map<std::size_t, std::size_t> last_step_;
};

namespace internal {

inline std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace internal

// <stem>.csv with header episode,step,s_0..,a_0..,sn_0.. and <stem>.json.
inline void save_dataset(const std::filesystem::path& stem, const Dataset& d) {
  std::filesystem::path csv = stem;
  csv += ".csv";
  std::filesystem::path meta = stem;
  meta += ".json";
  std::ofstream out(csv, std::ios::trunc);
  if (!out) throw IoError(str_cat("cannot open ", csv.string()));
  out << "episode,step";
  for (std::size_t i = 0; i < d.state_dim(); ++i) out << ",s_" << i;
  for (std::size_t i = 0; i < d.action_dim(); ++i) out << ",a_" << i;
  for (std::size_t i = 0; i < d.state_dim(); ++i) out << ",sn_" << i;
  out << "\n";
  for (const Transition& t : d) {
    out << t.episode << "," << t.step;
    for (Eigen::Index i = 0; i < t.s.size(); ++i) out << "," << internal::fmt_double(t.s[i]);
    for (Eigen::Index i = 0; i < t.a.size(); ++i) out << "," << internal::fmt_double(t.a[i]);
    for (Eigen::Index i = 0; i < t.s_next.size(); ++i) {
      out << "," << internal::fmt_double(t.s_next[i]);
    }
    out << "\n";
  }
  if (!out) throw IoError(str_cat("write failed: ", csv.string()));

  nlohmann::json j = d.metadata();
  j["tag"] = d.tag();
  j["state_dim"] = d.state_dim();
  j["action_dim"] = d.action_dim();
  j["num_transitions"] = d.size();
  j["data_file"] = csv.filename().string();
  j["created_at"] = nn::utc_timestamp();
  std::ofstream mo(meta, std::ios::trunc);
  if (!mo) throw IoError(str_cat("cannot open ", meta.string()));
  mo << j.dump(2) << "\n";
}

inline Dataset load_dataset(const std::filesystem::path& stem) {
  std::filesystem::path meta = stem;
  meta += ".json";
  nlohmann::json j = nn::read_json_file(meta);
  const auto sd = j.at("state_dim").get<std::size_t>();
  const auto ad = j.at("action_dim").get<std::size_t>();
  const std::string tag = j.value("tag", "");
  std::filesystem::path csv =
      stem.parent_path() / j.value("data_file", stem.filename().string() + ".csv");
  nlohmann::json md = j;
  for (const char* k : {"tag", "state_dim", "action_dim", "num_transitions",
                        "data_file", "created_at"}) {
    md.erase(k);
  }
  Dataset d(sd, ad, tag, md);

  std::ifstream in(csv);
  if (!in) throw IoError(str_cat("cannot open ", csv.string()));
  std::string line;
  if (!std::getline(in, line)) throw IoError(str_cat(csv.string(), ": empty"));
  const std::size_t cols = 2 + 2 * sd + ad;
  if (internal::split_csv(line).size() != cols) {
    throw IoError(str_cat(csv.string(), ": header does not match dims"));
  }
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto f = internal::split_csv(line);
    if (f.size() != cols) {
      throw IoError(str_cat(csv.string(), ": row ", row, " has ", f.size(),
                            " fields"));
    }
    try {
      Transition t;
      t.episode = std::stoull(f[0]);
      t.step = std::stoull(f[1]);
      t.s.resize(static_cast<Eigen::Index>(sd));
      t.a.resize(static_cast<Eigen::Index>(ad));
      t.s_next.resize(static_cast<Eigen::Index>(sd));
      std::size_t k = 2;
      for (std::size_t i = 0; i < sd; ++i) t.s[static_cast<Eigen::Index>(i)] = std::stod(f[k++]);
      for (std::size_t i = 0; i < ad; ++i) t.a[static_cast<Eigen::Index>(i)] = std::stod(f[k++]);
      for (std::size_t i = 0; i < sd; ++i) {
        t.s_next[static_cast<Eigen::Index>(i)] = std::stod(f[k++]);
      }
      d.add(std::move(t));
    } catch (const std::logic_error& e) {
      throw IoError(str_cat(csv.string(), ": row ", row, ": ", e.what()));
    }
  }
  if (j.contains("num_transitions") &&
      j.at("num_transitions").get<std::size_t>() != d.size()) {
    throw IoError(str_cat(csv.string(), ": transition count mismatch"));
  }
  return d;
}

}  // namespace mbmrl

#endif  // MBMRL_DYNAMICS_DATASET_HPP_
