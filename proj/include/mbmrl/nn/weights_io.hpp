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

#ifndef MBMRL_NN_WEIGHTS_IO_HPP_
#define MBMRL_NN_WEIGHTS_IO_HPP_

#include <bit>
#include <chrono>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"
#include "mbmrl/nn/mlp.hpp"

namespace mbmrl::nn {

inline constexpr int kWeightFormatVersion = 1;

// UTC wall clock, ISO-8601. The only non-reproducible field in any artifact.
inline std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline nlohmann::json spec_to_json(const MlpSpec& spec) {
  return {{"input_dim", spec.input_dim},
          {"hidden_dims", spec.hidden_dims},
          {"output_dim", spec.output_dim},
          {"activation", "relu"}};
}

inline MlpSpec spec_from_json(const nlohmann::json& j) {
  MlpSpec spec;
  spec.input_dim = j.at("input_dim").get<std::size_t>();
  spec.hidden_dims = j.at("hidden_dims").get<std::vector<std::size_t>>();
  spec.output_dim = j.at("output_dim").get<std::size_t>();
  if (j.value("activation", "relu") != "relu") {
    throw IoError("weights: unsupported activation");
  }
  spec.validate();
  return spec;
}

namespace internal {

inline std::uint64_t to_little_endian(std::uint64_t x) {
  if constexpr (std::endian::native == std::endian::big) {
    x = ((x & 0x00000000000000ffULL) << 56) |
        ((x & 0x000000000000ff00ULL) << 40) |
        ((x & 0x0000000000ff0000ULL) << 24) |
        ((x & 0x00000000ff000000ULL) << 8) |
        ((x & 0x000000ff00000000ULL) >> 8) |
        ((x & 0x0000ff0000000000ULL) >> 24) |
        ((x & 0x00ff000000000000ULL) >> 40) |
        ((x & 0xff00000000000000ULL) >> 56);
  }
  return x;
}

}  // namespace internal

// Flat little-endian IEEE-754 doubles in ModelWeights::flat() order.
inline void write_weights_binary(const std::filesystem::path& path,
                                 const Vector& flat) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(str_cat("cannot open ", path.string()));
  for (Eigen::Index i = 0; i < flat.size(); ++i) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(flat[i]);
    bits = internal::to_little_endian(bits);
    char buf[8];
    std::memcpy(buf, &bits, 8);
    out.write(buf, 8);
  }
  if (!out) throw IoError(str_cat("write failed: ", path.string()));
}

inline Vector read_weights_binary(const std::filesystem::path& path,
                                  std::size_t expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(str_cat("cannot open ", path.string()));
  Vector flat(static_cast<Eigen::Index>(expected));
  for (std::size_t i = 0; i < expected; ++i) {
    char buf[8];
    if (!in.read(buf, 8)) {
      throw IoError(str_cat(path.string(), ": truncated weight file"));
    }
    std::uint64_t bits;
    std::memcpy(&bits, buf, 8);
    flat[static_cast<Eigen::Index>(i)] =
        std::bit_cast<double>(internal::to_little_endian(bits));
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw IoError(str_cat(path.string(), ": trailing bytes in weight file"));
  }
  return flat;
}

// Writes <stem>.bin and <stem>.json; `extra` is merged into the sidecar.
inline void save_weights(const std::filesystem::path& stem,
                         const ModelWeights& w,
                         const nlohmann::json& extra = nlohmann::json::object()) {
  std::filesystem::path bin = stem;
  bin += ".bin";
  std::filesystem::path meta = stem;
  meta += ".json";
  write_weights_binary(bin, w.flat());

  nlohmann::json j = extra;
  j["format_version"] = kWeightFormatVersion;
  j["spec"] = spec_to_json(w.spec());
  j["seed"] = w.seed();
  j["num_params"] = w.size();
  j["weights_file"] = bin.filename().string();
  j["layout"] = "per layer: weight (out x in, column-major) then bias";
  j["created_at"] = utc_timestamp();
  std::ofstream out(meta, std::ios::trunc);
  if (!out) throw IoError(str_cat("cannot open ", meta.string()));
  out << j.dump(2) << "\n";
}

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(str_cat("cannot open ", path.string()));
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(str_cat(path.string(), ": ", e.what()));
  }
}

struct LoadedWeights {
  ModelWeights weights;
  nlohmann::json sidecar;
};

inline LoadedWeights load_weights(const std::filesystem::path& stem) {
  std::filesystem::path meta = stem;
  meta += ".json";
  nlohmann::json j = read_json_file(meta);
  if (j.value("format_version", 0) != kWeightFormatVersion) {
    throw IoError(str_cat(meta.string(), ": unsupported format version"));
  }
  MlpSpec spec = spec_from_json(j.at("spec"));
  ModelWeights w(spec, j.value("seed", std::uint64_t{0}));
  std::filesystem::path bin = stem.parent_path() /
                              j.value("weights_file", stem.filename().string() + ".bin");
  w.flat() = read_weights_binary(bin, spec.num_params());
  if (!w.flat().allFinite()) throw IoError("weights: non-finite entries");
  return {std::move(w), std::move(j)};
}

}  // namespace mbmrl::nn

#endif  // MBMRL_NN_WEIGHTS_IO_HPP_
