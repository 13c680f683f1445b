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

#ifndef MBMRL_DYNAMICS_COLLECT_HPP_
#define MBMRL_DYNAMICS_COLLECT_HPP_

#include "mbmrl/dynamics/dataset.hpp"
#include "mbmrl/envs/env.hpp"
#include "mbmrl/sampler/sampler.hpp"

namespace mbmrl {

// Random controller: each episode follows one sequence from the constrained
// sampler, continuing a warm-up history of the env's initial action. No
// reward is optimized. Episodes that terminate early are kept up to the
// terminating transition.
inline Dataset collect_random_episodes(Env& env, const ConditionSpec& condition,
                                       const ConstraintLimits& lim,
                                       std::size_t n_episodes,
                                       std::size_t episode_len,
                                       std::uint64_t seed,
                                       std::size_t first_episode_id = 0) {
  if (n_episodes < 1) throw ConfigError("collect: n_episodes must be >= 1");
  const EnvDescriptor desc = env.descriptor();
  check_dim(lim.dims(), desc.action_dim, "collect limits");
  Dataset d(desc.state_dim, desc.action_dim, condition.tag(),
            {{"env", descriptor_to_json(desc)},
             {"condition", condition_to_json(condition)},
             {"seed", seed},
             {"controller", "random"}});
  if (episode_len == 0) return d;
  for (std::size_t e = 0; e < n_episodes; ++e) {
    State s = env.reset(condition, derive_seed(seed, 2 * e));
    const ActionHistory hist = ActionHistory::constant(env.initial_action());
    const SequenceBatch seq =
        sample_sequences(hist, lim, episode_len, 1, derive_seed(seed, 2 * e + 1));
    for (std::size_t t = 0; t < episode_len; ++t) {
      const Action a = seq.action(t, 0);
      StepResult r = env.step(a);
      if (!r.state.allFinite()) break;
      d.add(first_episode_id + e, t, s, a, r.state);
      s = std::move(r.state);
      if (r.done) break;
    }
  }
  return d;
}

}  // namespace mbmrl

#endif  // MBMRL_DYNAMICS_COLLECT_HPP_
