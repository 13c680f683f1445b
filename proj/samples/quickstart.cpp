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

// Trains a small expert on the friction cart, then runs one MPC episode on a
// slippery floor and prints the tracking error.

#include <iostream>

#include "mbmrl/mbmrl.hpp"

int main() {
  using namespace mbmrl;
  FrictionCartEnv env;
  const ConstraintLimits lim = env.default_limits();

  EpisodeConfig ep;
  ep.steps = 250;
  ep.limits = lim;
  ep.mpc.horizon = 10;
  ep.mpc.population = 100;

  ExpertConfig cfg;
  cfg.n_init = 2;
  cfg.n_training = 4;
  cfg.steps = 250;
  cfg.hidden = {32, 32};
  cfg.train.epochs = 30;
  cfg.seed = 11;

  ExpertResult res = train_expert(
      env, ConditionSpec::friction(0.8), cfg, ep,
      [](const EpisodeMetrics& m, const EpisodeLog&) {
        std::cout << m.controller << " episode " << m.episode
                  << "  tracking error " << m.tracking_error << "\n";
      });

  FixedModel provider(res.model);
  ep.seed = 99;
  EpisodeLog log = run_episode(env, ConditionSpec::friction(0.3), provider, ep);
  std::cout << "mu=0.3 tracking error " << log.mean_tracking_error() << "\n";
  return 0;
}
