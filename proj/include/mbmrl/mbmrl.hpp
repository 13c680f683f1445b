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

#ifndef MBMRL_MBMRL_HPP_
#define MBMRL_MBMRL_HPP_

#include "mbmrl/common.hpp"
#include "mbmrl/dynamics/collect.hpp"
#include "mbmrl/dynamics/dataset.hpp"
#include "mbmrl/dynamics/model.hpp"
#include "mbmrl/dynamics/normalizer.hpp"
#include "mbmrl/dynamics/train.hpp"
#include "mbmrl/envs/condition.hpp"
#include "mbmrl/envs/env.hpp"
#include "mbmrl/envs/friction_cart.hpp"
#include "mbmrl/envs/linear_env.hpp"
#include "mbmrl/envs/registry.hpp"
#include "mbmrl/meta/adapt.hpp"
#include "mbmrl/meta/meta_model.hpp"
#include "mbmrl/meta/meta_train.hpp"
#include "mbmrl/mpc/episode.hpp"
#include "mbmrl/mpc/mbrl.hpp"
#include "mbmrl/mpc/planner.hpp"
#include "mbmrl/mpc/reward.hpp"
#include "mbmrl/nn/adam.hpp"
#include "mbmrl/nn/mlp.hpp"
#include "mbmrl/nn/weights_io.hpp"
#include "mbmrl/sampler/limits.hpp"
#include "mbmrl/sampler/sampler.hpp"
#include "mbmrl/stats/ttest.hpp"

#endif  // MBMRL_MBMRL_HPP_
