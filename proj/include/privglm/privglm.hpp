// Copyright 2026 The PrivGLM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PRIVGLM_PRIVGLM_HPP
#define PRIVGLM_PRIVGLM_HPP

#include "privglm/csv.hpp"
#include "privglm/dp_gd.hpp"
#include "privglm/dp_iht.hpp"
#include "privglm/errors.hpp"
#include "privglm/experiments.hpp"
#include "privglm/glm.hpp"
#include "privglm/mechanisms.hpp"
#include "privglm/rng.hpp"
#include "privglm/score_attack.hpp"
#include "privglm/synthetic.hpp"

#endif  // PRIVGLM_PRIVGLM_HPP
