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

#pragma once

#include "infoprocure/core.hpp"
#include "infoprocure/mechanism.hpp"
#include "infoprocure/normal.hpp"
#include "infoprocure/parallel.hpp"
#include "infoprocure/rng.hpp"
#include "infoprocure/simulate.hpp"
#include "infoprocure/verification.hpp"
#include "infoprocure/version.hpp"
