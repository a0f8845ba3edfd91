// Copyright 2026 The capisdr Authors.
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

#include "capisdr/assignment.hpp"
#include "capisdr/dataset.hpp"
#include "capisdr/error.hpp"
#include "capisdr/evaluate.hpp"
#include "capisdr/grouping.hpp"
#include "capisdr/losses.hpp"
#include "capisdr/manifest.hpp"
#include "capisdr/metrics.hpp"
#include "capisdr/rng.hpp"
#include "capisdr/signal.hpp"
#include "capisdr/synth.hpp"
#include "capisdr/wav.hpp"
