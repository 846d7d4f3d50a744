// Copyright 2026 The smad Authors
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

// Umbrella header.

#include "smad/binary_io.hpp"
#include "smad/bsif_bank.hpp"
#include "smad/bundle.hpp"
#include "smad/classifiers.hpp"
#include "smad/config.hpp"
#include "smad/descriptors.hpp"
#include "smad/detector.hpp"
#include "smad/error.hpp"
#include "smad/experiment.hpp"
#include "smad/feature_cache.hpp"
#include "smad/features.hpp"
#include "smad/fusion.hpp"
#include "smad/imaging.hpp"
#include "smad/manifest.hpp"
#include "smad/metrics.hpp"
#include "smad/runner.hpp"
#include "smad/scalespace.hpp"
#include "smad/synth.hpp"
