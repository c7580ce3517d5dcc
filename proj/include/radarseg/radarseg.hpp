// SPDX-License-Identifier: Apache-2.0
//
// Umbrella header: the whole point-cloud segmentation toolkit.
#pragma once

#include "radarseg/config_json.hpp"
#include "radarseg/errors.hpp"
#include "radarseg/features.hpp"
#include "radarseg/gmm.hpp"
#include "radarseg/io.hpp"
#include "radarseg/labeling.hpp"
#include "radarseg/metrics.hpp"
#include "radarseg/pipeline.hpp"
#include "radarseg/rng.hpp"
#include "radarseg/simulator.hpp"
#include "radarseg/types.hpp"
#include "radarseg/version.hpp"
