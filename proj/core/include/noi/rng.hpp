/*
 * Copyright 2026 The noiwb Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace noi {

/// Engine used for every stochastic component. All randomness in the
/// workbench is derived from explicit seeds; nothing reads the wall clock.
using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

/// Derives an independent seed for the named substream `tag` (and optional
/// index) of `master`. Used to give traces, experts, policies and evaluation
/// runs non-overlapping generator state.
std::uint64_t substream(std::uint64_t master, std::string_view tag, std::uint64_t index = 0);

/// Counter-based uniform in (0, 1): a pure function of its arguments, so a
/// draw does not depend on how many other draws happened before it.
double hashed_uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c);

}  // namespace noi
