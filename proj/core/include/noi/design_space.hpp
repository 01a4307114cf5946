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

#include <boost/multiprecision/cpp_int.hpp>

namespace noi {

using BigInt = boost::multiprecision::cpp_int;

/// Exact binomial coefficient.
BigInt binomial(unsigned n, unsigned k);

/// Lower bound on the number of L-link topologies over N chiplets ignoring
/// port caps: C(C(N, 2), L). Throws LOutOfRange unless 0 <= L <= N(N-1)/2.
BigInt design_space_lower_bound(long long nodes, long long links);

}  // namespace noi
