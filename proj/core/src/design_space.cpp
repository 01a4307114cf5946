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

#include "noi/design_space.hpp"

#include <string>

#include "noi/error.hpp"

namespace noi {

BigInt binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  BigInt result = 1;
  for (unsigned i = 1; i <= k; ++i) {
    result *= n - k + i;
    result /= i;  // exact: result is C(n-k+i, i) after this step
  }
  return result;
}

BigInt design_space_lower_bound(long long nodes, long long links) {
  if (nodes < 0) throw Error(ErrorCode::InvalidArgument, "node count must be >= 0");
  const long long pairs = nodes * (nodes - 1) / 2;
  if (links < 0 || links > pairs) {
    throw Error(ErrorCode::LOutOfRange,
                "L=" + std::to_string(links) + " outside [0, " + std::to_string(pairs) + "]");
  }
  return binomial(static_cast<unsigned>(pairs), static_cast<unsigned>(links));
}

}  // namespace noi
