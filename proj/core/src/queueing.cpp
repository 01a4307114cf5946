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

#include "noi/queueing.hpp"

#include <string>

#include "noi/error.hpp"

namespace noi {

double kingman_wait(double rho, double ca2, double cs2, double mu) {
  if (rho >= 1.0) throw Error(ErrorCode::UnstableQueue, "utilization " + std::to_string(rho) + " >= 1");
  if (rho < 0.0 || ca2 < 0.0 || cs2 < 0.0 || !(mu > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "kingman_wait arguments out of range");
  }
  return rho / (1.0 - rho) * 0.5 * (ca2 + cs2) / mu;
}

double cut_roofline(double cap_gbps, double q_bytes) {
  if (!(cap_gbps > 0.0) || !(q_bytes > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "cut_roofline needs positive capacity and bytes per token");
  }
  return cap_gbps * 1e9 / q_bytes;
}

double utilization_relief(double lambda, double mu_before, double mu_after) {
  if (!(mu_before > 0.0) || mu_after < mu_before || lambda < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "utilization_relief needs mu_after >= mu_before > 0");
  }
  return lambda * (1.0 / mu_before - 1.0 / mu_after);
}

double split_queue_wait(double rho_total, int k, double ca2, double cs2, double mu) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "queue count must be >= 1");
  return kingman_wait(rho_total / k, ca2, cs2, mu);
}

}  // namespace noi
