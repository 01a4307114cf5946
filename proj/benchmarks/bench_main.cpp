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


#include <benchmark/benchmark.h>

#include "noi/baselines.hpp"
#include "noi/graph.hpp"
#include "noi/interference.hpp"
#include "noi/queueing.hpp"
#include "noi/simulator.hpp"
#include "noi/traffic.hpp"

namespace {

void BM_Simulate(benchmark::State& state) {
  const noi::Topology canvas = noi::default_canvas();
  noi::WorkloadSpec w;
  w.rho_target = 0.85;
  noi::SimConfig cfg;
  cfg.warmup_ns = 10000.0;
  cfg.measure_ns = static_cast<double>(state.range(0));
  const noi::TrafficTrace trace = noi::generate_trace(w, canvas, cfg.warmup_ns + cfg.measure_ns, 1);
  std::uint64_t events = 0;
  for (auto _ : state) {
    const noi::SimReport r = noi::simulate(canvas, trace, cfg);
    events += r.events;
    benchmark::DoNotOptimize(r.cut_goodput_gbps);
  }
  state.counters["events/s"] = benchmark::Counter(static_cast<double>(events), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_Simulate)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

void BM_MaxFlow(benchmark::State& state) {
  noi::BaselineParams p;
  p.kind = noi::BaselineKind::mesh2d;
  p.rows = static_cast<int>(state.range(0));
  p.cols = static_cast<int>(state.range(0));
  const auto n = static_cast<noi::NodeId>(p.rows * p.cols);
  const noi::Topology t = noi::build_baseline(p, noi::simple_placement(n, {0, n - 1}));
  for (auto _ : state) {
    benchmark::DoNotOptimize(noi::max_flow(t, t.memory_nodes(), t.compute_nodes()).value);
  }
}
BENCHMARK(BM_MaxFlow)->Arg(4)->Arg(8)->Arg(16);

void BM_ProxyEval(benchmark::State& state) {
  const noi::Topology canvas = noi::default_canvas();
  const noi::WorkloadSpec w;
  for (auto _ : state) {
    benchmark::DoNotOptimize(noi::analytic_proxy_eval(canvas, w).throughput_proxy);
  }
}
BENCHMARK(BM_ProxyEval);

void BM_TraceGen(benchmark::State& state) {
  const noi::Topology canvas = noi::default_canvas();
  const noi::WorkloadSpec w;
  for (auto _ : state) {
    benchmark::DoNotOptimize(noi::generate_trace(w, canvas, 1e6, 1).events.size());
  }
}
BENCHMARK(BM_TraceGen)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
