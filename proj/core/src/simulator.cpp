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

#include "noi/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>

#include <boost/math/special_functions/erf.hpp>

#include "noi/error.hpp"
#include "noi/rng.hpp"

namespace noi {

void SimConfig::check() const {
  if (!(packet_bytes > 0.0)) throw Error(ErrorCode::InvalidArgument, "packet_bytes must be > 0");
  if (!(measure_ns > 0.0)) throw Error(ErrorCode::InvalidArgument, "measure_ns must be > 0");
  if (warmup_ns < 0.0 || router_delay_ns < 0.0) throw Error(ErrorCode::InvalidArgument, "negative time");
  if (!(util_window_ns > 0.0)) throw Error(ErrorCode::InvalidArgument, "util_window_ns must be > 0");
  if (hbm_gbps < 0.0 || hbm_service_scv < 0.0) throw Error(ErrorCode::InvalidArgument, "bad HBM stage");
}

double SimReport::total_tokens_per_s() const {
  double total = 0.0;
  for (double x : expert_tokens_per_s) total += x;
  return total;
}

double percentile(std::vector<double> samples, double q) {
  if (samples.empty()) throw Error(ErrorCode::EmptySamples, "percentile of no samples");
  if (!(q > 0.0 && q <= 1.0)) throw Error(ErrorCode::InvalidArgument, "percentile q must be in (0, 1]");
  auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(samples.size())));
  rank = std::clamp<std::size_t>(rank, 1, samples.size());
  std::nth_element(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(rank - 1), samples.end());
  return samples[rank - 1];
}

LatencySummary summarize(const std::vector<double>& samples) {
  LatencySummary s;
  s.count = samples.size();
  if (samples.empty()) return s;
  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  double sum = 0.0;
  for (double x : sorted) sum += x;
  s.mean = sum / static_cast<double>(sorted.size());
  auto at = [&](double q) {
    const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
    return sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1];
  };
  s.p50 = at(0.50);
  s.p95 = at(0.95);
  s.p99 = at(0.99);
  s.max = sorted.back();
  return s;
}

namespace {

enum class EventKind : std::uint8_t { hbm_done, link_done, arrive };

struct Event {
  double time;
  std::uint64_t seq;
  EventKind kind;
  std::uint32_t index;
};

struct Later {
  bool operator()(const Event& a, const Event& b) const {
    return a.time != b.time ? a.time > b.time : a.seq > b.seq;
  }
};

struct TreeEdge {
  NodeId from;
  NodeId to;
  std::uint32_t link;
};

struct FlowState {
  std::vector<TreeEdge> edges;
  std::uint64_t remaining = 0;
  std::uint64_t delivered_bytes = 0;
  double completion = -1.0;
};

struct Packet {
  std::uint32_t flow;
  std::uint32_t bytes;
  NodeId at;
  double enqueued;
};

struct LinkState {
  NodeId from = 0;
  NodeId to = 0;
  double bandwidth = 0.0;
  bool cut = false;
  bool busy = false;
  std::uint32_t in_service = 0;
  std::deque<std::uint32_t> queue;
};

struct HbmServer {
  double free_at = 0.0;
};

class Engine {
 public:
  Engine(const Topology& t, const TrafficTrace& trace, const SimConfig& cfg)
      : t_(t), trace_(trace), cfg_(cfg), routes_(t) {
    start_ = cfg.warmup_ns;
    end_ = cfg.warmup_ns + cfg.measure_ns;
    links_.resize(2 * t.link_count());
    for (std::size_t i = 0; i < t.link_count(); ++i) {
      const Link& l = t.links()[i];
      const bool cut = t.is_memory(l.a) != t.is_memory(l.b);
      links_[2 * i] = {l.a, l.b, l.bandwidth_gbps, cut && t.is_memory(l.a), false, 0, {}};
      links_[2 * i + 1] = {l.b, l.a, l.bandwidth_gbps, cut && t.is_memory(l.b), false, 0, {}};
    }
    hbm_.resize(t.node_count());
    windows_ = static_cast<std::size_t>(std::ceil(cfg.measure_ns / cfg.util_window_ns));
    report_.window_start_ns = start_;
    report_.window_end_ns = end_;
    report_.clock_ghz = cfg.clock_ghz;
    report_.expert_tokens.assign(static_cast<std::size_t>(std::max(trace.experts, 0)), 0);
    report_.utilization.assign(links_.size(), std::vector<double>(windows_, 0.0));
    report_.queue_delay_ns.assign(links_.size(), {});
    report_.link_utilization.assign(links_.size(), 0.0);
  }

  SimReport run() {
    const double stop = cfg_.drain ? std::numeric_limits<double>::infinity() : end_;
    const auto& events = trace_.events;
    std::size_t next_flow = 0;
    flows_.reserve(events.size());
    double now = 0.0;
    for (;;) {
      const bool have_flow = next_flow < events.size() && events[next_flow].timestamp_ns < end_;
      const bool have_event = !heap_.empty();
      if (!have_flow && !have_event) break;
      if (have_flow && (!have_event || events[next_flow].timestamp_ns <= heap_.top().time)) {
        now = events[next_flow].timestamp_ns;
        if (now > stop) break;
        inject(next_flow++, now);
        continue;
      }
      const Event ev = heap_.top();
      if (ev.time > stop) break;
      heap_.pop();
      now = ev.time;
      ++report_.events;
      switch (ev.kind) {
        case EventKind::hbm_done: forward(ev.index, now); break;
        case EventKind::link_done: link_done(ev.index, now); break;
        case EventKind::arrive: forward(ev.index, now); break;
      }
    }
    report_.end_time_ns = now;
    finish();
    return std::move(report_);
  }

 private:
  bool in_window(double t) const { return t >= start_ && t < end_; }

  void push(double time, EventKind kind, std::uint32_t index) { heap_.push({time, seq_++, kind, index}); }

  std::uint32_t new_packet(const Packet& p) {
    if (!free_.empty()) {
      const std::uint32_t id = free_.back();
      free_.pop_back();
      packets_[id] = p;
      return id;
    }
    packets_.push_back(p);
    return static_cast<std::uint32_t>(packets_.size() - 1);
  }

  void inject(std::size_t index, double now) {
    const FlowEvent& ev = trace_.events[index];
    FlowState fs;
    if (ev.destinations.size() == 1) {
      const auto path = routes_.route(ev.source, ev.destinations[0], cfg_.routing, ev.uid(), cfg_.seed);
      for (std::size_t i = 1; i < path.size(); ++i) {
        fs.edges.push_back({path[i - 1], path[i],
                            static_cast<std::uint32_t>(directed_link(t_, path[i - 1], path[i]))});
      }
    } else {
      for (auto [a, b] : routes_.multicast_tree(ev.source, ev.destinations)) {
        fs.edges.push_back({a, b, static_cast<std::uint32_t>(directed_link(t_, a, b))});
      }
    }
    const auto pkt = static_cast<std::uint64_t>(cfg_.packet_bytes);
    const std::uint64_t count = std::max<std::uint64_t>(1, (ev.bytes + pkt - 1) / pkt);
    fs.remaining = count * ev.destinations.size();
    const std::uint64_t injected = ev.bytes * ev.destinations.size();
    report_.injected_bytes += injected;
    report_.packets_injected += count;
    if (cfg_.record_flows) report_.flows.push_back({ev.uid(), injected, 0, -1.0});
    flows_.push_back(std::move(fs));
    const auto flow_id = static_cast<std::uint32_t>(flows_.size() - 1);
    const bool hbm = cfg_.hbm_gbps > 0.0 && t_.is_memory(ev.source);
    for (std::uint64_t i = 0; i < count; ++i) {
      const std::uint64_t bytes = i + 1 < count ? pkt : ev.bytes - pkt * (count - 1);
      const std::uint32_t id = new_packet({flow_id, static_cast<std::uint32_t>(bytes), ev.source, now});
      if (!hbm) {
        forward(id, now);
        continue;
      }
      HbmServer& server = hbm_[ev.source];
      const double begin = std::max(now, server.free_at);
      server.free_at = begin + hbm_service(ev.uid(), i, static_cast<double>(bytes));
      push(server.free_at, EventKind::hbm_done, id);
    }
  }

  double hbm_service(std::uint64_t uid, std::uint64_t index, double bytes) const {
    const double mean = bytes / cfg_.hbm_gbps;
    if (cfg_.hbm_service_scv <= 0.0) return mean;
    const double sigma2 = std::log1p(cfg_.hbm_service_scv);
    const double u = hashed_uniform(cfg_.seed, uid, index, 0x4842);
    const double z = -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * u);
    return mean * std::exp(std::sqrt(sigma2) * z - 0.5 * sigma2);
  }

  void forward(std::uint32_t id, double now) {
    const Packet p = packets_[id];
    FlowState& fs = flows_[p.flow];
    const FlowEvent& ev = trace_.events[flow_index(p.flow)];
    if (std::binary_search(ev.destinations.begin(), ev.destinations.end(), p.at)) {
      deliver(p, fs, ev, now);
    }
    bool reused = false;
    for (const TreeEdge& e : fs.edges) {
      if (e.from != p.at) continue;
      std::uint32_t copy = id;
      if (reused) {
        copy = new_packet(p);
      }
      reused = true;
      packets_[copy].enqueued = now;
      enqueue(e.link, copy, now);
    }
    if (!reused) free_.push_back(id);
  }

  std::size_t flow_index(std::uint32_t flow) const { return flow; }

  void deliver(const Packet& p, FlowState& fs, const FlowEvent& ev, double now) {
    report_.delivered_bytes += p.bytes;
    fs.delivered_bytes += p.bytes;
    if (in_window(now)) report_.latency_ns[static_cast<std::size_t>(ev.cls)].push_back(now - ev.timestamp_ns);
    if (--fs.remaining == 0) {
      fs.completion = now;
      if (ev.cls == FlowClass::activation && in_window(now) && ev.expert >= 0 &&
          static_cast<std::size_t>(ev.expert) < report_.expert_tokens.size()) {
        ++report_.expert_tokens[static_cast<std::size_t>(ev.expert)];
      }
    }
  }

  void enqueue(std::uint32_t link, std::uint32_t id, double now) {
    LinkState& l = links_[link];
    l.queue.push_back(id);
    if (!l.busy) start_service(link, now);
  }

  void start_service(std::uint32_t link, double now) {
    LinkState& l = links_[link];
    const std::uint32_t id = l.queue.front();
    l.queue.pop_front();
    l.busy = true;
    l.in_service = id;
    const Packet& p = packets_[id];
    if (in_window(now)) report_.queue_delay_ns[link].push_back(now - p.enqueued);
    const double service = static_cast<double>(p.bytes) / l.bandwidth;
    account_busy(link, now, now + service);
    push(now + service, EventKind::link_done, link);
  }

  void account_busy(std::uint32_t link, double from, double to) {
    const double a = std::max(from, start_);
    const double b = std::min(to, end_);
    if (a >= b) return;
    auto w = static_cast<std::size_t>((a - start_) / cfg_.util_window_ns);
    double cursor = a;
    while (cursor < b && w < windows_) {
      const double w_end = std::min(b, start_ + static_cast<double>(w + 1) * cfg_.util_window_ns);
      report_.utilization[link][w] += w_end - cursor;
      cursor = w_end;
      ++w;
    }
  }

  void link_done(std::uint32_t link, double now) {
    LinkState& l = links_[link];
    const std::uint32_t id = l.in_service;
    if (l.cut && in_window(now)) cut_bytes_ += packets_[id].bytes;
    packets_[id].at = l.to;
    push(now + cfg_.router_delay_ns, EventKind::arrive, id);
    l.busy = false;
    if (!l.queue.empty()) start_service(link, now);
  }

  void finish() {
    const double seconds = cfg_.measure_ns * 1e-9;
    for (std::uint64_t n : report_.expert_tokens) {
      report_.expert_tokens_per_s.push_back(static_cast<double>(n) / seconds);
    }
    for (std::size_t l = 0; l < links_.size(); ++l) {
      double busy = 0.0;
      for (std::size_t w = 0; w < windows_; ++w) {
        busy += report_.utilization[l][w];
        const double width = std::min(cfg_.util_window_ns, end_ - (start_ + static_cast<double>(w) * cfg_.util_window_ns));
        report_.utilization[l][w] /= width;
      }
      report_.link_utilization[l] = busy / cfg_.measure_ns;
    }
    report_.cut_goodput_gbps = static_cast<double>(cut_bytes_) / cfg_.measure_ns;
    std::vector<double> all;
    for (const auto& v : report_.latency_ns) all.insert(all.end(), v.begin(), v.end());
    report_.latency = summarize(all);
    if (cfg_.record_flows) {
      for (std::size_t i = 0; i < flows_.size(); ++i) {
        report_.flows[i].delivered_bytes = flows_[i].delivered_bytes;
        report_.flows[i].completion_ns = flows_[i].completion;
      }
    }
  }

  const Topology& t_;
  const TrafficTrace& trace_;
  const SimConfig& cfg_;
  RouteTable routes_;
  double start_ = 0.0;
  double end_ = 0.0;
  std::size_t windows_ = 0;
  std::vector<LinkState> links_;
  std::vector<HbmServer> hbm_;
  std::vector<FlowState> flows_;
  std::vector<Packet> packets_;
  std::vector<std::uint32_t> free_;
  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  std::uint64_t seq_ = 0;
  std::uint64_t cut_bytes_ = 0;
  SimReport report_;
};

}  // namespace

SimReport simulate(const Topology& topology, const TrafficTrace& trace, const SimConfig& config) {
  config.check();
  double last = -std::numeric_limits<double>::infinity();
  for (const FlowEvent& ev : trace.events) {
    if (ev.timestamp_ns < last) throw Error(ErrorCode::NonMonotoneTrace, "trace timestamps decrease");
    last = ev.timestamp_ns;
    if (ev.source >= topology.node_count()) throw Error(ErrorCode::UnknownNode, "unknown source node");
    if (ev.destinations.empty()) throw Error(ErrorCode::InvalidArgument, "flow without destinations");
    for (NodeId d : ev.destinations) {
      if (d >= topology.node_count()) throw Error(ErrorCode::UnknownNode, "unknown destination node");
    }
    if (!std::is_sorted(ev.destinations.begin(), ev.destinations.end())) {
      throw Error(ErrorCode::InvalidArgument, "destination lists must be sorted");
    }
    if (ev.bytes == 0) throw Error(ErrorCode::InvalidArgument, "flow with zero bytes");
  }
  return Engine(topology, trace, config).run();
}

}  // namespace noi
