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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mlp.hpp"
#include "noi/error.hpp"
#include "noi/rng.hpp"
#include "noi/synthesis.hpp"

namespace noi {

namespace {

using detail::Mlp;

/// Softmax restricted to legal actions; masked entries are exactly zero.
Eigen::VectorXd masked_softmax(const Eigen::VectorXd& logits, const std::vector<char>& mask) {
  double top = -std::numeric_limits<double>::infinity();
  for (Eigen::Index a = 0; a < logits.size(); ++a) {
    if (mask[static_cast<std::size_t>(a)]) top = std::max(top, logits[a]);
  }
  Eigen::VectorXd p = Eigen::VectorXd::Zero(logits.size());
  double total = 0.0;
  for (Eigen::Index a = 0; a < logits.size(); ++a) {
    if (mask[static_cast<std::size_t>(a)]) {
      p[a] = std::exp(logits[a] - top);
      total += p[a];
    }
  }
  return p / total;
}

struct Batch {
  std::vector<std::vector<double>> features;
  std::vector<std::vector<char>> masks;
  std::vector<std::size_t> actions;
  std::vector<double> logp;
  std::vector<double> values;
  std::vector<double> rewards;
  std::vector<char> terminal;

  void clear() { *this = Batch{}; }
  std::size_t size() const { return actions.size(); }
};

struct UpdateStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
};

class Learner {
 public:
  Learner(std::size_t features, std::size_t actions, const PpoConfig& cfg, std::uint64_t seed)
      : cfg_(cfg),
        actor_({static_cast<int>(features), cfg.hidden, cfg.hidden, static_cast<int>(actions)},
               substream(seed, "actor"), 0.01),
        critic_({static_cast<int>(features), cfg.hidden, cfg.hidden, 1}, substream(seed, "critic")),
        rng_(substream(seed, "minibatch")) {}

  Eigen::VectorXd logits(const std::vector<double>& x) const { return actor_.forward(column(x)).col(0); }
  double value(const std::vector<double>& x) const { return critic_.forward(column(x))(0, 0); }

  UpdateStats update(const Batch& batch) {
    const std::size_t n = batch.size();
    std::vector<double> adv(n), ret(n);
    double next_adv = 0.0, next_value = 0.0;
    for (std::size_t i = n; i-- > 0;) {
      if (batch.terminal[i]) {
        next_adv = 0.0;
        next_value = 0.0;
      }
      const double delta = batch.rewards[i] + cfg_.gamma * next_value - batch.values[i];
      next_adv = delta + cfg_.gamma * cfg_.gae_lambda * next_adv;
      adv[i] = next_adv;
      ret[i] = adv[i] + batch.values[i];
      next_value = batch.values[i];
    }
    const double mean = std::accumulate(adv.begin(), adv.end(), 0.0) / static_cast<double>(n);
    double var = 0.0;
    for (double a : adv) var += (a - mean) * (a - mean);
    const double sd = std::sqrt(var / static_cast<double>(n)) + 1e-8;
    for (double& a : adv) a = (a - mean) / sd;

    UpdateStats stats;
    {
      Eigen::MatrixXd x = matrix(batch, all(n));
      const Eigen::MatrixXd v = critic_.forward(x);
      for (std::size_t i = 0; i < n; ++i) stats.value_loss += std::pow(v(0, static_cast<Eigen::Index>(i)) - ret[i], 2);
      stats.value_loss /= static_cast<double>(n);
    }
    std::vector<std::size_t> order = all(n);
    const auto mb = static_cast<std::size_t>(std::max(cfg_.minibatch, 1));
    std::size_t batches = 0;
    for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
      std::shuffle(order.begin(), order.end(), rng_);
      for (std::size_t start = 0; start < n; start += mb) {
        const std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(start),
                                           order.begin() + static_cast<std::ptrdiff_t>(std::min(n, start + mb)));
        const auto m = static_cast<double>(idx.size());
        const Eigen::MatrixXd x = matrix(batch, idx);
        Mlp::Cache ac, cc;
        const Eigen::MatrixXd logit = actor_.forward(x, &ac);
        const Eigen::MatrixXd v = critic_.forward(x, &cc);
        Eigen::MatrixXd dlogit = Eigen::MatrixXd::Zero(logit.rows(), logit.cols());
        Eigen::MatrixXd dv(1, static_cast<Eigen::Index>(idx.size()));
        for (std::size_t j = 0; j < idx.size(); ++j) {
          const std::size_t i = idx[j];
          const auto col = static_cast<Eigen::Index>(j);
          const Eigen::VectorXd p = masked_softmax(logit.col(col), batch.masks[i]);
          const auto a = static_cast<Eigen::Index>(batch.actions[i]);
          const double logp = std::log(p[a]);
          const double ratio = std::exp(logp - batch.logp[i]);
          const double clipped = std::clamp(ratio, 1.0 - cfg_.clip, 1.0 + cfg_.clip);
          const double surrogate = std::min(ratio * adv[i], clipped * adv[i]);
          const bool active = (adv[i] >= 0.0 && ratio <= 1.0 + cfg_.clip) || (adv[i] < 0.0 && ratio >= 1.0 - cfg_.clip);
          const double g = active ? -ratio * adv[i] : 0.0;
          double entropy = 0.0;
          for (Eigen::Index k = 0; k < p.size(); ++k) {
            if (p[k] > 0.0) entropy -= p[k] * std::log(p[k]);
          }
          for (Eigen::Index k = 0; k < p.size(); ++k) {
            if (!batch.masks[i][static_cast<std::size_t>(k)]) continue;
            const double lk = p[k] > 0.0 ? std::log(p[k]) : 0.0;
            dlogit(k, col) = (g * ((k == a ? 1.0 : 0.0) - p[k]) + cfg_.entropy_coef * p[k] * (lk + entropy)) / m;
          }
          dv(0, col) = cfg_.value_coef * 2.0 * (v(0, col) - ret[i]) / m;
          stats.policy_loss -= surrogate;
          stats.entropy += entropy;
        }
        actor_.adam_step(actor_.backward(ac, dlogit), cfg_.learning_rate, cfg_.max_grad_norm);
        critic_.adam_step(critic_.backward(cc, dv), cfg_.learning_rate, cfg_.max_grad_norm);
        ++batches;
      }
    }
    const double samples = static_cast<double>(n) * cfg_.epochs;
    stats.policy_loss /= samples;
    stats.entropy /= samples;
    return stats;
  }

  std::vector<double> parameters() const {
    auto p = actor_.parameters();
    auto c = critic_.parameters();
    p.insert(p.end(), c.begin(), c.end());
    return p;
  }

 private:
  static Eigen::MatrixXd column(const std::vector<double>& x) {
    return Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  }
  static std::vector<std::size_t> all(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), 0);
    return v;
  }
  static Eigen::MatrixXd matrix(const Batch& b, const std::vector<std::size_t>& idx) {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(b.features.front().size()), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j) {
      x.col(static_cast<Eigen::Index>(j)) = column(b.features[idx[j]]);
    }
    return x;
  }

  PpoConfig cfg_;
  Mlp actor_;
  Mlp critic_;
  Rng rng_;
};

}  // namespace

SynthesisRun train(const EnvConfig& config, const PpoConfig& ppo, std::uint64_t seed) {
  TopologyEnv env(config);
  SynthesisRun run;
  run.seed = seed;
  run.best_topology = config.initial;
  if (ppo.episodes <= 0) return run;
  const std::size_t n = config.initial.node_count();
  Learner learner(feature_size(config.initial), action_count(n), ppo, seed);
  Rng rng(substream(seed, "policy"));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Batch batch;
  std::size_t pending_from = 0;
  for (int ep = 0; ep < ppo.episodes; ++ep) {
    env.reset();
    EpisodeSummary summary;
    summary.episode = ep;
    summary.best_reward = -std::numeric_limits<double>::infinity();
    Topology episode_best = config.initial;
    while (!env.done()) {
      const auto x = env.features();
      const auto mask = env.mask();
      const Eigen::VectorXd p = masked_softmax(learner.logits(x), mask);
      double masked = 0.0;
      std::size_t legal = 0;
      for (std::size_t a = 0; a < mask.size(); ++a) {
        if (mask[a]) {
          ++legal;
        } else {
          masked += p[static_cast<Eigen::Index>(a)];
        }
      }
      run.masked_probability_mass = std::max(run.masked_probability_mass, masked);
      const double u = unit(rng);
      std::size_t action = 0;
      double acc = 0.0;
      std::size_t last_legal = 0;
      for (std::size_t a = 0; a < mask.size(); ++a) {
        if (!mask[a]) continue;
        last_legal = a;
        acc += p[static_cast<Eigen::Index>(a)];
        if (u < acc) {
          action = a;
          break;
        }
        action = last_legal;
      }
      const int step = env.step_index();
      const double value = learner.value(x);
      const StepResult res = env.step(action);
      batch.features.push_back(x);
      batch.masks.push_back(mask);
      batch.actions.push_back(action);
      batch.logp.push_back(std::log(p[static_cast<Eigen::Index>(action)]));
      batch.values.push_back(value);
      batch.rewards.push_back(res.reward);
      batch.terminal.push_back(res.done);
      run.log.push_back({ep, step, action, legal, res.raw, res.reward});
      if (run.log.size() == 1 || res.reward > run.best_reward) {
        run.best_reward = res.reward;
        run.best_raw = res.raw;
        run.best_topology = env.topology();
      }
      summary.total_reward += res.reward;
      if (res.reward > summary.best_reward) {
        summary.best_reward = res.reward;
        episode_best = env.topology();
      }
    }
    run.episodes.push_back(summary);
    if ((ep + 1) % std::max(ppo.episodes_per_update, 1) == 0 || ep + 1 == ppo.episodes) {
      const UpdateStats stats = learner.update(batch);
      run.value_losses.push_back(stats.value_loss);
      for (std::size_t e = pending_from; e < run.episodes.size(); ++e) {
        run.episodes[e].policy_loss = stats.policy_loss;
        run.episodes[e].value_loss = stats.value_loss;
        run.episodes[e].entropy = stats.entropy;
      }
      pending_from = run.episodes.size();
      batch.clear();
    }
    if (ppo.eval_interval > 0 && (ep + 1) % ppo.eval_interval == 0) {
      run.checkpoints.push_back(
          {ep, episode_best,
           evaluate_interference(episode_best, config.workload, substream(seed, "eval", static_cast<std::uint64_t>(ep)),
                                 ppo.eval)});
    }
  }
  run.policy_parameters = learner.parameters();
  return run;
}

}  // namespace noi
