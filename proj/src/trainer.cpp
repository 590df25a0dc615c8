#include "logdqn/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "logdqn/errors.hpp"
#include "logdqn/logging.hpp"
#include "logdqn/oracle.hpp"

namespace logdqn {

ReplayMemory::ReplayMemory(std::size_t capacity) {
    if (capacity < 1) {
        throw ConfigError("replay capacity must be >= 1");
    }
    buf_.resize(capacity);
}

void ReplayMemory::push(const Transition& t) {
    if (count_ < buf_.size()) {
        buf_[(first_ + count_) % buf_.size()] = t;
        ++count_;
    } else {
        buf_[first_] = t;
        first_ = (first_ + 1) % buf_.size();
    }
}

const Transition& ReplayMemory::at(std::size_t i) const {
    if (i >= count_) {
        throw ContractViolation("replay index " + std::to_string(i) + " out of range " +
                                std::to_string(count_));
    }
    return buf_[(first_ + i) % buf_.size()];
}

void ReplayMemory::sample(Rng& rng, std::size_t n, std::vector<const Transition*>& out) const {
    if (count_ == 0) {
        throw ContractViolation("cannot sample from an empty replay memory");
    }
    out.clear();
    out.reserve(n);
    if (n <= count_) {
        rng.sample_indices(count_, n, scratch_, picks_);
        for (std::size_t i : picks_) {
            out.push_back(&at(i));
        }
    } else {
        for (std::size_t k = 0; k < n; ++k) {
            out.push_back(&at(rng.index(count_)));
        }
    }
}

void TrainConfig::validate() const {
    if (n_episodes < 1 || n_steps < 1) {
        throw ConfigError("episode and step counts must be >= 1");
    }
    if (warmup_episodes < 0) {
        throw ConfigError("warm-up episode count must be >= 0");
    }
    if (target_sync_steps < 1) {
        throw ConfigError("target sync cadence must be >= 1 step");
    }
    if (replay_capacity < 1 || replay_batch < 1) {
        throw ConfigError("replay capacity and batch size must be >= 1");
    }
    if (reg_batch < 2 || reg_batch % 2 != 0) {
        throw ConfigError("label-consistency batch must be an even count >= 2, got " +
                          std::to_string(reg_batch));
    }
    if (!(gamma >= 0.0 && gamma <= 1.0)) {
        throw ConfigError("gamma must lie in [0,1], got " + std::to_string(gamma));
    }
    if (!(lr > 0.0)) {
        throw ConfigError("learning rate must be positive");
    }
    if (lambda < 0.0) {
        throw ConfigError("loss weight lambda must be >= 0, got " + std::to_string(lambda));
    }
    if (!(epsilon_start >= 0.0 && epsilon_start <= 1.0 && epsilon_end >= 0.0 &&
          epsilon_end <= epsilon_start)) {
        throw ConfigError("epsilon schedule needs 0 <= epsilon_end <= epsilon_start <= 1");
    }
    if (anneal_rate.has_value() && *anneal_rate < 0.0) {
        throw ConfigError("anneal rate must be >= 0");
    }
}

double resolved_anneal_rate(const TrainConfig& config) {
    if (config.anneal_rate.has_value()) {
        return *config.anneal_rate;
    }
    const double total = double(config.n_episodes) * double(config.n_steps);
    return (config.epsilon_start - config.epsilon_end) / (0.5 * total);
}

double epsilon_at(std::int64_t step, const TrainConfig& config) {
    if (step < 0) {
        throw ContractViolation("step index must be >= 0");
    }
    const double eps = config.epsilon_start - double(step) * resolved_anneal_rate(config);
    return std::max(config.epsilon_end, eps);
}

Action select_action(const Eigen::Vector2d& q, double epsilon, Rng& rng) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
        throw ContractViolation("epsilon must lie in [0,1], got " + std::to_string(epsilon));
    }
    if (rng.bernoulli(epsilon)) {
        return rng.index(2) == 1 ? Action::Anomaly : Action::Normal;
    }
    return q[1] > q[0] ? Action::Anomaly : Action::Normal;
}

double td_target(const Transition& t, const QNetworkParams& target, double gamma) {
    if (t.terminal) {
        return t.reward;
    }
    const Eigen::Vector2d q_next = forward_q(target, *t.next);
    return t.reward + gamma * q_next.maxCoeff();
}

namespace {

/// Shared worker so the hot loop can reuse traces; the public loss1/loss2
/// wrappers allocate their own.
double loss1_impl(const std::vector<const Transition*>& batch, const QNetworkParams& params,
                  const QNetworkParams& target, double gamma, QNetworkParams* grads,
                  ForwardTrace& trace, ForwardTrace& target_trace) {
    if (batch.empty()) {
        throw ContractViolation("TD loss needs a nonempty batch");
    }
    const double inv_n = 1.0 / double(batch.size());
    double value = 0.0;
    for (const Transition* t : batch) {
        double y = t->reward;
        if (!t->terminal) {
            forward(target, *t->next, target_trace);
            y += gamma * target_trace.q.maxCoeff();
        }
        forward(params, *t->state, trace);
        const int a = static_cast<int>(t->action);
        const double err = y - trace.q[a];
        value += err * err * inv_n;
        if (grads != nullptr) {
            Eigen::Vector2d dq = Eigen::Vector2d::Zero();
            dq[a] = -2.0 * err * inv_n;
            backward(params, trace, dq, *grads);
        }
    }
    return value;
}

double loss2_impl(const std::vector<const EpisodeState*>& batch, const QNetworkParams& params,
                  QNetworkParams* grads, ForwardTrace& trace) {
    if (batch.empty()) {
        throw ContractViolation("label-consistency loss needs a nonempty batch");
    }
    std::size_t anomalies = 0;
    for (const EpisodeState* s : batch) {
        if (s->origin != Origin::Labeled || !s->label.has_value() ||
            *s->label == Label::Unknown) {
            throw ContractViolation("label-consistency batch must hold labeled states");
        }
        anomalies += std::size_t(*s->label == Label::Anomaly);
    }
    if (anomalies * 2 != batch.size()) {
        throw ContractViolation("label-consistency batch must balance classes; got " +
                                std::to_string(anomalies) + " anomalies in " +
                                std::to_string(batch.size()));
    }
    const double inv_n = 1.0 / double(batch.size());
    double value = 0.0;
    for (const EpisodeState* s : batch) {
        forward(params, *s, trace);
        const double p = softmax_binary(trace.q);
        const double y = *s->label == Label::Anomaly ? 1.0 : 0.0;
        const double p_clamped = std::clamp(p, 1e-12, 1.0 - 1e-12);
        value -= inv_n * (y * std::log(p_clamped) + (1.0 - y) * std::log(1.0 - p_clamped));
        if (grads != nullptr) {
            // Composite softmax/cross-entropy derivative; exact and bounded.
            Eigen::Vector2d dq;
            dq[1] = (p - y) * inv_n;
            dq[0] = -dq[1];
            backward(params, trace, dq, *grads);
        }
    }
    return value;
}

}  // namespace

double loss1(const std::vector<const Transition*>& batch, const QNetworkParams& params,
             const QNetworkParams& target, double gamma, QNetworkParams* grads) {
    ForwardTrace trace, target_trace;
    return loss1_impl(batch, params, target, gamma, grads, trace, target_trace);
}

double loss2(const std::vector<const EpisodeState*>& batch, const QNetworkParams& params,
             QNetworkParams* grads) {
    ForwardTrace trace;
    return loss2_impl(batch, params, grads, trace);
}

TrainResult train(const std::vector<EpisodeState>& labeled,
                  const std::vector<EpisodeState>& unlabeled, const QNetworkParams& oracle,
                  Environment& env, const RewardConfig& rewards, const TrainConfig& config,
                  const TrainHooks& hooks) {
    config.validate();
    rewards.validate();
    if (labeled.empty() || unlabeled.empty()) {
        throw ConfigError("training needs nonempty labeled and unlabeled partitions");
    }

    // Class index lists for the balanced label-consistency minibatches.
    std::vector<std::size_t> normal_idx, anomaly_idx;
    for (std::size_t i = 0; i < labeled.size(); ++i) {
        if (!labeled[i].label.has_value() || *labeled[i].label == Label::Unknown) {
            throw ContractViolation("labeled partition holds an unlabeled sequence: '" +
                                    labeled[i].seq_id + "'");
        }
        (*labeled[i].label == Label::Anomaly ? anomaly_idx : normal_idx).push_back(i);
    }
    if (config.lambda > 0.0 && (normal_idx.empty() || anomaly_idx.empty())) {
        throw ConfigError("label-consistency loss needs both classes in the labeled partition");
    }

    QNetworkParams params =
        QNetworkParams::random_init(config.dims, derive_seed(config.seed, "train.init"));
    QNetworkParams target = params;
    QNetworkParams grads(config.dims);
    QNetworkParams grads_reg(config.dims);
    AdamState adam(params.size());
    ReplayMemory replay(config.replay_capacity);

    Rng action_rng(derive_seed(config.seed, "train.action"));
    Rng replay_rng(derive_seed(config.seed, "train.replay"));
    Rng reg_rng(derive_seed(config.seed, "train.reg"));

    ForwardTrace act_trace, oracle_trace, trace, target_trace;
    std::vector<const Transition*> batch;
    std::vector<const EpisodeState*> reg_batch;
    std::vector<std::size_t> reg_scratch, reg_picks;
    const std::size_t half = std::size_t(config.reg_batch) / 2;

    auto draw_class = [&](const std::vector<std::size_t>& pool) {
        if (pool.size() >= half) {
            reg_rng.sample_indices(pool.size(), half, reg_scratch, reg_picks);
            for (std::size_t i : reg_picks) {
                reg_batch.push_back(&labeled[pool[i]]);
            }
        } else {
            for (std::size_t k = 0; k < half; ++k) {
                reg_batch.push_back(&labeled[pool[reg_rng.index(pool.size())]]);
            }
        }
    };

    TrainResult result{std::move(params), {}};
    QNetworkParams& theta = result.params;

    std::int64_t global_step = 0;
    for (int episode = 1; episode <= config.n_episodes; ++episode) {
        const EpisodeState* state = &env.initial_state();
        const bool updating = episode > config.warmup_episodes;
        double reward_sum = 0.0;
        double l1_sum = 0.0;
        double l2_sum = 0.0;
        double last_epsilon = config.epsilon_start;
        int updates = 0;

        for (int step = 1; step <= config.n_steps; ++step) {
            const double eps = epsilon_at(global_step, config);
            last_epsilon = eps;
            forward(theta, *state, act_trace);
            const Action action = select_action(act_trace.q, eps, action_rng);

            const TransitionOutcome outcome = env.next_state(*state, action);
            const double r_ext = external_reward(*state, action, rewards);
            forward(oracle, *state, oracle_trace);
            const double rob_p = 1.0 - softmax_binary(oracle_trace.q);
            const double reward = joint_reward(r_ext, intrinsic_reward_from_prob(rob_p, rewards.delta));
            reward_sum += reward;

            replay.push({state, action, reward, outcome.next, step == config.n_steps});

            if (updating) {
                replay.sample(replay_rng, std::size_t(config.replay_batch), batch);
                grads.set_zero();
                const double l1 =
                    loss1_impl(batch, theta, target, config.gamma, &grads, trace, target_trace);
                double l2 = 0.0;
                if (config.lambda > 0.0) {
                    reg_batch.clear();
                    draw_class(normal_idx);
                    draw_class(anomaly_idx);
                    grads_reg.set_zero();
                    l2 = loss2_impl(reg_batch, theta, &grads_reg, trace);
                    grads.flat().noalias() += config.lambda * grads_reg.flat();
                }
                if (!std::isfinite(total_loss(l1, l2, config.lambda))) {
                    throw NumericError("non-finite loss at episode " + std::to_string(episode) +
                                       " step " + std::to_string(step));
                }
                adam_step(theta, grads, adam, config.lr);
                l1_sum += l1;
                l2_sum += l2;
                ++updates;
            }

            ++global_step;
            if (global_step % config.target_sync_steps == 0) {
                target.flat() = theta.flat();
            }
            state = outcome.next;
        }

        EpisodeMetrics metrics;
        metrics.episode = episode;
        metrics.mean_reward = reward_sum / double(config.n_steps);
        metrics.loss1 = updates > 0 ? l1_sum / double(updates) : 0.0;
        metrics.loss2 = updates > 0 ? l2_sum / double(updates) : 0.0;
        metrics.epsilon = last_epsilon;
        if (hooks.evaluate) {
            const std::array<double, 3> prf = hooks.evaluate(theta);
            metrics.test_precision = prf[0];
            metrics.test_recall = prf[1];
            metrics.test_f1 = prf[2];
        }
        result.episodes.push_back(metrics);
        log_info("episode " + std::to_string(episode) + "/" + std::to_string(config.n_episodes) +
                 " mean_reward=" + std::to_string(metrics.mean_reward) +
                 " loss=" + std::to_string(metrics.loss1 + config.lambda * metrics.loss2) +
                 " eps=" + std::to_string(metrics.epsilon));
        if (hooks.on_episode) {
            hooks.on_episode(metrics);
        }
        if (hooks.on_checkpoint) {
            hooks.on_checkpoint(episode, theta);
        }
    }
    return result;
}

double anomaly_score(const QNetworkParams& params, const EpisodeState& state) {
    return forward_q(params, state)[1];
}

bool predict_anomaly(const QNetworkParams& params, const EpisodeState& state) {
    const Eigen::Vector2d q = forward_q(params, state);
    return q[1] > q[0];
}

}  // namespace logdqn
