#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "logdqn/environment.hpp"
#include "logdqn/neural.hpp"
#include "logdqn/rng.hpp"

namespace logdqn {

/// One agent step: acting on `state` with `action` earned `reward` and the
/// environment moved to `next`. `terminal` marks the last step of an episode.
/// States point into the dataset partitions, which outlive training.
struct Transition {
    const EpisodeState* state = nullptr;
    Action action = Action::Normal;
    double reward = 0.0;
    const EpisodeState* next = nullptr;
    bool terminal = false;
};

/// Fixed-capacity ring of past transitions with strict FIFO eviction.
class ReplayMemory {
public:
    explicit ReplayMemory(std::size_t capacity);

    void push(const Transition& t);
    std::size_t size() const { return count_; }
    std::size_t capacity() const { return buf_.size(); }

    /// Survivor at position `i`, oldest first.
    const Transition& at(std::size_t i) const;

    /// Uniform minibatch: without replacement when enough transitions are
    /// stored, with replacement otherwise.
    void sample(Rng& rng, std::size_t n, std::vector<const Transition*>& out) const;

private:
    std::vector<Transition> buf_;
    std::size_t first_ = 0;
    std::size_t count_ = 0;
    mutable std::vector<std::size_t> scratch_;
    mutable std::vector<std::size_t> picks_;
};

struct TrainConfig {
    NetDims dims;
    int n_episodes = 10;
    int n_steps = 2000;
    int warmup_episodes = 5;
    int target_sync_steps = 10000;
    std::size_t replay_capacity = 100000;
    int replay_batch = 32;
    int reg_batch = 32;  // split evenly between labeled normals and anomalies
    double gamma = 0.99;
    double lr = 0.001;
    double lambda = 1.0;  // weight of the label-consistency term in the loss
    double epsilon_start = 1.0;
    double epsilon_end = 0.1;
    /// Per-step linear decay; unset means "reach epsilon_end halfway through".
    std::optional<double> anneal_rate;
    std::uint64_t seed = 0;

    void validate() const;
};

double resolved_anneal_rate(const TrainConfig& config);

/// Linear epsilon schedule: start - step * rate, floored at epsilon_end.
double epsilon_at(std::int64_t step, const TrainConfig& config);

/// Epsilon-greedy: random action with probability epsilon, otherwise the
/// Q-argmax with ties resolved to the normal action.
Action select_action(const Eigen::Vector2d& q, double epsilon, Rng& rng);

/// Bootstrapped regression target: r for terminal steps, else
/// r + gamma * max_a Q(next, a; target).
double td_target(const Transition& t, const QNetworkParams& target, double gamma);

/// Mean squared TD error over the batch. Gradients (if requested) are
/// accumulated into `grads` and flow only through Q(s, a); the target
/// network side is treated as a constant.
double loss1(const std::vector<const Transition*>& batch, const QNetworkParams& params,
             const QNetworkParams& target, double gamma, QNetworkParams* grads);

/// Mean binary cross-entropy between the softmax anomaly probability and the
/// labels of a class-balanced labeled minibatch. The probability is clamped
/// to [1e-12, 1-1e-12] inside the logs; gradients use the exact
/// softmax/cross-entropy composite.
double loss2(const std::vector<const EpisodeState*>& batch, const QNetworkParams& params,
             QNetworkParams* grads);

inline double total_loss(double l1, double l2, double lambda) { return l1 + lambda * l2; }

struct EpisodeMetrics {
    int episode = 0;  // 1-based
    double mean_reward = 0.0;
    double loss1 = 0.0;  // mean over the episode's updates, 0 during warm-up
    double loss2 = 0.0;
    double epsilon = 0.0;  // value used on the episode's last step
    double test_precision = std::numeric_limits<double>::quiet_NaN();
    double test_recall = std::numeric_limits<double>::quiet_NaN();
    double test_f1 = std::numeric_limits<double>::quiet_NaN();
};

struct TrainHooks {
    std::function<void(const EpisodeMetrics&)> on_episode;
    std::function<void(int episode, const QNetworkParams&)> on_checkpoint;
    /// Optional test-set scorer returning {precision, recall, f1}; called on
    /// the live parameters after each episode.
    std::function<std::array<double, 3>(const QNetworkParams&)> evaluate;
};

struct TrainResult {
    QNetworkParams params;
    std::vector<EpisodeMetrics> episodes;
};

/// The full training loop: epsilon-greedy acting through `env`, joint
/// external+intrinsic rewards, experience replay, delayed target copies
/// every `target_sync_steps` global steps, and after the warm-up episodes
/// one Adam update per step on loss1 + lambda * loss2. Deterministic per
/// config seed (the environment holds its own seeded stream).
TrainResult train(const std::vector<EpisodeState>& labeled,
                  const std::vector<EpisodeState>& unlabeled, const QNetworkParams& oracle,
                  Environment& env, const RewardConfig& rewards, const TrainConfig& config,
                  const TrainHooks& hooks = {});

/// Q-value of the anomaly action; the ranking score at evaluation time.
double anomaly_score(const QNetworkParams& params, const EpisodeState& state);

/// Argmax classification; a tie counts as normal.
bool predict_anomaly(const QNetworkParams& params, const EpisodeState& state);

}  // namespace logdqn
