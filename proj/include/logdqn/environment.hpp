#pragma once

#include <cstdint>
#include <vector>

#include "logdqn/embedding.hpp"
#include "logdqn/neural.hpp"
#include "logdqn/rng.hpp"

namespace logdqn {

/// The two actions: flag the sequence as normal or as anomalous.
enum class Action : int { Normal = 0, Anomaly = 1 };

/// Reward constants. r1/r2 pay correct anomaly/normal calls on labeled data,
/// r3/r4 penalize false alarms and misses; r4 > r3 makes a miss the most
/// expensive mistake and r1 > r2 favors finding anomalies over confirming
/// normals. `delta` is the confidence threshold of the intrinsic reward.
struct RewardConfig {
    double r1 = 1.0;
    double r2 = 0.1;
    double r3 = 0.4;
    double r4 = 1.5;
    double delta = 0.5;
    double unlabeled_anomaly_penalty = -1.0;

    void validate() const;
};

/// How the environment ranks candidate next states against the current one.
/// Cosine is the standard behavior; NegEuclidean and Random exist for the
/// ablation variants.
enum class TransitionMetric { Cosine, NegEuclidean, Random };

struct EnvConfig {
    double labeled_prob = 0.5;     // chance the next state comes from the labeled pool
    std::size_t subset_size = 1000;  // candidates drawn from the unlabeled pool
    TransitionMetric metric = TransitionMetric::Cosine;
    std::uint64_t seed = 0;

    void validate() const;
};

/// What one transition did: which branch fired, which candidates were drawn
/// (unlabeled branch only; indices into the unlabeled pool) and which state
/// won. `next` points into the pool owned by the caller.
struct TransitionOutcome {
    const EpisodeState* next = nullptr;
    bool from_labeled = false;
    std::vector<std::size_t> subset;
    std::size_t chosen = 0;
};

/// Sampler over the labeled and unlabeled pools. With probability
/// `labeled_prob` the next state is a uniform labeled draw regardless of the
/// action; otherwise a fresh uniform subset of the unlabeled pool is ranked
/// against the current state and the anomaly action walks toward the most
/// similar candidate while the normal action walks away to the least similar
/// one. Ties break on the lexicographically smallest sequence id.
class Environment {
public:
    Environment(const std::vector<EpisodeState>* labeled,
                const std::vector<EpisodeState>* unlabeled, EnvConfig config);

    /// Uniform draw from the unlabeled pool; episodes start here.
    const EpisodeState& initial_state();

    TransitionOutcome next_state(const EpisodeState& current, Action action);

    const EnvConfig& config() const { return config_; }

private:
    const std::vector<EpisodeState>* labeled_;
    const std::vector<EpisodeState>* unlabeled_;
    EnvConfig config_;
    Rng rng_;
    std::vector<std::size_t> scratch_;
    std::vector<std::size_t> subset_buf_;
};

/// Candidate score under a transition metric: cosine similarity of the pooled
/// vectors, or negative Euclidean distance between them.
double transition_score(const EpisodeState& a, const EpisodeState& b, TransitionMetric metric);

/// Labeled states: +r1 for a caught anomaly, +r2 for a confirmed normal,
/// -r3 for a false alarm, -r4 for a miss. Unlabeled states: the anomaly
/// action costs `unlabeled_anomaly_penalty`, the normal action is free.
double external_reward(const EpisodeState& state, Action action, const RewardConfig& config);

/// Confidence-shaped reward from the classifier's normalcy probability:
/// below `delta` it pays up to +1 for suspicion, at or above `delta` it
/// charges up to -1, decreasing in rob_p on both branches. Discontinuous at
/// rob_p = delta by construction (left limit 0, value -1).
double intrinsic_reward_from_prob(double rob_p, double delta);

double intrinsic_reward(const QNetworkParams& oracle, const EpisodeState& state, double delta);

inline double joint_reward(double external, double intrinsic) { return external + intrinsic; }

}  // namespace logdqn
