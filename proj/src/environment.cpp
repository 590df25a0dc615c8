#include "logdqn/environment.hpp"

#include <cmath>
#include <string>

#include "logdqn/errors.hpp"
#include "logdqn/oracle.hpp"

namespace logdqn {

void RewardConfig::validate() const {
    if (!(r1 > 0.0) || !(r2 > 0.0) || !(r3 > 0.0) || !(r4 > 0.0)) {
        throw ConfigError("reward constants r1..r4 must all be positive");
    }
    if (!(r1 > r2)) {
        throw ConfigError("r1 must exceed r2 (caught anomalies outrank confirmed normals)");
    }
    if (!(r4 > r3)) {
        throw ConfigError("r4 must exceed r3 (a miss must cost more than a false alarm)");
    }
    if (!(delta > 0.0 && delta < 1.0)) {
        throw ConfigError("delta must lie in (0,1), got " + std::to_string(delta));
    }
}

void EnvConfig::validate() const {
    if (!(labeled_prob >= 0.0 && labeled_prob <= 1.0)) {
        throw ConfigError("labeled-branch probability must lie in [0,1], got " +
                          std::to_string(labeled_prob));
    }
    if (subset_size < 1) {
        throw ConfigError("transition subset size must be >= 1");
    }
}

Environment::Environment(const std::vector<EpisodeState>* labeled,
                         const std::vector<EpisodeState>* unlabeled, EnvConfig config)
    : labeled_(labeled), unlabeled_(unlabeled), config_(config), rng_(config.seed) {
    config_.validate();
    if (labeled_ == nullptr || unlabeled_ == nullptr) {
        throw ContractViolation("environment pools must not be null");
    }
    if (labeled_->empty() || unlabeled_->empty()) {
        throw ConfigError("environment needs nonempty labeled and unlabeled pools");
    }
    if (config_.subset_size > unlabeled_->size()) {
        throw ConfigError("transition subset size " + std::to_string(config_.subset_size) +
                          " exceeds the unlabeled pool size " +
                          std::to_string(unlabeled_->size()));
    }
}

const EpisodeState& Environment::initial_state() {
    return (*unlabeled_)[rng_.index(unlabeled_->size())];
}

double transition_score(const EpisodeState& a, const EpisodeState& b, TransitionMetric metric) {
    switch (metric) {
        case TransitionMetric::Cosine:
            return state_similarity(a, b);
        case TransitionMetric::NegEuclidean:
            return -(a.pooled - b.pooled).norm();
        case TransitionMetric::Random:
            throw ContractViolation("the random metric has no score; candidates are drawn, not ranked");
    }
    throw ContractViolation("unknown transition metric");
}

TransitionOutcome Environment::next_state(const EpisodeState& current, Action action) {
    TransitionOutcome out;
    if (rng_.bernoulli(config_.labeled_prob)) {
        out.from_labeled = true;
        out.chosen = rng_.index(labeled_->size());
        out.next = &(*labeled_)[out.chosen];
        return out;
    }

    rng_.sample_indices(unlabeled_->size(), config_.subset_size, scratch_, subset_buf_);
    out.subset = subset_buf_;

    if (config_.metric == TransitionMetric::Random) {
        out.chosen = subset_buf_[rng_.index(subset_buf_.size())];
        out.next = &(*unlabeled_)[out.chosen];
        return out;
    }

    // The anomaly action chases the most similar candidate, the normal action
    // flees to the least similar one.
    const bool want_max = action == Action::Anomaly;
    std::size_t best = subset_buf_[0];
    double best_score = transition_score(current, (*unlabeled_)[best], config_.metric);
    for (std::size_t i = 1; i < subset_buf_.size(); ++i) {
        const std::size_t cand = subset_buf_[i];
        const double score = transition_score(current, (*unlabeled_)[cand], config_.metric);
        const bool improves = want_max ? score > best_score : score < best_score;
        const bool tie_wins =
            score == best_score && (*unlabeled_)[cand].seq_id < (*unlabeled_)[best].seq_id;
        if (improves || tie_wins) {
            best = cand;
            best_score = score;
        }
    }
    out.chosen = best;
    out.next = &(*unlabeled_)[best];
    return out;
}

double external_reward(const EpisodeState& state, Action action, const RewardConfig& config) {
    config.validate();
    if (state.origin == Origin::Unlabeled) {
        return action == Action::Anomaly ? config.unlabeled_anomaly_penalty : 0.0;
    }
    if (!state.label.has_value() || *state.label == Label::Unknown) {
        throw ContractViolation("labeled state '" + state.seq_id + "' is missing its label");
    }
    const bool is_anomaly = *state.label == Label::Anomaly;
    if (action == Action::Anomaly) {
        return is_anomaly ? config.r1 : -config.r3;
    }
    return is_anomaly ? -config.r4 : config.r2;
}

double intrinsic_reward_from_prob(double rob_p, double delta) {
    if (!(delta > 0.0 && delta < 1.0)) {
        throw ConfigError("delta must lie in (0,1), got " + std::to_string(delta));
    }
    if (!(rob_p >= 0.0 && rob_p <= 1.0)) {
        throw ContractViolation("rob_p must be a probability, got " + std::to_string(rob_p));
    }
    if (rob_p < delta) {
        return 1.0 - rob_p / delta;
    }
    return (rob_p - delta) / (1.0 - delta) - 1.0;
}

double intrinsic_reward(const QNetworkParams& oracle, const EpisodeState& state, double delta) {
    return intrinsic_reward_from_prob(oracle_normal_prob(oracle, state), delta);
}

}  // namespace logdqn
