#pragma once

#include <cstdint>
#include <vector>

#include "logdqn/embedding.hpp"
#include "logdqn/neural.hpp"

namespace logdqn {

/// Training setup for the supervised reference classifier. It reuses the
/// attention Bi-LSTM architecture and is fit only on labeled sequences.
struct OracleConfig {
    NetDims dims;
    int epochs = 30;
    int batch_size = 32;
    double lr = 0.001;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Cross-entropy training of the reference classifier over labeled states.
/// Every state must carry a label and both classes must be present.
/// `epochs = 0` returns the freshly initialized network untouched.
QNetworkParams train_oracle(const std::vector<EpisodeState>& labeled, const OracleConfig& config);

/// Probability the classifier assigns to the NORMAL class; this is the
/// confidence signal consumed by the intrinsic reward.
double oracle_normal_prob(const QNetworkParams& oracle, const EpisodeState& state);

struct OracleMetrics {
    double mean_cross_entropy = 0.0;
    double accuracy = 0.0;
};

/// Mean cross-entropy and 0/1 accuracy of the classifier on labeled states.
OracleMetrics evaluate_oracle(const QNetworkParams& oracle,
                              const std::vector<EpisodeState>& labeled);

}  // namespace logdqn
