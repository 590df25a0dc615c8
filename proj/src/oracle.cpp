#include "logdqn/oracle.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "logdqn/errors.hpp"
#include "logdqn/logging.hpp"
#include "logdqn/rng.hpp"

namespace logdqn {

namespace {

int require_label(const EpisodeState& state) {
    if (!state.label.has_value() || *state.label == Label::Unknown) {
        throw ContractViolation("oracle training needs a label on every sequence; '" +
                                state.seq_id + "' has none");
    }
    return *state.label == Label::Anomaly ? 1 : 0;
}

}  // namespace

void OracleConfig::validate() const {
    if (epochs < 0) {
        throw ConfigError("oracle epochs must be >= 0, got " + std::to_string(epochs));
    }
    if (batch_size < 1) {
        throw ConfigError("oracle batch size must be >= 1, got " + std::to_string(batch_size));
    }
    if (!(lr > 0.0)) {
        throw ConfigError("oracle learning rate must be positive, got " + std::to_string(lr));
    }
}

QNetworkParams train_oracle(const std::vector<EpisodeState>& labeled,
                            const OracleConfig& config) {
    config.validate();
    if (labeled.empty()) {
        throw ConfigError("oracle training set is empty");
    }
    std::size_t positives = 0;
    for (const EpisodeState& s : labeled) {
        positives += std::size_t(require_label(s));
    }
    if (positives == 0 || positives == labeled.size()) {
        throw ConfigError("oracle training set must contain both classes; got " +
                          std::to_string(positives) + " anomalies out of " +
                          std::to_string(labeled.size()));
    }

    QNetworkParams params = QNetworkParams::random_init(config.dims, derive_seed(config.seed, "oracle.init"));
    if (config.epochs == 0) {
        return params;
    }

    Rng shuffle_rng(derive_seed(config.seed, "oracle.shuffle"));
    AdamState adam(params.size());
    QNetworkParams grads(config.dims);
    ForwardTrace trace;

    std::vector<std::size_t> order(labeled.size());
    std::iota(order.begin(), order.end(), std::size_t(0));

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double epoch_loss = 0.0;
        for (std::size_t begin = 0; begin < order.size(); begin += std::size_t(config.batch_size)) {
            const std::size_t end = std::min(order.size(), begin + std::size_t(config.batch_size));
            const double inv_n = 1.0 / double(end - begin);
            grads.set_zero();
            for (std::size_t k = begin; k < end; ++k) {
                const EpisodeState& s = labeled[order[k]];
                const int y = require_label(s);
                forward(params, s, trace);
                const double p1 = softmax_binary(trace.q);
                const double py = y == 1 ? p1 : 1.0 - p1;
                epoch_loss -= std::log(std::max(py, 1e-12));
                // d(cross-entropy)/dq = softmax(q) - onehot(y)
                Eigen::Vector2d dq;
                dq[1] = (p1 - double(y)) * inv_n;
                dq[0] = -dq[1];
                backward(params, trace, dq, grads);
            }
            adam_step(params, grads, adam, config.lr);
        }
        log_debug("oracle epoch " + std::to_string(epoch + 1) + "/" +
                  std::to_string(config.epochs) + " mean_ce=" +
                  std::to_string(epoch_loss / double(labeled.size())));
    }
    return params;
}

double oracle_normal_prob(const QNetworkParams& oracle, const EpisodeState& state) {
    return 1.0 - softmax_binary(forward_q(oracle, state));
}

OracleMetrics evaluate_oracle(const QNetworkParams& oracle,
                              const std::vector<EpisodeState>& labeled) {
    if (labeled.empty()) {
        throw ContractViolation("cannot evaluate the oracle on an empty set");
    }
    OracleMetrics metrics;
    std::size_t correct = 0;
    for (const EpisodeState& s : labeled) {
        const int y = require_label(s);
        const double p1 = softmax_binary(forward_q(oracle, s));
        const double py = y == 1 ? p1 : 1.0 - p1;
        metrics.mean_cross_entropy -= std::log(std::max(py, 1e-12));
        correct += std::size_t((p1 >= 0.5) == (y == 1));
    }
    metrics.mean_cross_entropy /= double(labeled.size());
    metrics.accuracy = double(correct) / double(labeled.size());
    return metrics;
}

}  // namespace logdqn
