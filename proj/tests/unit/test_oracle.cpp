#include <cmath>
#include <limits>

#include "doctest.h"
#include "helpers.hpp"
#include "logdqn/errors.hpp"
#include "logdqn/oracle.hpp"

using namespace logdqn;

namespace {

const NetDims kDims{6, 8, 8};

OracleConfig separable_config(int epochs) {
    OracleConfig cfg;
    cfg.dims = kDims;
    cfg.epochs = epochs;
    cfg.batch_size = 8;
    cfg.lr = 0.01;  // speeds convergence on the toy fixture
    cfg.seed = 5;
    return cfg;
}

}  // namespace

TEST_SUITE_BEGIN("oracle");

TEST_CASE("separable fixture reaches high accuracy after 20 epochs") {
    const auto data = testutil::separable_labeled_set(kDims.input, 5, 30, 99);
    const QNetworkParams model = train_oracle(data, separable_config(20));
    const OracleMetrics metrics = evaluate_oracle(model, data);
    CHECK(metrics.accuracy >= 0.99);
}

TEST_CASE("converged model is confident about normal examples") {
    const auto data = testutil::separable_labeled_set(kDims.input, 5, 30, 99);
    const QNetworkParams model = train_oracle(data, separable_config(20));
    double min_normal_p = 1.0;
    for (const auto& s : data) {
        if (*s.label == Label::Normal) {
            min_normal_p = std::min(min_normal_p, oracle_normal_prob(model, s));
        }
    }
    CHECK(min_normal_p > 0.9);
}

TEST_CASE("training loss is non-increasing across epoch prefixes") {
    const auto data = testutil::separable_labeled_set(kDims.input, 5, 30, 99);
    // Fixed seed makes epochs=k an exact prefix of the epochs=k+1 trajectory,
    // so evaluating each prefix reconstructs the loss curve of one run.
    double prev = std::numeric_limits<double>::infinity();
    for (int epochs = 1; epochs <= 12; ++epochs) {
        const QNetworkParams model = train_oracle(data, separable_config(epochs));
        const double loss = evaluate_oracle(model, data).mean_cross_entropy;
        CHECK(loss <= prev + 1e-6);
        prev = loss;
    }
}

TEST_CASE("zero epochs returns the seeded initialization unchanged") {
    const auto data = testutil::separable_labeled_set(kDims.input, 5, 4, 17);
    const QNetworkParams a = train_oracle(data, separable_config(0));
    const QNetworkParams b = train_oracle(data, separable_config(0));
    CHECK(a.flat() == b.flat());
    const QNetworkParams trained = train_oracle(data, separable_config(1));
    CHECK(a.flat() != trained.flat());
}

TEST_CASE("training is deterministic per seed") {
    const auto data = testutil::separable_labeled_set(kDims.input, 5, 10, 23);
    const QNetworkParams a = train_oracle(data, separable_config(6));
    const QNetworkParams b = train_oracle(data, separable_config(6));
    CHECK(a.flat() == b.flat());

    OracleConfig other = separable_config(6);
    other.seed = 6;
    CHECK(a.flat() != train_oracle(data, other).flat());
}

TEST_CASE("single-class or empty training sets are rejected") {
    auto data = testutil::separable_labeled_set(kDims.input, 5, 4, 31);
    std::vector<EpisodeState> normals_only;
    for (const auto& s : data) {
        if (*s.label == Label::Normal) normals_only.push_back(s);
    }
    CHECK_THROWS_AS(train_oracle(normals_only, separable_config(3)), ConfigError);
    CHECK_THROWS_AS(train_oracle({}, separable_config(3)), ConfigError);
}

TEST_CASE("probabilities are valid and complementary") {
    const auto data = testutil::separable_labeled_set(kDims.input, 5, 4, 37);
    const QNetworkParams model = train_oracle(data, separable_config(2));
    for (const auto& s : data) {
        const double p_normal = oracle_normal_prob(model, s);
        CHECK(p_normal >= 0.0);
        CHECK(p_normal <= 1.0);
        const double p_anomaly = softmax_binary(forward_q(model, s));
        CHECK(p_normal + p_anomaly == 1.0);  // defined as the exact complement
    }
}

TEST_CASE("zero-parameter model is maximally uncertain") {
    QNetworkParams model(kDims);
    model.set_zero();
    const auto s = testutil::toy_state(kDims.input, 5, 3, 3, Origin::Labeled, Label::Normal, "s");
    CHECK(oracle_normal_prob(model, s) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("oracle config validation rejects bad settings") {
    OracleConfig cfg = separable_config(3);
    cfg.epochs = -1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = separable_config(3);
    cfg.batch_size = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = separable_config(3);
    cfg.lr = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_SUITE_END();
