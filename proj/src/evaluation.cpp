#include "logdqn/evaluation.hpp"

#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>

#include "logdqn/errors.hpp"
#include "logdqn/logging.hpp"

namespace logdqn {

ConfusionCounts confusion(const std::vector<bool>& predicted_anomaly,
                          const std::vector<Label>& truth) {
    if (predicted_anomaly.size() != truth.size()) {
        throw ContractViolation("prediction/truth length mismatch: " +
                                std::to_string(predicted_anomaly.size()) + " vs " +
                                std::to_string(truth.size()));
    }
    ConfusionCounts c;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] == Label::Unknown) {
            throw ContractViolation("truth label " + std::to_string(i) + " is unknown");
        }
        const bool actual = truth[i] == Label::Anomaly;
        if (predicted_anomaly[i]) {
            ++(actual ? c.tp : c.fp);
        } else {
            ++(actual ? c.fn : c.tn);
        }
    }
    return c;
}

Prf1 prf1(const ConfusionCounts& counts) {
    auto ratio = [](double num, double den) { return den > 0.0 ? num / den : 0.0; };
    Prf1 m;
    m.precision = ratio(double(counts.tp), double(counts.tp + counts.fp));
    m.recall = ratio(double(counts.tp), double(counts.tp + counts.fn));
    m.f1 = ratio(2.0 * m.precision * m.recall, m.precision + m.recall);
    return m;
}

Prf1 evaluate_model(const QNetworkParams& params, const std::vector<EpisodeState>& test,
                    const std::vector<Label>& truth) {
    if (test.size() != truth.size()) {
        throw ContractViolation("test set and truth length mismatch");
    }
    std::vector<bool> preds(test.size());
    ForwardTrace trace;
    for (std::size_t i = 0; i < test.size(); ++i) {
        forward(params, test[i], trace);
        preds[i] = trace.q[1] > trace.q[0];
    }
    return prf1(confusion(preds, truth));
}

Variant variant_from_name(const std::string& name) {
    if (name == "full") return Variant::Full;
    if (name == "no_cross") return Variant::NoCross;
    if (name == "random_env") return Variant::RandomEnv;
    if (name == "euc_env") return Variant::EucEnv;
    throw ConfigError("unknown variant '" + name +
                      "'; expected full, no_cross, random_env or euc_env");
}

std::string variant_name(Variant variant) {
    switch (variant) {
        case Variant::Full: return "full";
        case Variant::NoCross: return "no_cross";
        case Variant::RandomEnv: return "random_env";
        case Variant::EucEnv: return "euc_env";
    }
    throw ContractViolation("unhandled variant");
}

namespace {

void check_data(const EvalData& data) {
    if (data.labeled == nullptr || data.unlabeled == nullptr || data.oracle == nullptr) {
        throw ContractViolation("run data must include labeled, unlabeled and oracle");
    }
    if ((data.test == nullptr) != (data.test_truth == nullptr)) {
        throw ContractViolation("test states and test truth must come together");
    }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

VariantResult run_one(Variant variant, const EvalData& data, const RewardConfig& rewards,
                      const EnvConfig& env_config, const TrainConfig& train_config,
                      const TrainHooks& hooks) {
    TrainConfig cfg = train_config;
    EnvConfig env_cfg = env_config;
    switch (variant) {
        case Variant::Full:
            break;
        case Variant::NoCross:
            cfg.lambda = 0.0;
            break;
        case Variant::RandomEnv:
            env_cfg.metric = TransitionMetric::Random;
            break;
        case Variant::EucEnv:
            env_cfg.metric = TransitionMetric::NegEuclidean;
            break;
    }
    env_cfg.seed = derive_seed(cfg.seed, "train.env");

    TrainHooks run_hooks = hooks;
    if (!run_hooks.evaluate && data.test != nullptr) {
        const auto* test = data.test;
        const auto* truth = data.test_truth;
        run_hooks.evaluate = [test, truth](const QNetworkParams& p) -> std::array<double, 3> {
            const Prf1 m = evaluate_model(p, *test, *truth);
            return {m.precision, m.recall, m.f1};
        };
    }

    const auto start = std::chrono::steady_clock::now();
    Environment env(data.labeled, data.unlabeled, env_cfg);
    VariantResult result{variant, {}, 0.0,
                         train(*data.labeled, *data.unlabeled, *data.oracle, env, rewards, cfg,
                               run_hooks)};
    result.runtime_s = seconds_since(start);
    if (data.test != nullptr) {
        result.metrics = evaluate_model(result.train.params, *data.test, *data.test_truth);
    }
    return result;
}

std::string format_value(double v) {
    std::ostringstream os;
    os.precision(15);
    os << v;
    return os.str();
}

}  // namespace

VariantResult run_variant(Variant variant, const EvalData& data, const RewardConfig& rewards,
                          const EnvConfig& env_config, const TrainConfig& train_config,
                          const TrainHooks& hooks) {
    check_data(data);
    return run_one(variant, data, rewards, env_config, train_config, hooks);
}

std::vector<ReportRow> sweep(
    const SweepGrid& grid, const EvalData& data, const RewardConfig& rewards,
    const EnvConfig& env_config, const TrainConfig& train_config,
    const std::function<TrainHooks(const std::string&)>& hooks_factory) {
    check_data(data);
    const std::vector<double> lambdas =
        grid.lambdas.empty() ? std::vector<double>{train_config.lambda} : grid.lambdas;
    const std::vector<double> r3s = grid.r3s.empty() ? std::vector<double>{rewards.r3} : grid.r3s;
    const std::vector<double> r4s = grid.r4s.empty() ? std::vector<double>{rewards.r4} : grid.r4s;

    std::vector<ReportRow> rows;
    for (double lambda : lambdas) {
        for (double r3 : r3s) {
            for (double r4 : r4s) {
                const std::string point = "lambda=" + format_value(lambda) +
                                          ";r3=" + format_value(r3) + ";r4=" + format_value(r4);
                TrainConfig cfg = train_config;
                cfg.lambda = lambda;
                // Seed follows the point's content, not its grid position, so
                // a repeated point reproduces the same run.
                cfg.seed = derive_seed(train_config.seed, "sweep." + point);
                RewardConfig rw = rewards;
                rw.r3 = r3;
                rw.r4 = r4;
                log_info("sweep point " + point);
                const TrainHooks hooks = hooks_factory ? hooks_factory(point) : TrainHooks{};
                const VariantResult res = run_one(Variant::Full, data, rw, env_config, cfg, hooks);
                rows.push_back({point, res.metrics, res.runtime_s});
            }
        }
    }
    return rows;
}

void write_report(const std::vector<ReportRow>& rows, std::ostream& out) {
    out << "variant_or_gridpoint,precision,recall,f1,runtime_s\n";
    out.precision(6);
    out << std::fixed;
    for (const ReportRow& row : rows) {
        out << row.name << ',' << row.metrics.precision << ',' << row.metrics.recall << ','
            << row.metrics.f1 << ',' << row.runtime_s << '\n';
    }
}

std::string metrics_csv_header() {
    return "episode, mean_reward, loss1, loss2, epsilon, test_precision, test_recall, test_f1";
}

std::string metrics_csv_row(const EpisodeMetrics& m) {
    std::ostringstream os;
    os.precision(17);
    os << m.episode << ", " << m.mean_reward << ", " << m.loss1 << ", " << m.loss2 << ", "
       << m.epsilon << ", " << m.test_precision << ", " << m.test_recall << ", " << m.test_f1;
    return os.str();
}

}  // namespace logdqn
