#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "logdqn/corpus.hpp"
#include "logdqn/embedding.hpp"
#include "logdqn/rng.hpp"

namespace testutil {

/// Self-cleaning scratch directory for file-handling tests.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        base_ = std::filesystem::temp_directory_path() /
                ("logdqn_test_" + tag + "_" + std::to_string(counter_++));
        std::filesystem::remove_all(base_);
        std::filesystem::create_directories(base_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(base_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string path(const std::string& name = "") const {
        return name.empty() ? base_.string() : (base_ / name).string();
    }

private:
    static inline int counter_ = 0;
    std::filesystem::path base_;
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// Random episode state with consistent pooled vector; `len` columns filled.
inline logdqn::EpisodeState toy_state(int d, int t_max, int len, std::uint64_t seed,
                                      logdqn::Origin origin,
                                      std::optional<logdqn::Label> label,
                                      const std::string& seq_id) {
    logdqn::EpisodeState s;
    s.seq_id = seq_id;
    s.origin = origin;
    s.label = label;
    s.length = len;
    s.vectors = Eigen::MatrixXd::Zero(d, t_max);
    logdqn::Rng rng(seed);
    for (int t = 0; t < len; ++t) {
        for (int i = 0; i < d; ++i) {
            s.vectors(i, t) = rng.uniform(-1.0, 1.0);
        }
    }
    s.pooled = s.vectors.leftCols(len).rowwise().mean();
    return s;
}

/// State whose pooled vector is exactly `pooled` (single column).
inline logdqn::EpisodeState pooled_state(const Eigen::VectorXd& pooled,
                                         const std::string& seq_id) {
    logdqn::EpisodeState s;
    s.seq_id = seq_id;
    s.origin = logdqn::Origin::Unlabeled;
    s.length = 1;
    s.vectors = pooled;
    s.pooled = pooled;
    return s;
}

/// Twelve disjoint five-token patterns plus a digit token that masks to the
/// wildcard; pairwise masked similarity is 1/6.
inline std::vector<std::string> twelve_pattern_lines(int repeats_per_pattern) {
    const std::string letters = "abcdefghijkl";
    std::vector<std::string> lines;
    for (int rep = 0; rep < repeats_per_pattern; ++rep) {
        for (int p = 0; p < 12; ++p) {
            std::ostringstream line;
            for (int t = 0; t < 5; ++t) {
                line << 'p' << letters[static_cast<std::size_t>(p)] << "_"
                     << static_cast<char>('a' + t) << ' ';
            }
            line << "id" << (rep * 12 + p);
            lines.push_back(line.str());
        }
    }
    return lines;
}

/// Linearly separable labeled states: normals cluster near -e0, anomalies
/// near +e0, with deterministic jitter elsewhere.
inline std::vector<logdqn::EpisodeState> separable_labeled_set(int d, int t_max, int n_per_class,
                                                               std::uint64_t seed) {
    std::vector<logdqn::EpisodeState> out;
    logdqn::Rng rng(seed);
    for (int k = 0; k < 2 * n_per_class; ++k) {
        const bool anomaly = k % 2 == 1;
        logdqn::EpisodeState s;
        s.seq_id = (anomaly ? "anom_" : "norm_") + std::to_string(k);
        s.origin = logdqn::Origin::Labeled;
        s.label = anomaly ? logdqn::Label::Anomaly : logdqn::Label::Normal;
        s.length = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(t_max)));
        s.vectors = Eigen::MatrixXd::Zero(d, t_max);
        for (int t = 0; t < s.length; ++t) {
            s.vectors(0, t) = (anomaly ? 1.0 : -1.0) + rng.uniform(-0.05, 0.05);
            for (int i = 1; i < d; ++i) s.vectors(i, t) = rng.uniform(-0.2, 0.2);
        }
        s.pooled = s.vectors.leftCols(s.length).rowwise().mean();
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace testutil
