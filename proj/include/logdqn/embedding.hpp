#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "logdqn/drain.hpp"
#include "logdqn/windowing.hpp"

namespace logdqn {

/// Document-frequency statistics over a template catalog; each template is
/// one document.
struct CorpusTermStats {
    std::size_t n_templates = 0;
    std::unordered_map<std::string, std::int64_t> df;
};

CorpusTermStats compute_term_stats(const std::vector<Template>& catalog);

/// Deterministic feature-hashing TF-IDF embedder. Each non-wildcard token is
/// hashed to a signed bucket; bucket weights accumulate
/// tf * ln(1 + N / df) and the result is L2-normalized. A template holding
/// only wildcards maps to the zero vector.
class HashingEmbedder {
public:
    explicit HashingEmbedder(int dim = 64, std::uint64_t hash_seed = 0);

    Eigen::VectorXd embed_template(const Template& tmpl, const CorpusTermStats& stats) const;

    /// One vector per catalog id, in id order.
    std::vector<Eigen::VectorXd> embed_catalog(const std::vector<Template>& catalog) const;

    int dim() const { return dim_; }
    std::uint64_t hash_seed() const { return hash_seed_; }

private:
    int dim_;
    std::uint64_t hash_seed_;
};

/// External embedding file: `template_id \t v1,v2,...,vd` rows with uniform
/// dimension, covering every id in [0, n_templates).
std::vector<Eigen::VectorXd> load_external_embeddings(const std::string& path,
                                                      std::size_t n_templates);

/// Same format, with the template count inferred from the row count; ids
/// must still be dense.
std::vector<Eigen::VectorXd> load_embeddings(const std::string& path);

void dump_embeddings(const std::vector<Eigen::VectorXd>& table, std::ostream& out);

enum class Origin { Labeled, Unlabeled };

/// A log semantic sequence as presented to the agent. Event vectors are
/// stored one per column (d x t_max, zero-padded past `length`); `pooled` is
/// the mean over the true length and backs state similarity.
///
/// Label hiding is structural: only Labeled states carry a label.
struct EpisodeState {
    Eigen::MatrixXd vectors;  // d x t_max, column per event
    int length = 0;           // true length, 1 <= length <= t_max
    Origin origin = Origin::Unlabeled;
    std::optional<Label> label;  // present iff origin == Labeled
    std::string seq_id;
    Eigen::VectorXd pooled;  // d
};

/// Sequences longer than t_max keep the most recent t_max events; shorter
/// ones record their true length and zero-pad.
EpisodeState embed_sequence(const LogSequence& seq, const std::vector<Eigen::VectorXd>& table,
                            int t_max, Origin origin);

std::vector<EpisodeState> embed_sequences(const std::vector<LogSequence>& seqs,
                                          const std::vector<Eigen::VectorXd>& table, int t_max,
                                          Origin origin);

/// Cosine similarity of the mean-pooled sequence vectors, in [-1, 1];
/// 0 by convention when either pooled vector is zero.
double state_similarity(const EpisodeState& a, const EpisodeState& b);

}  // namespace logdqn
