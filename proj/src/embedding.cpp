#include "logdqn/embedding.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "logdqn/errors.hpp"
#include "logdqn/hashing.hpp"

namespace logdqn {

CorpusTermStats compute_term_stats(const std::vector<Template>& catalog) {
    CorpusTermStats stats;
    stats.n_templates = catalog.size();
    std::unordered_map<std::string, int> seen_at;  // token -> last template id
    for (const Template& tmpl : catalog) {
        for (const std::string& tok : tmpl.tokens) {
            if (tok == kWildcard) continue;
            auto [it, inserted] = seen_at.emplace(tok, tmpl.id);
            if (inserted || it->second != tmpl.id) {
                it->second = tmpl.id;
                ++stats.df[tok];
            }
        }
    }
    return stats;
}

HashingEmbedder::HashingEmbedder(int dim, std::uint64_t hash_seed)
    : dim_(dim), hash_seed_(hash_seed) {
    if (dim < 8) throw ConfigError("embedding dimension must be >= 8, got " + std::to_string(dim));
}

Eigen::VectorXd HashingEmbedder::embed_template(const Template& tmpl,
                                                const CorpusTermStats& stats) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim_);
    for (const std::string& tok : tmpl.tokens) {
        if (tok == kWildcard) continue;
        auto it = stats.df.find(tok);
        if (it == stats.df.end()) {
            throw ContractViolation("term statistics do not cover token '" + tok + "'");
        }
        const double idf = std::log(1.0 + static_cast<double>(stats.n_templates) /
                                              static_cast<double>(it->second));
        const std::uint64_t h = fnv1a64(tok, kFnvOffsetBasis ^ hash_seed_);
        const auto bucket = static_cast<Eigen::Index>(h % static_cast<std::uint64_t>(dim_));
        const double sign = (h >> 32 & 1) != 0 ? 1.0 : -1.0;
        v[bucket] += sign * idf;
    }
    const double norm = v.norm();
    if (norm > 0.0) v /= norm;
    return v;
}

std::vector<Eigen::VectorXd> HashingEmbedder::embed_catalog(
    const std::vector<Template>& catalog) const {
    const CorpusTermStats stats = compute_term_stats(catalog);
    std::vector<Eigen::VectorXd> table;
    table.reserve(catalog.size());
    for (const Template& tmpl : catalog) table.push_back(embed_template(tmpl, stats));
    return table;
}

std::vector<Eigen::VectorXd> load_external_embeddings(const std::string& path,
                                                      std::size_t n_templates) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open embedding file: " + path);

    std::vector<Eigen::VectorXd> table(n_templates);
    std::vector<bool> present(n_templates, false);
    Eigen::Index dim = -1;
    std::string line;
    std::int64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::size_t tab = line.find('\t');
        if (tab == std::string::npos) {
            throw ParseError(path + ":" + std::to_string(line_no) +
                             ": expected `template_id\\tv1,v2,...`");
        }
        const int id = std::stoi(line.substr(0, tab));
        if (id < 0 || static_cast<std::size_t>(id) >= n_templates) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": template id " +
                             std::to_string(id) + " outside the catalog");
        }
        if (present[static_cast<std::size_t>(id)]) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": duplicate template id " +
                             std::to_string(id));
        }
        std::vector<double> values;
        std::istringstream fields(line.substr(tab + 1));
        std::string field;
        while (std::getline(fields, field, ',')) {
            if (field.empty()) continue;
            values.push_back(std::stod(field));
        }
        if (dim < 0) dim = static_cast<Eigen::Index>(values.size());
        if (static_cast<Eigen::Index>(values.size()) != dim || values.empty()) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(dim) + " values, got " +
                             std::to_string(values.size()));
        }
        Eigen::VectorXd v(dim);
        for (Eigen::Index i = 0; i < dim; ++i) v[i] = values[static_cast<std::size_t>(i)];
        table[static_cast<std::size_t>(id)] = std::move(v);
        present[static_cast<std::size_t>(id)] = true;
    }

    std::string missing;
    for (std::size_t id = 0; id < n_templates; ++id) {
        if (!present[id]) missing += (missing.empty() ? "" : ", ") + std::to_string(id);
    }
    if (!missing.empty()) {
        throw ParseError(path + ": embeddings missing for template ids: " + missing);
    }
    return table;
}

std::vector<Eigen::VectorXd> load_embeddings(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open embedding file: " + path);
    std::size_t rows = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) ++rows;
    }
    return load_external_embeddings(path, rows);
}

void dump_embeddings(const std::vector<Eigen::VectorXd>& table, std::ostream& out) {
    out.precision(17);
    for (std::size_t id = 0; id < table.size(); ++id) {
        out << id << '\t';
        for (Eigen::Index i = 0; i < table[id].size(); ++i) {
            if (i > 0) out << ',';
            out << table[id][i];
        }
        out << '\n';
    }
}

EpisodeState embed_sequence(const LogSequence& seq, const std::vector<Eigen::VectorXd>& table,
                            int t_max, Origin origin) {
    if (t_max < 1) throw ConfigError("t_max must be >= 1");
    if (seq.template_ids.empty()) throw ContractViolation("cannot embed an empty sequence");
    const auto dim = table.empty() ? 0 : table.front().size();

    EpisodeState state;
    state.seq_id = seq.seq_id;
    state.origin = origin;
    if (origin == Origin::Labeled) {
        if (seq.label == Label::Unknown) {
            throw ContractViolation("labeled state '" + seq.seq_id + "' has no known label");
        }
        state.label = seq.label;
    }

    const std::size_t total = seq.template_ids.size();
    const std::size_t keep = std::min<std::size_t>(total, static_cast<std::size_t>(t_max));
    const std::size_t begin = total - keep;  // keep the most recent events
    state.length = static_cast<int>(keep);
    state.vectors = Eigen::MatrixXd::Zero(dim, t_max);
    for (std::size_t i = 0; i < keep; ++i) {
        const int id = seq.template_ids[begin + i];
        if (id < 0 || static_cast<std::size_t>(id) >= table.size()) {
            throw ConfigError("sequence '" + seq.seq_id + "' references template id " +
                              std::to_string(id) + " missing from the embedding table");
        }
        state.vectors.col(static_cast<Eigen::Index>(i)) = table[static_cast<std::size_t>(id)];
    }
    state.pooled = state.vectors.leftCols(state.length).rowwise().mean();
    return state;
}

std::vector<EpisodeState> embed_sequences(const std::vector<LogSequence>& seqs,
                                          const std::vector<Eigen::VectorXd>& table, int t_max,
                                          Origin origin) {
    std::vector<EpisodeState> states;
    states.reserve(seqs.size());
    for (const LogSequence& seq : seqs) states.push_back(embed_sequence(seq, table, t_max, origin));
    return states;
}

double state_similarity(const EpisodeState& a, const EpisodeState& b) {
    if (a.pooled.size() != b.pooled.size()) {
        throw ContractViolation("state_similarity: dimension mismatch");
    }
    const double na = a.pooled.norm();
    const double nb = b.pooled.norm();
    if (na == 0.0 || nb == 0.0) return 0.0;
    return a.pooled.dot(b.pooled) / (na * nb);
}

}  // namespace logdqn
