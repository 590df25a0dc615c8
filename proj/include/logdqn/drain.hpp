#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "logdqn/corpus.hpp"

namespace logdqn {

inline const std::string kWildcard = "<*>";

/// A mined log event: stable dense id plus token sequence with wildcard slots.
struct Template {
    int id = 0;
    std::vector<std::string> tokens;
    std::int64_t count = 0;
};

struct ParserConfig {
    int tree_depth = 4;          // >= 3
    double sim_threshold = 0.4;  // in (0, 1)
    int max_children = 100;      // >= 2
};

/// Fixed-depth prefix-tree template miner. The tree first partitions by token
/// count, then routes by the first (tree_depth - 2) tokens; leaves hold
/// candidate templates matched by token similarity.
///
/// Single-writer: parse calls mutate the tree and must be serialized.
class DrainParser {
public:
    explicit DrainParser(ParserConfig cfg = {});

    /// Replaces every token containing a decimal digit with the wildcard.
    static std::vector<std::string> preprocess(const std::vector<std::string>& tokens);

    /// Fraction of positions where the tokens match or the template holds a
    /// wildcard. Both sequences must have equal length.
    static double sim_seq(const std::vector<std::string>& template_tokens,
                          const std::vector<std::string>& log_tokens);

    /// Parses already-preprocessed tokens; returns the template id, creating
    /// or merging templates as needed.
    int parse(const std::vector<std::string>& masked_tokens);

    /// Convenience: preprocess + parse.
    int parse_record(const LogRecord& record);

    const std::vector<Template>& templates() const { return templates_; }

    /// Catalog file: one template per line, `id \t count \t tokens`.
    void dump(std::ostream& out) const;
    static std::vector<Template> load(std::istream& in);

    const ParserConfig& config() const { return cfg_; }

private:
    struct Node {
        std::map<std::string, Node> children;  // std::map allows the recursive value type
        std::vector<int> leaf_templates;  // indices into templates_, ascending
    };

    Node& descend(const std::vector<std::string>& masked_tokens);

    ParserConfig cfg_;
    std::map<std::size_t, Node> roots_;  // keyed by token count
    std::vector<Template> templates_;
};

}  // namespace logdqn
