#include "logdqn/drain.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <ostream>
#include <sstream>

#include "logdqn/errors.hpp"

namespace logdqn {

namespace {

bool has_digit(const std::string& token) {
    for (unsigned char c : token) {
        if (std::isdigit(c)) return true;
    }
    return false;
}

}  // namespace

DrainParser::DrainParser(ParserConfig cfg) : cfg_(cfg) {
    if (cfg_.tree_depth < 3) throw ConfigError("tree_depth must be >= 3");
    if (!(cfg_.sim_threshold > 0.0 && cfg_.sim_threshold < 1.0)) {
        throw ConfigError("sim_threshold must lie in (0, 1)");
    }
    if (cfg_.max_children < 2) throw ConfigError("max_children must be >= 2");
}

std::vector<std::string> DrainParser::preprocess(const std::vector<std::string>& tokens) {
    std::vector<std::string> masked;
    masked.reserve(tokens.size());
    for (const std::string& tok : tokens) {
        masked.push_back(has_digit(tok) ? kWildcard : tok);
    }
    return masked;
}

double DrainParser::sim_seq(const std::vector<std::string>& template_tokens,
                            const std::vector<std::string>& log_tokens) {
    if (template_tokens.size() != log_tokens.size()) {
        throw ContractViolation("sim_seq: sequences differ in length (" +
                                std::to_string(template_tokens.size()) + " vs " +
                                std::to_string(log_tokens.size()) + ")");
    }
    if (template_tokens.empty()) return 1.0;
    std::size_t matches = 0;
    for (std::size_t i = 0; i < template_tokens.size(); ++i) {
        if (template_tokens[i] == kWildcard || template_tokens[i] == log_tokens[i]) ++matches;
    }
    return static_cast<double>(matches) / static_cast<double>(template_tokens.size());
}

DrainParser::Node& DrainParser::descend(const std::vector<std::string>& masked_tokens) {
    Node* node = &roots_[masked_tokens.size()];
    const std::size_t route_len =
        std::min<std::size_t>(masked_tokens.size(), static_cast<std::size_t>(cfg_.tree_depth - 2));
    for (std::size_t i = 0; i < route_len; ++i) {
        const std::string& tok = masked_tokens[i];
        if (tok != kWildcard) {
            auto it = node->children.find(tok);
            if (it != node->children.end()) {
                node = &it->second;
                continue;
            }
            if (node->children.size() < static_cast<std::size_t>(cfg_.max_children)) {
                node = &node->children.try_emplace(tok).first->second;
                continue;
            }
        }
        node = &node->children.try_emplace(kWildcard).first->second;
    }
    return *node;
}

int DrainParser::parse(const std::vector<std::string>& masked_tokens) {
    if (masked_tokens.empty()) throw ContractViolation("parse: empty token sequence");
    Node& leaf = descend(masked_tokens);

    int best_id = -1;
    double best_sim = -1.0;
    for (int id : leaf.leaf_templates) {
        const double sim = sim_seq(templates_[static_cast<std::size_t>(id)].tokens, masked_tokens);
        if (sim > best_sim) {
            best_sim = sim;
            best_id = id;
        }
    }

    if (best_id >= 0 && best_sim >= cfg_.sim_threshold) {
        Template& tmpl = templates_[static_cast<std::size_t>(best_id)];
        for (std::size_t i = 0; i < tmpl.tokens.size(); ++i) {
            if (tmpl.tokens[i] != masked_tokens[i]) tmpl.tokens[i] = kWildcard;
        }
        ++tmpl.count;
        return best_id;
    }

    Template tmpl;
    tmpl.id = static_cast<int>(templates_.size());
    tmpl.tokens = masked_tokens;
    tmpl.count = 1;
    templates_.push_back(std::move(tmpl));
    leaf.leaf_templates.push_back(templates_.back().id);
    return templates_.back().id;
}

int DrainParser::parse_record(const LogRecord& record) {
    return parse(preprocess(record.content));
}

void DrainParser::dump(std::ostream& out) const {
    for (const Template& tmpl : templates_) {
        out << tmpl.id << '\t' << tmpl.count << '\t';
        for (std::size_t i = 0; i < tmpl.tokens.size(); ++i) {
            if (i > 0) out << ' ';
            out << tmpl.tokens[i];
        }
        out << '\n';
    }
}

std::vector<Template> DrainParser::load(std::istream& in) {
    std::vector<Template> catalog;
    std::string line;
    std::int64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream fields(line);
        Template tmpl;
        std::string tokens_part;
        if (!(fields >> tmpl.id >> tmpl.count)) {
            throw ParseError("template catalog line " + std::to_string(line_no) +
                             ": expected `id count tokens`");
        }
        std::getline(fields, tokens_part);
        std::istringstream toks(tokens_part);
        std::string tok;
        while (toks >> tok) tmpl.tokens.push_back(tok);
        if (tmpl.tokens.empty()) {
            throw ParseError("template catalog line " + std::to_string(line_no) +
                             ": template has no tokens");
        }
        if (tmpl.id != static_cast<int>(catalog.size())) {
            throw ParseError("template catalog line " + std::to_string(line_no) +
                             ": ids must be dense and ascending");
        }
        catalog.push_back(std::move(tmpl));
    }
    return catalog;
}

}  // namespace logdqn
