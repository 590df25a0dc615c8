#include "logdqn/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "logdqn/errors.hpp"
#include "logdqn/logging.hpp"
#include "logdqn/rng.hpp"

namespace logdqn {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::size_t i = 0;
    const std::size_t n = line.size();
    while (i < n) {
        while (i < n && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t j = i;
        while (j < n && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        if (j > i) out.emplace_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

/// Extracts the first substring of the form blk_-?[0-9]+ from a token, or
/// empty if none.
std::string extract_block_id(const std::string& token) {
    const std::string tag = "blk_";
    const std::size_t pos = token.find(tag);
    if (pos == std::string::npos) return {};
    std::size_t i = pos + tag.size();
    std::size_t end = i;
    if (end < token.size() && token[end] == '-') ++end;
    const std::size_t digits_begin = end;
    while (end < token.size() && std::isdigit(static_cast<unsigned char>(token[end]))) ++end;
    if (end == digits_begin) return {};
    return token.substr(pos, end - pos);
}

// BGL header layout: label ts date node time node type component level msg...
constexpr std::size_t kBglNodeField = 3;
constexpr std::size_t kBglContentField = 9;

/// Encodes an index as a digit-free lowercase tag ("aa", "ab", ...), so
/// template-identifying tokens survive digit masking.
std::string letter_code(int value) {
    std::string code;
    int v = value;
    for (int k = 0; k < 3; ++k) {
        code.push_back(static_cast<char>('a' + v % 26));
        v /= 26;
    }
    std::reverse(code.begin(), code.end());
    return code;
}

}  // namespace

std::string label_name(Label label) {
    switch (label) {
        case Label::Normal: return "Normal";
        case Label::Anomaly: return "Anomaly";
        case Label::Unknown: return "Unknown";
    }
    return "Unknown";
}

Label label_from_name(const std::string& name) {
    if (name == "Normal") return Label::Normal;
    if (name == "Anomaly") return Label::Anomaly;
    if (name == "Unknown") return Label::Unknown;
    throw ParseError("unknown label name: '" + name + "'");
}

Adapter adapter_from_name(const std::string& name) {
    if (name == "hdfs") return Adapter::Hdfs;
    if (name == "bgl") return Adapter::Bgl;
    if (name == "generic") return Adapter::Generic;
    throw ConfigError("unknown adapter: '" + name + "' (expected hdfs, bgl or generic)");
}

std::string adapter_name(Adapter adapter) {
    switch (adapter) {
        case Adapter::Hdfs: return "hdfs";
        case Adapter::Bgl: return "bgl";
        case Adapter::Generic: return "generic";
    }
    return "generic";
}

std::optional<LogRecord> record_from_line(const std::string& line, Adapter adapter,
                                          std::int64_t line_no) {
    std::vector<std::string> tokens = split_ws(line);
    if (tokens.empty()) return std::nullopt;

    LogRecord rec;
    rec.line_no = line_no;
    rec.timestamp = line_no;
    switch (adapter) {
        case Adapter::Hdfs: {
            for (const std::string& tok : tokens) {
                std::string id = extract_block_id(tok);
                if (!id.empty()) {
                    rec.session_key = std::move(id);
                    break;
                }
            }
            rec.content = std::move(tokens);
            break;
        }
        case Adapter::Bgl: {
            rec.label = tokens[0] == "-" ? Label::Normal : Label::Anomaly;
            if (tokens.size() > kBglNodeField) rec.session_key = tokens[kBglNodeField];
            if (tokens.size() > kBglContentField) {
                rec.content.assign(tokens.begin() + kBglContentField, tokens.end());
            } else {
                rec.content = std::move(tokens);
            }
            break;
        }
        case Adapter::Generic: {
            rec.content = std::move(tokens);
            break;
        }
    }
    return rec;
}

std::vector<LogRecord> read_raw(const std::string& path, Adapter adapter) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open log file: " + path);
    std::vector<LogRecord> records;
    std::string line;
    std::int64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto rec = record_from_line(line, adapter, line_no)) {
            records.push_back(std::move(*rec));
        }
    }
    if (in.bad()) throw IoError("read failure on log file: " + path);
    log_debug("read " + std::to_string(records.size()) + " records from " + path);
    return records;
}

void attach_labels(std::vector<LogRecord>& records, const std::string& label_file) {
    std::ifstream in(label_file);
    if (!in) throw IoError("cannot open label file: " + label_file);

    std::unordered_map<std::string, Label> map;
    std::string line;
    std::int64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line_no == 1 && line == "BlockId,Label") continue;
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos || comma == 0 || comma + 1 >= line.size()) {
            throw ParseError(label_file + ":" + std::to_string(line_no) +
                             ": expected `session_key,label`");
        }
        const std::string key = line.substr(0, comma);
        const std::string value = line.substr(comma + 1);
        Label label;
        if (value == "Normal") {
            label = Label::Normal;
        } else if (value == "Anomaly") {
            label = Label::Anomaly;
        } else {
            throw ParseError(label_file + ":" + std::to_string(line_no) + ": bad label '" +
                             value + "'");
        }
        auto [it, inserted] = map.emplace(key, label);
        if (!inserted && it->second != label) {
            throw ParseError(label_file + ":" + std::to_string(line_no) +
                             ": conflicting labels for key '" + key + "'");
        }
    }
    if (in.bad()) throw IoError("read failure on label file: " + label_file);

    for (LogRecord& rec : records) {
        if (!rec.session_key) continue;
        auto it = map.find(*rec.session_key);
        if (it != map.end()) rec.label = it->second;
    }
}

SyntheticCorpus generate_synthetic(const SyntheticConfig& cfg) {
    if (!(cfg.contamination > 0.0 && cfg.contamination < 0.5)) {
        throw ConfigError("contamination must lie in (0, 0.5), got " +
                          std::to_string(cfg.contamination));
    }
    if (cfg.templates_k < 5) {
        throw ConfigError("templates_k must be at least 5, got " +
                          std::to_string(cfg.templates_k));
    }
    if (cfg.n_sessions < 1) throw ConfigError("n_sessions must be positive");

    Rng rng(derive_seed(cfg.seed, "synth"));

    // Template vocabulary. Four identifying tokens are unique per template so
    // any two masked templates of equal length agree only on wildcard slots,
    // keeping them below the default merge threshold. The last two templates
    // are reserved for anomalous sessions.
    const int k = cfg.templates_k;
    const int normal_k = k - 2;
    std::vector<std::vector<std::string>> vocab(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        const std::string code = letter_code(i);
        vocab[static_cast<std::size_t>(i)] = {"m" + code, "op" + code, "unit" + code,
                                              "phase" + code};
    }

    // Fixed n-gram patterns over the normal vocabulary.
    const int n_patterns = 5;
    std::vector<std::vector<int>> patterns(n_patterns);
    for (int j = 0; j < n_patterns; ++j) {
        const int length = 10 + j;
        const int start = j * normal_k / n_patterns;
        const int step = normal_k > 1 ? j % (normal_k - 1) + 1 : 1;
        for (int m = 0; m < length; ++m) {
            patterns[static_cast<std::size_t>(j)].push_back((start + m * step) % normal_k);
        }
    }

    const auto n = static_cast<std::size_t>(cfg.n_sessions);
    const auto n_anomalous =
        static_cast<std::size_t>(std::llround(static_cast<double>(cfg.n_sessions) *
                                              cfg.contamination));
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);
    std::vector<bool> anomalous(n, false);
    for (std::size_t i = 0; i < n_anomalous; ++i) anomalous[order[i]] = true;

    SyntheticCorpus out;
    out.records.reserve(n * 12);
    out.labels.reserve(n);

    std::int64_t line_no = 0;
    for (std::size_t s = 0; s < n; ++s) {
        const std::string key = "blk_" + std::to_string(1000000 + s);
        std::vector<int> events = patterns[rng.index(static_cast<std::size_t>(n_patterns))];
        if (anomalous[s]) {
            if (rng.bernoulli(0.5)) {
                // Rare-template anomaly.
                const int rare = normal_k + static_cast<int>(rng.index(2));
                const std::size_t pos = rng.index(events.size() + 1);
                events.insert(events.begin() + static_cast<std::ptrdiff_t>(pos), rare);
            } else {
                // Order violation: swap two adjacent distinct events.
                std::size_t pos = rng.index(events.size() - 1);
                for (std::size_t tries = 0; tries < events.size() && events[pos] == events[pos + 1];
                     ++tries) {
                    pos = (pos + 1) % (events.size() - 1);
                }
                std::swap(events[pos], events[pos + 1]);
            }
        }
        const Label label = anomalous[s] ? Label::Anomaly : Label::Normal;
        out.labels.emplace_back(key, label);
        for (int event : events) {
            LogRecord rec;
            rec.line_no = ++line_no;
            rec.timestamp = rec.line_no;
            rec.session_key = key;
            rec.label = label;
            rec.content = vocab[static_cast<std::size_t>(event)];
            rec.content.push_back(std::to_string(1 + rng.index(900)) + "ms");
            rec.content.push_back(key);
            out.records.push_back(std::move(rec));
        }
    }

    out.manifest.record_count = static_cast<std::int64_t>(out.records.size());
    std::int64_t anomalous_records = 0;
    for (const LogRecord& rec : out.records) {
        if (rec.label == Label::Anomaly) ++anomalous_records;
    }
    out.manifest.anomaly_fraction =
        out.records.empty() ? 0.0
                            : static_cast<double>(anomalous_records) /
                                  static_cast<double>(out.records.size());
    out.manifest.adapter_name = "synthetic";
    out.manifest.seed = cfg.seed;
    return out;
}

void dump_records(const std::vector<LogRecord>& records, std::ostream& out) {
    for (const LogRecord& rec : records) {
        out << rec.line_no << '\t' << (rec.session_key ? *rec.session_key : "") << '\t'
            << label_name(rec.label) << '\t';
        for (std::size_t i = 0; i < rec.content.size(); ++i) {
            if (i > 0) out << ' ';
            out << rec.content[i];
        }
        out << '\n';
    }
}

void dump_raw_lines(const std::vector<LogRecord>& records, std::ostream& out) {
    for (const LogRecord& rec : records) {
        for (std::size_t i = 0; i < rec.content.size(); ++i) {
            if (i > 0) out << ' ';
            out << rec.content[i];
        }
        out << '\n';
    }
}

void dump_labels(const std::vector<std::pair<std::string, Label>>& labels, std::ostream& out) {
    for (const auto& [key, label] : labels) {
        out << key << ',' << label_name(label) << '\n';
    }
}

}  // namespace logdqn
