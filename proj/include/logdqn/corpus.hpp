#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace logdqn {

enum class Label { Normal, Anomaly, Unknown };

std::string label_name(Label label);
Label label_from_name(const std::string& name);

/// One parsed raw log line.
struct LogRecord {
    std::int64_t line_no = 0;
    std::optional<std::int64_t> timestamp;  // monotonic tag, not wall clock
    std::optional<std::string> session_key;
    std::vector<std::string> content;  // whitespace-split message body, non-empty
    Label label = Label::Unknown;
};

struct CorpusManifest {
    std::int64_t record_count = 0;
    double anomaly_fraction = 0.0;  // over records with known labels only
    std::string adapter_name;
    std::uint64_t seed = 0;  // synthetic corpora only
};

enum class Adapter { Hdfs, Bgl, Generic };

Adapter adapter_from_name(const std::string& name);
std::string adapter_name(Adapter adapter);

/// Reads a plain-text log file, one message per line. Empty (or
/// whitespace-only) lines yield no record. Record order follows line order.
///
/// hdfs: session_key is the first token matching blk_ + optional minus +
///       digits; label left Unknown (labels arrive via attach_labels).
/// bgl:  label is Normal iff the first field is "-", Anomaly otherwise;
///       session_key is the node id field; the message body starts after the
///       header fields.
/// generic: the whole line is content, no session key.
std::vector<LogRecord> read_raw(const std::string& path, Adapter adapter);

/// Adapter logic for a single pre-split line; exposed for tests.
std::optional<LogRecord> record_from_line(const std::string& line, Adapter adapter,
                                          std::int64_t line_no);

/// Label file: one `session_key,label` pair per line, label in
/// {Normal, Anomaly}. Records whose session_key appears receive that label;
/// others keep Unknown. Conflicting duplicate keys are an error. A single
/// leading `BlockId,Label` header row is tolerated.
void attach_labels(std::vector<LogRecord>& records, const std::string& label_file);

struct SyntheticConfig {
    std::int64_t n_sessions = 1000;
    int templates_k = 50;
    double contamination = 0.03;  // in (0, 0.5)
    std::uint64_t seed = 0;
};

struct SyntheticCorpus {
    std::vector<LogRecord> records;                        // labels attached
    std::vector<std::pair<std::string, Label>> labels;     // ground truth per session
    CorpusManifest manifest;
};

/// Deterministic synthetic corpus for desk-scale experiments. Normal sessions
/// follow one of a few fixed template n-gram patterns; anomalous sessions
/// contain a rare template or an order violation. Exactly
/// round(n_sessions * contamination) sessions are anomalous. Session keys use
/// the blk_ pattern so the corpus round-trips through the hdfs adapter.
SyntheticCorpus generate_synthetic(const SyntheticConfig& cfg);

/// TSV record stream: `line_no \t session_key \t label \t content`.
void dump_records(const std::vector<LogRecord>& records, std::ostream& out);

/// Raw log lines (space-joined content), the inverse of read_raw for
/// synthetic corpora.
void dump_raw_lines(const std::vector<LogRecord>& records, std::ostream& out);

/// Label file in the attach_labels format.
void dump_labels(const std::vector<std::pair<std::string, Label>>& labels, std::ostream& out);

}  // namespace logdqn
