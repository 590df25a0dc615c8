#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "logdqn/corpus.hpp"

namespace logdqn {

/// A record reduced to what grouping needs: its template id plus bookkeeping.
struct ParsedEvent {
    std::int64_t line_no = 0;
    std::optional<std::string> session_key;
    Label label = Label::Unknown;
    int template_id = 0;
};

std::vector<ParsedEvent> zip_events(const std::vector<LogRecord>& records,
                                    const std::vector<int>& template_ids);

/// An ordered template-id sequence with the OR-derived label: Anomaly if any
/// member is Anomaly, else Unknown if any member is Unknown, else Normal.
struct LogSequence {
    std::string seq_id;
    std::vector<int> template_ids;
    Label label = Label::Unknown;
};

/// One sequence per distinct session key, ordered by first appearance;
/// within-sequence order follows record order. Every event must carry a key.
std::vector<LogSequence> group_by_session(const std::vector<ParsedEvent>& events);

/// Fixed-size windows at offsets 0, stride, 2*stride, ... A trailing partial
/// window is emitted only when the stream is shorter than one full window.
std::vector<LogSequence> sliding_windows(const std::vector<ParsedEvent>& events,
                                         std::size_t size, std::size_t stride);

struct SplitConfig {
    double train_fraction = 0.8;    // in (0, 1)
    double labeled_fraction = 0.3;  // |D_l| / (|D_l| + |D_u|), in (0, 1)
    std::uint64_t seed = 0;
};

struct SplitResult {
    std::vector<LogSequence> labeled;    // D_l
    std::vector<LogSequence> unlabeled;  // D_u (labels retained for post-hoc eval only)
    std::vector<LogSequence> test;
};

/// Stratified split preserving the contamination rate in every part.
/// Deterministic per seed. Requires every sequence to carry a known label and
/// every part to receive at least one sequence of each class.
SplitResult split_train_test(const std::vector<LogSequence>& sequences, const SplitConfig& cfg);

/// Sequence file: `seq_id \t label \t comma-joined-template-ids` per line.
void dump_sequences(const std::vector<LogSequence>& sequences, std::ostream& out);
std::vector<LogSequence> load_sequences(std::istream& in);

/// Event file: `line_no \t session_key \t label \t template_id` per line,
/// with `-` standing for a missing session key.
void dump_events(const std::vector<ParsedEvent>& events, std::ostream& out);
std::vector<ParsedEvent> load_events(std::istream& in);

}  // namespace logdqn
