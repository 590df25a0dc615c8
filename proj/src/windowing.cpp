#include "logdqn/windowing.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "logdqn/errors.hpp"
#include "logdqn/rng.hpp"

namespace logdqn {

namespace {

Label combine(Label acc, Label member) {
    if (acc == Label::Anomaly || member == Label::Anomaly) return Label::Anomaly;
    if (acc == Label::Unknown || member == Label::Unknown) return Label::Unknown;
    return Label::Normal;
}

Label label_of_range(const std::vector<ParsedEvent>& events, std::size_t begin, std::size_t end) {
    Label label = Label::Normal;
    for (std::size_t i = begin; i < end; ++i) label = combine(label, events[i].label);
    return label;
}

std::int64_t parse_int_field(const std::string& field, const char* file_kind,
                             std::int64_t line_no) {
    try {
        std::size_t used = 0;
        const long long value = std::stoll(field, &used);
        if (used != field.size()) throw std::invalid_argument("trailing characters");
        return value;
    } catch (const std::exception&) {
        throw ParseError(std::string(file_kind) + " line " + std::to_string(line_no) +
                         ": bad integer `" + field + "`");
    }
}

}  // namespace

std::vector<ParsedEvent> zip_events(const std::vector<LogRecord>& records,
                                    const std::vector<int>& template_ids) {
    if (records.size() != template_ids.size()) {
        throw ContractViolation("zip_events: records and template ids differ in length");
    }
    std::vector<ParsedEvent> events;
    events.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        events.push_back(
            {records[i].line_no, records[i].session_key, records[i].label, template_ids[i]});
    }
    return events;
}

std::vector<LogSequence> group_by_session(const std::vector<ParsedEvent>& events) {
    std::vector<LogSequence> sequences;
    std::unordered_map<std::string, std::size_t> index_of;
    for (const ParsedEvent& ev : events) {
        if (!ev.session_key) {
            throw ContractViolation("group_by_session: record at line " +
                                    std::to_string(ev.line_no) + " has no session key");
        }
        auto [it, inserted] = index_of.emplace(*ev.session_key, sequences.size());
        if (inserted) {
            sequences.push_back({*ev.session_key, {}, Label::Normal});
        }
        LogSequence& seq = sequences[it->second];
        seq.template_ids.push_back(ev.template_id);
        seq.label = combine(seq.label, ev.label);
    }
    return sequences;
}

std::vector<LogSequence> sliding_windows(const std::vector<ParsedEvent>& events,
                                         std::size_t size, std::size_t stride) {
    if (size < 1 || stride < 1) throw ConfigError("window size and stride must be >= 1");
    std::vector<LogSequence> sequences;
    const std::size_t n = events.size();
    if (n == 0) return sequences;

    auto emit = [&](std::size_t begin, std::size_t end) {
        LogSequence seq;
        seq.seq_id = "w" + std::to_string(begin);
        seq.template_ids.reserve(end - begin);
        for (std::size_t i = begin; i < end; ++i) seq.template_ids.push_back(events[i].template_id);
        seq.label = label_of_range(events, begin, end);
        sequences.push_back(std::move(seq));
    };

    if (n < size) {
        emit(0, n);
        return sequences;
    }
    for (std::size_t off = 0; off + size <= n; off += stride) emit(off, off + size);
    return sequences;
}

SplitResult split_train_test(const std::vector<LogSequence>& sequences, const SplitConfig& cfg) {
    if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0)) {
        throw ConfigError("train_fraction must lie in (0, 1)");
    }
    if (!(cfg.labeled_fraction > 0.0 && cfg.labeled_fraction < 1.0)) {
        throw ConfigError("labeled_fraction must lie in (0, 1)");
    }

    std::vector<std::size_t> normal_idx;
    std::vector<std::size_t> anomaly_idx;
    for (std::size_t i = 0; i < sequences.size(); ++i) {
        switch (sequences[i].label) {
            case Label::Normal: normal_idx.push_back(i); break;
            case Label::Anomaly: anomaly_idx.push_back(i); break;
            case Label::Unknown:
                throw ConfigError("split_train_test: sequence '" + sequences[i].seq_id +
                                  "' has no known label; cannot stratify");
        }
    }

    Rng rng(derive_seed(cfg.seed, "split"));
    SplitResult result;
    for (std::vector<std::size_t>* stratum : {&normal_idx, &anomaly_idx}) {
        rng.shuffle(*stratum);
        const auto n = static_cast<double>(stratum->size());
        const auto n_train = static_cast<std::size_t>(std::llround(n * cfg.train_fraction));
        const auto n_labeled =
            static_cast<std::size_t>(std::llround(static_cast<double>(n_train) *
                                                  cfg.labeled_fraction));
        const std::size_t n_test = stratum->size() - n_train;
        if (n_labeled == 0 || n_train - n_labeled == 0 || n_test == 0) {
            throw ConfigError("split_train_test: a class has too few sequences to stratify "
                              "across labeled/unlabeled/test parts");
        }
        for (std::size_t i = 0; i < n_labeled; ++i) {
            result.labeled.push_back(sequences[(*stratum)[i]]);
        }
        for (std::size_t i = n_labeled; i < n_train; ++i) {
            result.unlabeled.push_back(sequences[(*stratum)[i]]);
        }
        for (std::size_t i = n_train; i < stratum->size(); ++i) {
            result.test.push_back(sequences[(*stratum)[i]]);
        }
    }
    return result;
}

void dump_sequences(const std::vector<LogSequence>& sequences, std::ostream& out) {
    for (const LogSequence& seq : sequences) {
        out << seq.seq_id << '\t' << label_name(seq.label) << '\t';
        for (std::size_t i = 0; i < seq.template_ids.size(); ++i) {
            if (i > 0) out << ',';
            out << seq.template_ids[i];
        }
        out << '\n';
    }
}

std::vector<LogSequence> load_sequences(std::istream& in) {
    std::vector<LogSequence> sequences;
    std::string line;
    std::int64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::size_t tab1 = line.find('\t');
        const std::size_t tab2 = tab1 == std::string::npos ? std::string::npos
                                                           : line.find('\t', tab1 + 1);
        if (tab2 == std::string::npos) {
            throw ParseError("sequence file line " + std::to_string(line_no) +
                             ": expected `seq_id\\tlabel\\tids`");
        }
        LogSequence seq;
        seq.seq_id = line.substr(0, tab1);
        seq.label = label_from_name(line.substr(tab1 + 1, tab2 - tab1 - 1));
        std::istringstream ids(line.substr(tab2 + 1));
        std::string field;
        while (std::getline(ids, field, ',')) {
            if (field.empty()) continue;
            seq.template_ids.push_back(
                static_cast<int>(parse_int_field(field, "sequence file", line_no)));
        }
        if (seq.template_ids.empty()) {
            throw ParseError("sequence file line " + std::to_string(line_no) +
                             ": sequence has no template ids");
        }
        sequences.push_back(std::move(seq));
    }
    return sequences;
}

void dump_events(const std::vector<ParsedEvent>& events, std::ostream& out) {
    for (const ParsedEvent& ev : events) {
        out << ev.line_no << '\t' << (ev.session_key ? *ev.session_key : std::string("-")) << '\t'
            << label_name(ev.label) << '\t' << ev.template_id << '\n';
    }
}

std::vector<ParsedEvent> load_events(std::istream& in) {
    std::vector<ParsedEvent> events;
    std::string line;
    std::int64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::array<std::size_t, 3> tabs{};
        std::size_t pos = 0;
        for (std::size_t& tab : tabs) {
            tab = line.find('\t', pos);
            if (tab == std::string::npos) {
                throw ParseError("event file line " + std::to_string(line_no) +
                                 ": expected `line_no\\tsession_key\\tlabel\\ttemplate_id`");
            }
            pos = tab + 1;
        }
        ParsedEvent ev;
        ev.line_no = parse_int_field(line.substr(0, tabs[0]), "event file", line_no);
        const std::string key = line.substr(tabs[0] + 1, tabs[1] - tabs[0] - 1);
        if (key != "-") ev.session_key = key;
        ev.label = label_from_name(line.substr(tabs[1] + 1, tabs[2] - tabs[1] - 1));
        ev.template_id =
            static_cast<int>(parse_int_field(line.substr(tabs[2] + 1), "event file", line_no));
        events.push_back(std::move(ev));
    }
    return events;
}

}  // namespace logdqn
