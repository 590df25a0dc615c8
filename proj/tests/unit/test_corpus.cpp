#include <set>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "logdqn/corpus.hpp"
#include "logdqn/errors.hpp"

using namespace logdqn;

TEST_SUITE_BEGIN("corpus");

TEST_CASE("hdfs adapter extracts the block id as session key") {
    const auto rec = record_from_line(
        "081109 203518 143 INFO dfs.DataNode$DataXceiver: Receiving block "
        "blk_38865049064139660 src: /10.251.42.84:57069",
        Adapter::Hdfs, 1);
    REQUIRE(rec.has_value());
    REQUIRE(rec->session_key.has_value());
    CHECK(*rec->session_key == "blk_38865049064139660");
    CHECK(rec->label == Label::Unknown);
    CHECK_FALSE(rec->content.empty());
}

TEST_CASE("hdfs adapter accepts negative block ids") {
    const auto rec = record_from_line("Deleting block blk_-162999 file x", Adapter::Hdfs, 1);
    REQUIRE(rec.has_value());
    REQUIRE(rec->session_key.has_value());
    CHECK(*rec->session_key == "blk_-162999");
}

TEST_CASE("bgl adapter labels by the leading dash field") {
    const auto normal = record_from_line(
        "- 1117838570 2005.06.03 R02-M1-N0-C:J12-U11 instruction cache parity error corrected",
        Adapter::Bgl, 1);
    REQUIRE(normal.has_value());
    CHECK(normal->label == Label::Normal);

    const auto anomalous = record_from_line(
        "KERNDTLB 1117838571 2005.06.03 R02-M1-N0-C:J12-U11 data TLB error interrupt",
        Adapter::Bgl, 2);
    REQUIRE(anomalous.has_value());
    CHECK(anomalous->label == Label::Anomaly);
}

TEST_CASE("empty and whitespace lines yield no record") {
    CHECK_FALSE(record_from_line("", Adapter::Generic, 1).has_value());
    CHECK_FALSE(record_from_line("   \t ", Adapter::Hdfs, 2).has_value());
}

TEST_CASE("generic adapter keeps the whole line as content without a key") {
    const auto rec = record_from_line("alpha beta gamma", Adapter::Generic, 3);
    REQUIRE(rec.has_value());
    CHECK_FALSE(rec->session_key.has_value());
    CHECK(rec->content == std::vector<std::string>{"alpha", "beta", "gamma"});
    CHECK(rec->line_no == 3);
}

TEST_CASE("adapter names round-trip and unknown names are rejected") {
    CHECK(adapter_from_name("hdfs") == Adapter::Hdfs);
    CHECK(adapter_from_name("bgl") == Adapter::Bgl);
    CHECK(adapter_from_name("generic") == Adapter::Generic);
    CHECK(adapter_name(Adapter::Bgl) == "bgl");
    CHECK_THROWS_AS(adapter_from_name("syslog"), ConfigError);
}

TEST_CASE("read_raw streams records in line order and skips blanks") {
    testutil::TempDir dir("read_raw");
    testutil::write_file(dir.path("log.txt"),
                         "one blk_1 x\n"
                         "\n"
                         "two blk_2 y\n");
    const auto records = read_raw(dir.path("log.txt"), Adapter::Hdfs);
    REQUIRE(records.size() == 2);
    CHECK(records[0].line_no == 1);
    CHECK(records[1].line_no == 3);
    CHECK(*records[0].session_key == "blk_1");
    CHECK(*records[1].session_key == "blk_2");

    const auto again = read_raw(dir.path("log.txt"), Adapter::Hdfs);
    REQUIRE(again.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(again[i].content == records[i].content);
        CHECK(again[i].session_key == records[i].session_key);
    }
    CHECK_THROWS_AS(read_raw(dir.path("absent.txt"), Adapter::Hdfs), IoError);
}

TEST_CASE("attach_labels applies present keys and leaves others Unknown") {
    testutil::TempDir dir("labels");
    testutil::write_file(dir.path("log.txt"),
                         "a blk_1 m\n"
                         "b blk_2 m\n"
                         "c blk_3 m\n");
    testutil::write_file(dir.path("labels.csv"),
                         "blk_1,Anomaly\n"
                         "blk_2,Normal\n");
    auto records = read_raw(dir.path("log.txt"), Adapter::Hdfs);
    attach_labels(records, dir.path("labels.csv"));
    CHECK(records[0].label == Label::Anomaly);
    CHECK(records[1].label == Label::Normal);
    CHECK(records[2].label == Label::Unknown);
}

TEST_CASE("attach_labels rejects conflicting duplicates and malformed lines") {
    testutil::TempDir dir("labels_bad");
    testutil::write_file(dir.path("log.txt"), "a blk_1 m\n");
    auto records = read_raw(dir.path("log.txt"), Adapter::Hdfs);

    testutil::write_file(dir.path("conflict.csv"), "blk_1,Anomaly\nblk_1,Normal\n");
    CHECK_THROWS_AS(attach_labels(records, dir.path("conflict.csv")), ParseError);

    testutil::write_file(dir.path("malformed.csv"), "blk_1;Anomaly\n");
    CHECK_THROWS_WITH_AS(attach_labels(records, dir.path("malformed.csv")),
                         doctest::Contains("malformed.csv:1"), ParseError);

    // consistent duplicates are harmless
    testutil::write_file(dir.path("dup.csv"), "blk_1,Anomaly\nblk_1,Anomaly\n");
    CHECK_NOTHROW(attach_labels(records, dir.path("dup.csv")));
    CHECK(records[0].label == Label::Anomaly);
}

TEST_CASE("synthetic corpus hits the contamination count exactly") {
    SyntheticConfig cfg;
    cfg.n_sessions = 1000;
    cfg.contamination = 0.03;
    cfg.seed = 7;
    const SyntheticCorpus corpus = generate_synthetic(cfg);
    std::int64_t anomalies = 0;
    for (const auto& [key, label] : corpus.labels) {
        anomalies += label == Label::Anomaly ? 1 : 0;
    }
    CHECK(anomalies == 30);
    CHECK(corpus.labels.size() == 1000);
    CHECK(corpus.manifest.record_count == static_cast<std::int64_t>(corpus.records.size()));
    for (const auto& rec : corpus.records) {
        REQUIRE_FALSE(rec.content.empty());
        REQUIRE(rec.session_key.has_value());
    }
}

TEST_CASE("synthetic corpus is byte-identical for a fixed seed") {
    SyntheticConfig cfg;
    cfg.n_sessions = 200;
    cfg.seed = 9;
    const SyntheticCorpus a = generate_synthetic(cfg);
    const SyntheticCorpus b = generate_synthetic(cfg);
    std::ostringstream ra, rb, la, lb;
    dump_raw_lines(a.records, ra);
    dump_raw_lines(b.records, rb);
    dump_labels(a.labels, la);
    dump_labels(b.labels, lb);
    CHECK(ra.str() == rb.str());
    CHECK(la.str() == lb.str());

    SyntheticConfig other = cfg;
    other.seed = 10;
    std::ostringstream rc;
    dump_raw_lines(generate_synthetic(other).records, rc);
    CHECK(ra.str() != rc.str());
}

TEST_CASE("synthetic corpus validates its configuration") {
    SyntheticConfig cfg;
    cfg.contamination = 0.9;
    CHECK_THROWS_AS(generate_synthetic(cfg), ConfigError);
    cfg.contamination = 0.0;
    CHECK_THROWS_AS(generate_synthetic(cfg), ConfigError);
    cfg.contamination = 0.03;
    cfg.templates_k = 4;
    CHECK_THROWS_AS(generate_synthetic(cfg), ConfigError);
}

TEST_CASE("synthetic corpus round-trips through the hdfs adapter") {
    SyntheticConfig cfg;
    cfg.n_sessions = 50;
    cfg.seed = 3;
    const SyntheticCorpus corpus = generate_synthetic(cfg);
    testutil::TempDir dir("synth_rt");
    {
        std::ofstream out(dir.path("raw.log"));
        dump_raw_lines(corpus.records, out);
    }
    const auto records = read_raw(dir.path("raw.log"), Adapter::Hdfs);
    REQUIRE(records.size() == corpus.records.size());
    std::set<std::string> keys;
    for (const auto& rec : records) {
        REQUIRE(rec.session_key.has_value());
        keys.insert(*rec.session_key);
    }
    CHECK(keys.size() == 50);
}

TEST_CASE("label names round-trip") {
    CHECK(label_from_name(label_name(Label::Anomaly)) == Label::Anomaly);
    CHECK(label_from_name(label_name(Label::Normal)) == Label::Normal);
    CHECK(label_from_name(label_name(Label::Unknown)) == Label::Unknown);
    CHECK_THROWS_AS(label_from_name("weird"), ParseError);
}

TEST_SUITE_END();
