#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "json.hpp"
#include "logdqn/errors.hpp"
#include "logdqn/hashing.hpp"
#include "logdqn/pipeline.hpp"

using namespace logdqn;

namespace {

/// Small but complete end-to-end configuration: every partition gets both
/// classes and the run finishes in well under a second.
EndToEndConfig tiny_e2e(const std::string& run_dir, std::uint64_t seed) {
    EndToEndConfig cfg;
    cfg.run_dir = run_dir;
    cfg.seed = seed;
    cfg.synth.n_sessions = 60;
    cfg.synth.templates_k = 6;
    cfg.synth.contamination = 0.1;
    cfg.split.train_fraction = 0.7;
    cfg.split.labeled_fraction = 0.4;
    cfg.dim = 16;
    cfg.t_max = 10;
    cfg.oracle.dims = NetDims{16, 8, 8};
    cfg.oracle.epochs = 2;
    cfg.oracle.batch_size = 8;
    cfg.oracle.lr = 0.01;
    cfg.train.dims = NetDims{16, 8, 8};
    cfg.train.n_episodes = 2;
    cfg.train.n_steps = 30;
    cfg.train.warmup_episodes = 1;
    cfg.train.target_sync_steps = 25;
    cfg.train.replay_capacity = 300;
    cfg.train.replay_batch = 8;
    cfg.train.reg_batch = 4;
    cfg.env.subset_size = 16;
    return cfg;
}

std::vector<std::string> csv_lines(const std::string& path) {
    std::ifstream in(path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        lines.push_back(line);
    }
    return lines;
}

}  // namespace

TEST_SUITE_BEGIN("pipeline");

TEST_CASE("the synthesis stage writes its manifest and both artifacts") {
    testutil::TempDir dir("synth_stage");
    SynthStage stage;
    stage.synth.n_sessions = 40;
    stage.synth.templates_k = 5;
    stage.synth.contamination = 0.1;
    stage.synth.seed = 7;
    stage.out_dir = dir.path("corpus");
    run_synth_stage(stage);

    CHECK(file_exists(dir.path("corpus/raw.log")));
    CHECK(file_exists(dir.path("corpus/labels.csv")));
    REQUIRE(file_exists(dir.path("corpus/manifest.json")));

    const auto doc = nlohmann::json::parse(testutil::read_file(dir.path("corpus/manifest.json")));
    CHECK(doc.at("artifact_version") == "0.1.0");
    CHECK(doc.at("stage") == "synth");
    CHECK(doc.at("seed") == 7);
    CHECK(doc.at("created_utc").get<std::string>().size() == 20);  // ISO-8601 Zulu
    CHECK(doc.at("config").at("n_sessions") == "40");
    CHECK(doc.at("config").at("contamination") == "0.1");
    CHECK(doc.at("inputs").is_object());
    CHECK(doc.at("inputs").empty());
}

TEST_CASE("the parse stage digests its inputs into the manifest") {
    testutil::TempDir dir("parse_stage");
    SynthStage synth;
    synth.synth.n_sessions = 30;
    synth.synth.templates_k = 5;
    synth.synth.contamination = 0.1;
    synth.synth.seed = 3;
    synth.out_dir = dir.path("corpus");
    run_synth_stage(synth);

    ParseStage parse;
    parse.input = dir.path("corpus/raw.log");
    parse.adapter = Adapter::Hdfs;
    parse.labels = dir.path("corpus/labels.csv");
    parse.out_dir = dir.path("parse");
    run_parse_stage(parse);

    CHECK(file_exists(dir.path("parse/templates.tsv")));
    CHECK(file_exists(dir.path("parse/events.tsv")));
    const auto doc = nlohmann::json::parse(testutil::read_file(dir.path("parse/manifest.json")));
    CHECK(doc.at("stage") == "parse");
    CHECK(doc.at("config").at("adapter") == "hdfs");
    const auto& inputs = doc.at("inputs");
    REQUIRE(inputs.contains(parse.input));
    REQUIRE(inputs.contains(parse.labels));
    CHECK(inputs.at(parse.input).get<std::string>().size() == 16);
    CHECK(inputs.at(parse.input) == file_digest_hex(parse.input));
}

TEST_CASE("a tiny run flows end to end and leaves a manifest in every stage") {
    testutil::TempDir dir("e2e");
    const EndToEndConfig cfg = tiny_e2e(dir.path("run"), 2024);
    const Prf1 metrics = run_end_to_end(cfg);
    CHECK(metrics.precision >= 0.0);
    CHECK(metrics.precision <= 1.0);
    CHECK(metrics.recall >= 0.0);
    CHECK(metrics.recall <= 1.0);
    CHECK(metrics.f1 >= 0.0);
    CHECK(metrics.f1 <= 1.0);

    for (const char* sub : {"", "corpus", "parse", "group", "embed", "oracle", "train", "eval"}) {
        const std::string d = *sub == '\0' ? dir.path("run") : dir.path(std::string("run/") + sub);
        CHECK(file_exists(d + "/manifest.json"));
    }

    const std::vector<std::string> lines = csv_lines(dir.path("run/train/metrics.csv"));
    REQUIRE(lines.size() == std::size_t(1 + cfg.train.n_episodes));
    CHECK(lines[0] == metrics_csv_header());
    CHECK(lines[1].rfind("1, ", 0) == 0);
    CHECK(lines[2].rfind("2, ", 0) == 0);

    const std::vector<std::string> report = csv_lines(dir.path("run/eval/report.csv"));
    REQUIRE(report.size() == 2);
    CHECK(report[0] == "variant_or_gridpoint,precision,recall,f1,runtime_s");
    CHECK(report[1].rfind("eval,", 0) == 0);
}

TEST_CASE("present outputs are skipped and missing intermediates regenerate identically") {
    testutil::TempDir dir("e2e_rerun");
    const EndToEndConfig cfg = tiny_e2e(dir.path("run"), 77);
    const Prf1 first = run_end_to_end(cfg);

    const std::string embeddings = dir.path("run/embed/embeddings.tsv");
    const std::string metrics_csv = dir.path("run/train/metrics.csv");
    const std::string agent = dir.path("run/train/agent.ckpt");
    const std::string embed_digest = file_digest_hex(embeddings);
    const std::string metrics_digest = file_digest_hex(metrics_csv);
    const std::string agent_digest = file_digest_hex(agent);

    // nothing deleted: every stage skips and the final metrics repeat
    const Prf1 skipped = run_end_to_end(cfg);
    CHECK(skipped.precision == first.precision);
    CHECK(skipped.recall == first.recall);
    CHECK(skipped.f1 == first.f1);
    CHECK(file_digest_hex(metrics_csv) == metrics_digest);

    // deleted intermediates are rebuilt byte-for-byte from the same seed
    std::filesystem::remove(embeddings);
    std::filesystem::remove(metrics_csv);
    std::filesystem::remove(agent);
    const Prf1 rebuilt = run_end_to_end(cfg);
    CHECK(rebuilt.precision == first.precision);
    CHECK(rebuilt.recall == first.recall);
    CHECK(rebuilt.f1 == first.f1);
    CHECK(file_digest_hex(embeddings) == embed_digest);
    CHECK(file_digest_hex(metrics_csv) == metrics_digest);
    CHECK(file_digest_hex(agent) == agent_digest);
}

TEST_CASE("evaluation rejects a corrupt model file by name") {
    testutil::TempDir dir("eval_corrupt");

    std::vector<Eigen::VectorXd> table(2, Eigen::VectorXd::Zero(8));
    table[0][0] = 1.0;
    table[1][1] = 1.0;
    {
        std::ofstream out(dir.path("embeddings.tsv"));
        dump_embeddings(table, out);
    }
    std::vector<LogSequence> seqs;
    seqs.push_back({"s1", {0, 1}, Label::Normal});
    seqs.push_back({"s2", {1, 0}, Label::Anomaly});
    {
        std::ofstream out(dir.path("test.seq"));
        dump_sequences(seqs, out);
    }
    testutil::write_file(dir.path("agent.ckpt"), "this is not a checkpoint");

    EvalStage stage;
    stage.model = dir.path("agent.ckpt");
    stage.test = dir.path("test.seq");
    stage.embeddings = dir.path("embeddings.tsv");
    stage.t_max = 4;
    CHECK_THROWS_WITH_AS(run_eval_stage(stage), doctest::Contains("agent.ckpt"), ParseError);

    stage.model = dir.path("missing.ckpt");
    CHECK_THROWS_AS(run_eval_stage(stage), IoError);
}

TEST_CASE("evaluation without an output directory writes nothing but still scores") {
    testutil::TempDir dir("eval_plain");
    const EndToEndConfig cfg = tiny_e2e(dir.path("run"), 99);
    const Prf1 from_run = run_end_to_end(cfg);

    EvalStage stage;
    stage.model = dir.path("run/train/agent.ckpt");
    stage.test = dir.path("run/group/test.seq");
    stage.embeddings = dir.path("run/embed/embeddings.tsv");
    stage.t_max = cfg.t_max;
    const Prf1 direct = run_eval_stage(stage);
    CHECK(direct.precision == from_run.precision);
    CHECK(direct.recall == from_run.recall);
    CHECK(direct.f1 == from_run.f1);
}

TEST_CASE("missing sequence files surface as io errors") {
    CHECK_THROWS_AS(load_sequences_file("/nonexistent/path.seq"), IoError);
}

TEST_SUITE_END();
