#include <cmath>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "logdqn/embedding.hpp"
#include "logdqn/errors.hpp"

using namespace logdqn;

namespace {

Template make_template(int id, std::initializer_list<const char*> tokens) {
    Template t;
    t.id = id;
    t.tokens.assign(tokens.begin(), tokens.end());
    t.count = 1;
    return t;
}

std::vector<Template> toy_catalog() {
    return {make_template(0, {"receiving", "block", "<*>"}),
            make_template(1, {"deleting", "block", "<*>"}),
            make_template(2, {"served", "request", "fine"})};
}

}  // namespace

TEST_SUITE_BEGIN("embedding");

TEST_CASE("embed_template is deterministic and unit-norm") {
    const auto catalog = toy_catalog();
    const auto stats = compute_term_stats(catalog);
    const HashingEmbedder embedder(16);
    const Eigen::VectorXd a = embedder.embed_template(catalog[0], stats);
    const Eigen::VectorXd b = embedder.embed_template(catalog[0], stats);
    CHECK(a == b);
    CHECK(a.size() == 16);
    CHECK(std::abs(a.norm() - 1.0) < 1e-9);
}

TEST_CASE("all-wildcard template maps to the zero vector") {
    const auto stats = compute_term_stats(toy_catalog());
    const HashingEmbedder embedder(16);
    const Eigen::VectorXd v =
        embedder.embed_template(make_template(9, {"<*>", "<*>"}), stats);
    CHECK(v.norm() == 0.0);
}

TEST_CASE("embedder rejects tiny dimensions") {
    CHECK_THROWS_AS(HashingEmbedder(7), ConfigError);
    CHECK_NOTHROW(HashingEmbedder(8));
}

TEST_CASE("different hash seeds give different embeddings") {
    const auto catalog = toy_catalog();
    const auto stats = compute_term_stats(catalog);
    const Eigen::VectorXd a = HashingEmbedder(16, 0).embed_template(catalog[0], stats);
    const Eigen::VectorXd b = HashingEmbedder(16, 1).embed_template(catalog[0], stats);
    CHECK(a != b);
}

TEST_CASE("external embeddings load when complete and well-formed") {
    testutil::TempDir dir("ext_embed");
    std::ostringstream rows;
    for (int id = 0; id < 12; ++id) {
        rows << id << '\t';
        for (int k = 0; k < 64; ++k) rows << (k > 0 ? "," : "") << (id + k) * 0.5;
        rows << '\n';
    }
    testutil::write_file(dir.path("emb.tsv"), rows.str());
    const auto table = load_external_embeddings(dir.path("emb.tsv"), 12);
    REQUIRE(table.size() == 12);
    CHECK(table[0].size() == 64);
    CHECK(table[3](1) == doctest::Approx(2.0));

    const auto inferred = load_embeddings(dir.path("emb.tsv"));
    REQUIRE(inferred.size() == 12);
    CHECK(inferred[5] == table[5]);
}

TEST_CASE("external embeddings reject bad rows and missing ids") {
    testutil::TempDir dir("ext_embed_bad");
    testutil::write_file(dir.path("short_row.tsv"),
                         "0\t1,2,3,4\n"
                         "1\t1,2,3\n");
    CHECK_THROWS_WITH_AS(load_external_embeddings(dir.path("short_row.tsv"), 2),
                         doctest::Contains("short_row.tsv:2"), ParseError);

    testutil::write_file(dir.path("missing.tsv"), "0\t1,2,3,4\n");
    CHECK_THROWS_AS(load_external_embeddings(dir.path("missing.tsv"), 2), ParseError);

    testutil::write_file(dir.path("sparse.tsv"), "0\t1,2\n2\t1,2\n");
    CHECK_THROWS_AS(load_external_embeddings(dir.path("sparse.tsv"), 3), ParseError);
}

TEST_CASE("embeddings round-trip through dump and load") {
    std::vector<Eigen::VectorXd> table;
    table.push_back(Eigen::Vector3d(0.25, -0.5, 1.0 / 3.0));
    table.push_back(Eigen::Vector3d(1e-17, 2.0, -3.5));
    testutil::TempDir dir("embed_rt");
    {
        std::ofstream out(dir.path("emb.tsv"));
        dump_embeddings(table, out);
    }
    const auto loaded = load_embeddings(dir.path("emb.tsv"));
    REQUIRE(loaded.size() == 2);
    CHECK(loaded[0] == table[0]);
    CHECK(loaded[1] == table[1]);
}

TEST_CASE("short sequences zero-pad and record their true length") {
    std::vector<Eigen::VectorXd> table(4, Eigen::VectorXd::Ones(8));
    LogSequence seq{"s0", {0, 1, 2}, Label::Normal};
    const EpisodeState st = embed_sequence(seq, table, 50, Origin::Unlabeled);
    CHECK(st.length == 3);
    CHECK(st.vectors.rows() == 8);
    CHECK(st.vectors.cols() == 50);
    CHECK(st.vectors.col(2) == table[2]);
    CHECK(st.vectors.col(3).norm() == 0.0);
    CHECK(st.seq_id == "s0");
    CHECK_FALSE(st.label.has_value());
}

TEST_CASE("long sequences keep the most recent events") {
    std::vector<Eigen::VectorXd> table;
    for (int i = 0; i < 100; ++i) {
        table.push_back(Eigen::VectorXd::Constant(8, static_cast<double>(i)));
    }
    LogSequence seq;
    seq.seq_id = "long";
    seq.label = Label::Normal;
    for (int i = 0; i < 80; ++i) seq.template_ids.push_back(i);
    const EpisodeState st = embed_sequence(seq, table, 50, Origin::Unlabeled);
    CHECK(st.length == 50);
    CHECK(st.vectors.col(0)(0) == 30.0);   // events 0..29 dropped
    CHECK(st.vectors.col(49)(0) == 79.0);  // most recent retained
}

TEST_CASE("labeled origin carries the sequence label, unlabeled hides it") {
    std::vector<Eigen::VectorXd> table(2, Eigen::VectorXd::Ones(8));
    LogSequence seq{"s", {0, 1}, Label::Anomaly};
    const EpisodeState labeled = embed_sequence(seq, table, 10, Origin::Labeled);
    REQUIRE(labeled.label.has_value());
    CHECK(*labeled.label == Label::Anomaly);
    CHECK(labeled.origin == Origin::Labeled);

    const EpisodeState hidden = embed_sequence(seq, table, 10, Origin::Unlabeled);
    CHECK_FALSE(hidden.label.has_value());
    CHECK(hidden.origin == Origin::Unlabeled);
}

TEST_CASE("embed_sequence rejects unresolvable ids and unknown labeled labels") {
    std::vector<Eigen::VectorXd> table(2, Eigen::VectorXd::Ones(8));
    LogSequence seq{"s", {0, 5}, Label::Normal};
    CHECK_THROWS_AS(embed_sequence(seq, table, 10, Origin::Unlabeled), ConfigError);
    LogSequence unknown{"u", {0, 1}, Label::Unknown};
    CHECK_THROWS_AS(embed_sequence(unknown, table, 10, Origin::Labeled), ContractViolation);
}

TEST_CASE("state similarity hits the textbook cases") {
    const EpisodeState a = testutil::pooled_state(Eigen::Vector3d(1, 2, 2), "a");
    const EpisodeState na = testutil::pooled_state(Eigen::Vector3d(-1, -2, -2), "na");
    const EpisodeState o = testutil::pooled_state(Eigen::Vector3d(2, -1, 0), "o");
    const EpisodeState z = testutil::pooled_state(Eigen::Vector3d(0, 0, 0), "z");
    CHECK(state_similarity(a, a) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(state_similarity(a, na) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(state_similarity(a, o) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(state_similarity(a, z) == 0.0);
    CHECK(state_similarity(z, a) == 0.0);
}

TEST_CASE("state similarity is symmetric, bounded, and scale-invariant") {
    Rng rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::VectorXd u(6), v(6);
        for (int i = 0; i < 6; ++i) {
            u(i) = rng.uniform(-1, 1);
            v(i) = rng.uniform(-1, 1);
        }
        const auto su = testutil::pooled_state(u, "u");
        const auto sv = testutil::pooled_state(v, "v");
        const double s = state_similarity(su, sv);
        CHECK(s == state_similarity(sv, su));
        CHECK(s >= -1.0 - 1e-12);
        CHECK(s <= 1.0 + 1e-12);
        const auto scaled = testutil::pooled_state(3.7 * u, "u3");
        CHECK(state_similarity(scaled, sv) == doctest::Approx(s).epsilon(1e-9));
    }
}

TEST_CASE("pooled vector equals the mean over the true length") {
    std::vector<Eigen::VectorXd> table;
    table.push_back(Eigen::Vector2d(1, 0));
    table.push_back(Eigen::Vector2d(0, 1));
    LogSequence seq{"s", {0, 1}, Label::Normal};
    const EpisodeState st = embed_sequence(seq, table, 10, Origin::Unlabeled);
    CHECK(st.pooled(0) == doctest::Approx(0.5));
    CHECK(st.pooled(1) == doctest::Approx(0.5));
}

TEST_SUITE_END();
