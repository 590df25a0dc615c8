#include "logdqn/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "logdqn/errors.hpp"
#include "logdqn/hashing.hpp"
#include "logdqn/logging.hpp"

namespace logdqn {

namespace fs = std::filesystem;

void ensure_directory(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create directory '" + dir + "': " + ec.message());
    }
}

bool file_exists(const std::string& path) { return fs::exists(path); }

namespace {

std::string join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path + "'");
    }
    return in;
}

std::string now_utc_iso() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(15);
    os << v;
    return os.str();
}

std::vector<Template> load_templates_file(const std::string& path) {
    std::ifstream in = open_in(path);
    return DrainParser::load(in);
}

std::vector<Label> truth_of(const std::vector<LogSequence>& seqs, const std::string& origin) {
    std::vector<Label> truth;
    truth.reserve(seqs.size());
    for (const LogSequence& s : seqs) {
        if (s.label == Label::Unknown) {
            throw ConfigError(origin + ": sequence '" + s.seq_id + "' has no ground-truth label");
        }
        truth.push_back(s.label);
    }
    return truth;
}

/// Everything run_train_stage and friends need in memory.
struct LoadedData {
    std::vector<Eigen::VectorXd> table;
    std::vector<LogSequence> dl_seqs, du_seqs, test_seqs;
    std::vector<EpisodeState> dl, du, test;
    std::vector<Label> test_truth;
    QNetworkParams oracle{NetDims{}};
};

LoadedData load_train_inputs(const TrainStage& stage) {
    LoadedData data;
    data.table = load_embeddings(stage.embeddings);
    if (data.table.empty()) {
        throw ConfigError("embedding table '" + stage.embeddings + "' is empty");
    }
    const int dim = int(data.table.front().size());

    data.dl_seqs = load_sequences_file(stage.dl);
    data.du_seqs = load_sequences_file(stage.du);
    data.dl = embed_sequences(data.dl_seqs, data.table, stage.t_max, Origin::Labeled);
    data.du = embed_sequences(data.du_seqs, data.table, stage.t_max, Origin::Unlabeled);

    if (!stage.test.empty()) {
        data.test_seqs = load_sequences_file(stage.test);
        data.test = embed_sequences(data.test_seqs, data.table, stage.t_max, Origin::Unlabeled);
        data.test_truth = truth_of(data.test_seqs, stage.test);
    }

    Checkpoint ckpt = load_checkpoint(stage.oracle_ckpt);
    if (ckpt.kind != ModelKind::Oracle) {
        throw ConfigError("'" + stage.oracle_ckpt + "' is not an oracle checkpoint");
    }
    if (ckpt.params.dims().input != dim) {
        throw ConfigError("oracle input dim " + std::to_string(ckpt.params.dims().input) +
                          " does not match embedding dim " + std::to_string(dim));
    }
    data.oracle = std::move(ckpt.params);
    return data;
}

EvalData view_of(const LoadedData& data) {
    EvalData view;
    view.labeled = &data.dl;
    view.unlabeled = &data.du;
    if (!data.test.empty()) {
        view.test = &data.test;
        view.test_truth = &data.test_truth;
    }
    view.oracle = &data.oracle;
    return view;
}

/// Resolves the per-run knobs that depend on the loaded data: the network
/// input width and the transition subset cap.
void resolve_run_config(const LoadedData& data, TrainConfig& train, EnvConfig& env) {
    train.dims.input = int(data.table.front().size());
    if (env.subset_size > data.du.size()) {
        log_warn("transition subset size " + std::to_string(env.subset_size) +
                 " capped at the unlabeled pool size " + std::to_string(data.du.size()));
        env.subset_size = data.du.size();
    }
}

ConfigSnapshot train_stage_snapshot(const TrainStage& stage) {
    const TrainConfig& t = stage.train;
    const RewardConfig& r = stage.rewards;
    return {
        {"variant", variant_name(stage.variant)},
        {"t_max", std::to_string(stage.t_max)},
        {"hidden", std::to_string(t.dims.hidden)},
        {"context", std::to_string(t.dims.context)},
        {"n_episodes", std::to_string(t.n_episodes)},
        {"n_steps", std::to_string(t.n_steps)},
        {"warmup_episodes", std::to_string(t.warmup_episodes)},
        {"target_sync_steps", std::to_string(t.target_sync_steps)},
        {"replay_capacity", std::to_string(t.replay_capacity)},
        {"replay_batch", std::to_string(t.replay_batch)},
        {"reg_batch", std::to_string(t.reg_batch)},
        {"gamma", fmt(t.gamma)},
        {"lr", fmt(t.lr)},
        {"lambda", fmt(t.lambda)},
        {"epsilon_start", fmt(t.epsilon_start)},
        {"epsilon_end", fmt(t.epsilon_end)},
        {"anneal_rate", t.anneal_rate ? fmt(*t.anneal_rate) : std::string("auto")},
        {"r1", fmt(r.r1)},
        {"r2", fmt(r.r2)},
        {"r3", fmt(r.r3)},
        {"r4", fmt(r.r4)},
        {"delta", fmt(r.delta)},
        {"unlabeled_anomaly_penalty", fmt(r.unlabeled_anomaly_penalty)},
        {"p", fmt(stage.env.labeled_prob)},
        {"subset_size", std::to_string(stage.env.subset_size)},
    };
}

std::vector<std::string> train_stage_inputs(const TrainStage& stage) {
    std::vector<std::string> inputs{stage.dl, stage.du, stage.embeddings, stage.oracle_ckpt};
    if (!stage.test.empty()) {
        inputs.push_back(stage.test);
    }
    return inputs;
}

}  // namespace

std::vector<LogSequence> load_sequences_file(const std::string& path) {
    std::ifstream in = open_in(path);
    return load_sequences(in);
}

void write_manifest(const std::string& out_dir, const std::string& stage, std::uint64_t seed,
                    const ConfigSnapshot& config, const std::vector<std::string>& input_paths) {
    nlohmann::ordered_json doc;
    doc["artifact_version"] = kArtifactVersion;
    doc["stage"] = stage;
    doc["seed"] = seed;
    doc["created_utc"] = now_utc_iso();
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    for (const auto& [key, value] : config) {
        cfg[key] = value;
    }
    doc["config"] = std::move(cfg);
    nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
    for (const std::string& path : input_paths) {
        inputs[path] = file_digest_hex(path);
    }
    doc["inputs"] = std::move(inputs);

    std::ofstream out = open_out(join(out_dir, "manifest.json"));
    out << doc.dump(2) << '\n';
    if (!out) {
        throw IoError("short write: " + join(out_dir, "manifest.json"));
    }
}

void run_synth_stage(const SynthStage& stage) {
    ensure_directory(stage.out_dir);
    write_manifest(stage.out_dir, "synth", stage.synth.seed,
                   {{"n_sessions", std::to_string(stage.synth.n_sessions)},
                    {"templates", std::to_string(stage.synth.templates_k)},
                    {"contamination", fmt(stage.synth.contamination)}},
                   {});
    const SyntheticCorpus corpus = generate_synthetic(stage.synth);
    {
        std::ofstream out = open_out(join(stage.out_dir, "raw.log"));
        dump_raw_lines(corpus.records, out);
    }
    {
        std::ofstream out = open_out(join(stage.out_dir, "labels.csv"));
        dump_labels(corpus.labels, out);
    }
    log_info("synth: " + std::to_string(corpus.manifest.record_count) + " records, anomaly fraction " +
             fmt(corpus.manifest.anomaly_fraction));
}

void run_parse_stage(const ParseStage& stage) {
    ensure_directory(stage.out_dir);
    std::vector<std::string> inputs{stage.input};
    if (!stage.labels.empty()) {
        inputs.push_back(stage.labels);
    }
    write_manifest(stage.out_dir, "parse", 0,
                   {{"adapter", adapter_name(stage.adapter)},
                    {"tree_depth", std::to_string(stage.parser.tree_depth)},
                    {"sim_threshold", fmt(stage.parser.sim_threshold)},
                    {"max_children", std::to_string(stage.parser.max_children)}},
                   inputs);

    std::vector<LogRecord> records = read_raw(stage.input, stage.adapter);
    if (!stage.labels.empty()) {
        attach_labels(records, stage.labels);
    }
    DrainParser parser(stage.parser);
    std::vector<int> ids;
    ids.reserve(records.size());
    for (const LogRecord& rec : records) {
        ids.push_back(parser.parse_record(rec));
    }
    {
        std::ofstream out = open_out(join(stage.out_dir, "templates.tsv"));
        parser.dump(out);
    }
    {
        std::ofstream out = open_out(join(stage.out_dir, "events.tsv"));
        dump_events(zip_events(records, ids), out);
    }
    log_info("parse: " + std::to_string(records.size()) + " records -> " +
             std::to_string(parser.templates().size()) + " templates");
}

void run_group_stage(const GroupStage& stage) {
    ensure_directory(stage.out_dir);
    write_manifest(stage.out_dir, "group", stage.split.seed,
                   {{"mode", stage.by_session ? "session" : "window"},
                    {"window_size", std::to_string(stage.window_size)},
                    {"window_stride", std::to_string(stage.window_stride)},
                    {"train_fraction", fmt(stage.split.train_fraction)},
                    {"labeled_fraction", fmt(stage.split.labeled_fraction)}},
                   {stage.events});

    std::ifstream in = open_in(stage.events);
    const std::vector<ParsedEvent> events = load_events(in);
    const std::vector<LogSequence> sequences =
        stage.by_session ? group_by_session(events)
                         : sliding_windows(events, stage.window_size, stage.window_stride);
    {
        std::ofstream out = open_out(join(stage.out_dir, "sequences.seq"));
        dump_sequences(sequences, out);
    }
    const SplitResult split = split_train_test(sequences, stage.split);
    const std::pair<const char*, const std::vector<LogSequence>*> parts[] = {
        {"dl.seq", &split.labeled}, {"du.seq", &split.unlabeled}, {"test.seq", &split.test}};
    for (const auto& [name, seqs] : parts) {
        std::ofstream out = open_out(join(stage.out_dir, name));
        dump_sequences(*seqs, out);
    }
    log_info("group: " + std::to_string(sequences.size()) + " sequences -> dl=" +
             std::to_string(split.labeled.size()) + " du=" + std::to_string(split.unlabeled.size()) +
             " test=" + std::to_string(split.test.size()));
}

void run_embed_stage(const EmbedStage& stage) {
    ensure_directory(stage.out_dir);
    std::vector<std::string> inputs{stage.templates};
    if (!stage.external.empty()) {
        inputs.push_back(stage.external);
    }
    write_manifest(stage.out_dir, "embed", stage.hash_seed,
                   {{"dim", std::to_string(stage.dim)},
                    {"source", stage.external.empty() ? "hashing" : "external"}},
                   inputs);

    const std::vector<Template> catalog = load_templates_file(stage.templates);
    std::vector<Eigen::VectorXd> table;
    if (stage.external.empty()) {
        table = HashingEmbedder(stage.dim, stage.hash_seed).embed_catalog(catalog);
    } else {
        table = load_external_embeddings(stage.external, catalog.size());
    }
    std::ofstream out = open_out(join(stage.out_dir, "embeddings.tsv"));
    dump_embeddings(table, out);
    log_info("embed: " + std::to_string(table.size()) + " templates, dim " +
             std::to_string(table.empty() ? 0 : int(table.front().size())));
}

OracleMetrics run_oracle_stage(const OracleStage& stage) {
    ensure_directory(stage.out_dir);
    write_manifest(stage.out_dir, "train-oracle", stage.oracle.seed,
                   {{"t_max", std::to_string(stage.t_max)},
                    {"hidden", std::to_string(stage.oracle.dims.hidden)},
                    {"context", std::to_string(stage.oracle.dims.context)},
                    {"epochs", std::to_string(stage.oracle.epochs)},
                    {"batch", std::to_string(stage.oracle.batch_size)},
                    {"lr", fmt(stage.oracle.lr)}},
                   {stage.dl, stage.embeddings});

    const std::vector<Eigen::VectorXd> table = load_embeddings(stage.embeddings);
    if (table.empty()) {
        throw ConfigError("embedding table '" + stage.embeddings + "' is empty");
    }
    const std::vector<LogSequence> dl_seqs = load_sequences_file(stage.dl);
    const std::vector<EpisodeState> dl =
        embed_sequences(dl_seqs, table, stage.t_max, Origin::Labeled);

    OracleConfig cfg = stage.oracle;
    cfg.dims.input = int(table.front().size());
    const QNetworkParams params = train_oracle(dl, cfg);
    save_checkpoint(join(stage.out_dir, "oracle.ckpt"), params, ModelKind::Oracle, cfg.seed);
    const OracleMetrics metrics = evaluate_oracle(params, dl);
    log_info("oracle: final mean_ce=" + fmt(metrics.mean_cross_entropy) +
             " accuracy=" + fmt(metrics.accuracy));
    return metrics;
}

VariantResult run_train_stage(const TrainStage& stage) {
    ensure_directory(stage.out_dir);
    write_manifest(stage.out_dir, "train", stage.train.seed, train_stage_snapshot(stage),
                   train_stage_inputs(stage));

    const LoadedData data = load_train_inputs(stage);
    TrainConfig train_cfg = stage.train;
    EnvConfig env_cfg = stage.env;
    resolve_run_config(data, train_cfg, env_cfg);

    const std::string ckpt_path = join(stage.out_dir, "agent.ckpt");
    std::ofstream metrics_out = open_out(join(stage.out_dir, "metrics.csv"));
    metrics_out << metrics_csv_header() << '\n';

    TrainHooks hooks;
    hooks.on_episode = [&metrics_out](const EpisodeMetrics& m) {
        metrics_out << metrics_csv_row(m) << '\n';
        metrics_out.flush();
    };
    const std::uint64_t ckpt_seed = train_cfg.seed;
    hooks.on_checkpoint = [&ckpt_path, ckpt_seed](int, const QNetworkParams& p) {
        save_checkpoint(ckpt_path, p, ModelKind::Agent, ckpt_seed);
    };

    VariantResult result =
        run_variant(stage.variant, view_of(data), stage.rewards, env_cfg, train_cfg, hooks);
    if (!metrics_out) {
        throw IoError("short write: " + join(stage.out_dir, "metrics.csv"));
    }
    return result;
}

Prf1 run_eval_stage(const EvalStage& stage) {
    const std::vector<Eigen::VectorXd> table = load_embeddings(stage.embeddings);
    if (table.empty()) {
        throw ConfigError("embedding table '" + stage.embeddings + "' is empty");
    }
    const Checkpoint ckpt = load_checkpoint(stage.model);
    if (ckpt.params.dims().input != int(table.front().size())) {
        throw ConfigError("model input dim " + std::to_string(ckpt.params.dims().input) +
                          " does not match embedding dim " +
                          std::to_string(table.front().size()));
    }
    const std::vector<LogSequence> test_seqs = load_sequences_file(stage.test);
    const std::vector<EpisodeState> test =
        embed_sequences(test_seqs, table, stage.t_max, Origin::Unlabeled);
    const Prf1 metrics = evaluate_model(ckpt.params, test, truth_of(test_seqs, stage.test));

    if (!stage.out_dir.empty()) {
        ensure_directory(stage.out_dir);
        write_manifest(stage.out_dir, "eval", ckpt.seed,
                       {{"t_max", std::to_string(stage.t_max)}},
                       {stage.model, stage.test, stage.embeddings});
        std::ofstream out = open_out(join(stage.out_dir, "report.csv"));
        write_report({{"eval", metrics, 0.0}}, out);
    }
    return metrics;
}

std::vector<ReportRow> run_ablate_stage(const AblateStage& stage) {
    if (stage.variants.empty()) {
        throw ConfigError("ablation needs at least one variant");
    }
    if (stage.base.test.empty()) {
        throw ConfigError("ablation needs a test set to compare variants");
    }
    ensure_directory(stage.out_dir);
    ConfigSnapshot snapshot = train_stage_snapshot(stage.base);
    std::string names;
    for (const Variant v : stage.variants) {
        names += (names.empty() ? "" : ",") + variant_name(v);
    }
    snapshot.emplace_back("variants", names);
    write_manifest(stage.out_dir, "ablate", stage.base.train.seed, snapshot,
                   train_stage_inputs(stage.base));

    const LoadedData data = load_train_inputs(stage.base);
    TrainConfig train_cfg = stage.base.train;
    EnvConfig env_cfg = stage.base.env;
    resolve_run_config(data, train_cfg, env_cfg);

    std::vector<ReportRow> rows;
    for (const Variant variant : stage.variants) {
        log_info("ablation variant " + variant_name(variant));
        std::ofstream episode_out =
            open_out(join(stage.out_dir, variant_name(variant) + "_metrics.csv"));
        episode_out << metrics_csv_header() << '\n';
        TrainHooks hooks;
        hooks.on_episode = [&episode_out](const EpisodeMetrics& m) {
            episode_out << metrics_csv_row(m) << '\n';
        };
        const VariantResult res =
            run_variant(variant, view_of(data), stage.base.rewards, env_cfg, train_cfg, hooks);
        rows.push_back({variant_name(variant), res.metrics, res.runtime_s});
    }
    std::ofstream out = open_out(join(stage.out_dir, "report.csv"));
    write_report(rows, out);
    return rows;
}

std::vector<ReportRow> run_sweep_stage(const SweepStage& stage) {
    ensure_directory(stage.out_dir);
    ConfigSnapshot snapshot = train_stage_snapshot(stage.base);
    auto axis = [](const std::vector<double>& values) {
        std::string s;
        for (double v : values) s += (s.empty() ? "" : ",") + fmt(v);
        return s.empty() ? std::string("default") : s;
    };
    snapshot.emplace_back("lambda_grid", axis(stage.grid.lambdas));
    snapshot.emplace_back("r3_grid", axis(stage.grid.r3s));
    snapshot.emplace_back("r4_grid", axis(stage.grid.r4s));
    write_manifest(stage.out_dir, "sweep", stage.base.train.seed, snapshot,
                   train_stage_inputs(stage.base));

    const LoadedData data = load_train_inputs(stage.base);
    TrainConfig train_cfg = stage.base.train;
    EnvConfig env_cfg = stage.base.env;
    resolve_run_config(data, train_cfg, env_cfg);

    int point_index = 0;
    std::vector<std::unique_ptr<std::ofstream>> episode_files;
    auto hooks_factory = [&](const std::string&) {
        auto file = std::make_unique<std::ofstream>(
            open_out(join(stage.out_dir, "episodes_" + std::to_string(point_index++) + ".csv")));
        *file << metrics_csv_header() << '\n';
        std::ofstream* raw = file.get();
        episode_files.push_back(std::move(file));
        TrainHooks hooks;
        hooks.on_episode = [raw](const EpisodeMetrics& m) { *raw << metrics_csv_row(m) << '\n'; };
        return hooks;
    };

    const std::vector<ReportRow> rows =
        sweep(stage.grid, view_of(data), stage.base.rewards, env_cfg, train_cfg, hooks_factory);
    std::ofstream out = open_out(join(stage.out_dir, "report.csv"));
    write_report(rows, out);
    return rows;
}

Prf1 run_end_to_end(const EndToEndConfig& config) {
    ensure_directory(config.run_dir);
    write_manifest(config.run_dir, "run", config.seed,
                   {{"n_sessions", std::to_string(config.synth.n_sessions)},
                    {"templates", std::to_string(config.synth.templates_k)},
                    {"contamination", fmt(config.synth.contamination)},
                    {"t_max", std::to_string(config.t_max)},
                    {"dim", std::to_string(config.dim)},
                    {"variant", variant_name(config.variant)}},
                   {});

    const std::string corpus_dir = join(config.run_dir, "corpus");
    const std::string parse_dir = join(config.run_dir, "parse");
    const std::string group_dir = join(config.run_dir, "group");
    const std::string embed_dir = join(config.run_dir, "embed");
    const std::string oracle_dir = join(config.run_dir, "oracle");
    const std::string train_dir = join(config.run_dir, "train");
    const std::string eval_dir = join(config.run_dir, "eval");

    auto all_exist = [](std::initializer_list<std::string> paths) {
        for (const std::string& p : paths) {
            if (!file_exists(p)) return false;
        }
        return true;
    };
    auto maybe_skip = [&](const std::string& name, std::initializer_list<std::string> outputs,
                          auto&& body) {
        if (all_exist(outputs)) {
            log_info(name + ": outputs present, skipping");
            return;
        }
        try {
            body();
        } catch (const std::exception& e) {
            throw std::runtime_error("stage " + name + " failed: " + e.what());
        }
    };

    maybe_skip("synth", {join(corpus_dir, "raw.log"), join(corpus_dir, "labels.csv")}, [&] {
        SynthStage s{config.synth, corpus_dir};
        s.synth.seed = derive_seed(config.seed, "synth");
        run_synth_stage(s);
    });

    maybe_skip("parse", {join(parse_dir, "templates.tsv"), join(parse_dir, "events.tsv")}, [&] {
        ParseStage s;
        s.input = join(corpus_dir, "raw.log");
        s.adapter = Adapter::Hdfs;
        s.labels = join(corpus_dir, "labels.csv");
        s.parser = config.parser;
        s.out_dir = parse_dir;
        run_parse_stage(s);
    });

    maybe_skip("group",
               {join(group_dir, "sequences.seq"), join(group_dir, "dl.seq"),
                join(group_dir, "du.seq"), join(group_dir, "test.seq")},
               [&] {
                   GroupStage s;
                   s.events = join(parse_dir, "events.tsv");
                   s.by_session = config.by_session;
                   s.window_size = config.window_size;
                   s.window_stride = config.window_stride;
                   s.split = config.split;
                   s.split.seed = derive_seed(config.seed, "group");
                   s.out_dir = group_dir;
                   run_group_stage(s);
               });

    maybe_skip("embed", {join(embed_dir, "embeddings.tsv")}, [&] {
        EmbedStage s;
        s.templates = join(parse_dir, "templates.tsv");
        s.dim = config.dim;
        s.hash_seed = config.hash_seed;
        s.out_dir = embed_dir;
        run_embed_stage(s);
    });

    maybe_skip("train-oracle", {join(oracle_dir, "oracle.ckpt")}, [&] {
        OracleStage s;
        s.dl = join(group_dir, "dl.seq");
        s.embeddings = join(embed_dir, "embeddings.tsv");
        s.t_max = config.t_max;
        s.oracle = config.oracle;
        s.oracle.seed = derive_seed(config.seed, "oracle");
        s.out_dir = oracle_dir;
        run_oracle_stage(s);
    });

    TrainStage train_stage;
    train_stage.dl = join(group_dir, "dl.seq");
    train_stage.du = join(group_dir, "du.seq");
    train_stage.embeddings = join(embed_dir, "embeddings.tsv");
    train_stage.oracle_ckpt = join(oracle_dir, "oracle.ckpt");
    train_stage.test = join(group_dir, "test.seq");
    train_stage.t_max = config.t_max;
    train_stage.rewards = config.rewards;
    train_stage.env = config.env;
    train_stage.train = config.train;
    train_stage.train.seed = derive_seed(config.seed, "train");
    train_stage.variant = config.variant;
    train_stage.out_dir = train_dir;

    maybe_skip("train", {join(train_dir, "agent.ckpt"), join(train_dir, "metrics.csv")},
               [&] { run_train_stage(train_stage); });

    Prf1 metrics;
    {
        EvalStage s;
        s.model = join(train_dir, "agent.ckpt");
        s.test = join(group_dir, "test.seq");
        s.embeddings = join(embed_dir, "embeddings.tsv");
        s.t_max = config.t_max;
        s.out_dir = eval_dir;
        try {
            metrics = run_eval_stage(s);
        } catch (const std::exception& e) {
            throw std::runtime_error(std::string("stage eval failed: ") + e.what());
        }
    }
    return metrics;
}

}  // namespace logdqn
