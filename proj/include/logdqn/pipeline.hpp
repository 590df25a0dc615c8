#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "logdqn/corpus.hpp"
#include "logdqn/drain.hpp"
#include "logdqn/embedding.hpp"
#include "logdqn/evaluation.hpp"
#include "logdqn/oracle.hpp"
#include "logdqn/trainer.hpp"
#include "logdqn/windowing.hpp"

namespace logdqn {

inline constexpr const char* kArtifactVersion = "0.1.0";

/// Ordered key -> rendered-value pairs recorded in a stage manifest.
using ConfigSnapshot = std::vector<std::pair<std::string, std::string>>;

/// Writes `<out_dir>/manifest.json` carrying the artifact version, stage
/// name, seed, creation timestamp, the config snapshot and a content digest
/// per input file. Stages call this before writing any other artifact.
void write_manifest(const std::string& out_dir, const std::string& stage, std::uint64_t seed,
                    const ConfigSnapshot& config, const std::vector<std::string>& input_paths);

// ---------------------------------------------------------------------------
// Stage runners. Each creates its output directory, writes the manifest
// first, then its artifacts. File names are fixed per stage so stages chain.

/// Outputs: raw.log, labels.csv.
struct SynthStage {
    SyntheticConfig synth;
    std::string out_dir;
};
void run_synth_stage(const SynthStage& stage);

/// Outputs: templates.tsv, events.tsv.
struct ParseStage {
    std::string input;
    Adapter adapter = Adapter::Hdfs;
    std::string labels;  // optional label csv, "" = none
    ParserConfig parser;
    std::string out_dir;
};
void run_parse_stage(const ParseStage& stage);

/// Outputs: sequences.seq plus the dl.seq / du.seq / test.seq partitions.
struct GroupStage {
    std::string events;
    bool by_session = true;
    std::size_t window_size = 20;
    std::size_t window_stride = 20;
    SplitConfig split;
    std::string out_dir;
};
void run_group_stage(const GroupStage& stage);

/// Outputs: embeddings.tsv (hashing TF-IDF, or a validated copy of an
/// external table).
struct EmbedStage {
    std::string templates;
    int dim = 64;
    std::uint64_t hash_seed = 0;
    std::string external;  // "" = use the hashing embedder
    std::string out_dir;
};
void run_embed_stage(const EmbedStage& stage);

/// Outputs: oracle.ckpt. Returns the final training-set metrics.
struct OracleStage {
    std::string dl;
    std::string embeddings;
    int t_max = 50;
    OracleConfig oracle;  // dims.input is overridden by the embedding dim
    std::string out_dir;
};
OracleMetrics run_oracle_stage(const OracleStage& stage);

/// Outputs: agent.ckpt (rewritten every episode) and metrics.csv.
struct TrainStage {
    std::string dl;
    std::string du;
    std::string embeddings;
    std::string oracle_ckpt;
    std::string test;  // optional test.seq; enables per-episode evaluation
    int t_max = 50;
    RewardConfig rewards;
    EnvConfig env;  // seed is derived from train.seed; subset size is capped at |du|
    TrainConfig train;  // dims.input is overridden by the embedding dim
    Variant variant = Variant::Full;
    std::string out_dir;
};
VariantResult run_train_stage(const TrainStage& stage);

/// Prints nothing; returns the metrics. When out_dir is nonempty, writes a
/// one-row report.csv there.
struct EvalStage {
    std::string model;
    std::string test;
    std::string embeddings;
    int t_max = 50;
    std::string out_dir;  // "" = no artifacts
};
Prf1 run_eval_stage(const EvalStage& stage);

/// Outputs: report.csv with one row per variant.
struct AblateStage {
    TrainStage base;  // base.out_dir and base.variant are ignored
    std::vector<Variant> variants;
    std::string out_dir;
};
std::vector<ReportRow> run_ablate_stage(const AblateStage& stage);

/// Outputs: report.csv with one row per grid point.
struct SweepStage {
    TrainStage base;  // base.out_dir and base.variant are ignored
    SweepGrid grid;
    std::string out_dir;
};
std::vector<ReportRow> run_sweep_stage(const SweepStage& stage);

/// The whole pipeline under one run directory with one master seed fanned
/// out to per-stage streams. Stages whose outputs already exist are skipped,
/// so deleting an intermediate and re-running regenerates it identically.
struct EndToEndConfig {
    std::string run_dir;
    std::uint64_t seed = 0;
    SyntheticConfig synth;        // seed field is derived from `seed`
    ParserConfig parser;
    bool by_session = true;
    std::size_t window_size = 20;
    std::size_t window_stride = 20;
    SplitConfig split;            // seed field is derived from `seed`
    int dim = 64;
    std::uint64_t hash_seed = 0;
    int t_max = 50;
    OracleConfig oracle;          // seed/dims derived
    RewardConfig rewards;
    EnvConfig env;
    TrainConfig train;            // seed/dims derived
    Variant variant = Variant::Full;
};
Prf1 run_end_to_end(const EndToEndConfig& config);

// ---------------------------------------------------------------------------
// Small file helpers shared by the stages and the command-line front end.

void ensure_directory(const std::string& dir);
bool file_exists(const std::string& path);
std::vector<LogSequence> load_sequences_file(const std::string& path);

}  // namespace logdqn
