// Command-line front end: one executable, one subcommand per pipeline stage,
// plus `run` for the whole pipeline. Exit codes: 0 success, 1 usage error,
// 2 runtime error.
#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "logdqn/pipeline.hpp"

namespace {

using namespace logdqn;

/// Every subcommand accepts `--config <file>`: an INI file of `key=value`
/// lines (keys match the long flag names) read as defaults, with explicit
/// flags taking precedence. The file is applied before parsing by splicing
/// its values into the argument list, so this sink only keeps CLI11 from
/// rejecting the flag itself.
std::string config_sink;

std::string trim_ws(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

/// Reads `path` and returns flag/value token pairs for every key the command
/// line does not already set. `args` is the normalized argument list and
/// `sub_idx` the position of the subcommand token. Sections other than
/// `[<subcommand>]` are skipped so shared config files stay usable. Returns
/// nonzero on malformed input after printing a diagnostic.
int splice_config_tokens(const std::string& path, CLI::App* sub,
                         const std::vector<std::string>& args, std::size_t sub_idx,
                         std::vector<std::string>& out) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "error: cannot open config file: " << path << '\n';
        return 1;
    }
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim_ws(line);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trim_ws(line.substr(1, line.size() - 2));
            continue;
        }
        if (!section.empty() && section != args[sub_idx]) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            std::cerr << "error: " << path << ':' << line_no << ": expected key=value\n";
            return 1;
        }
        std::string key = trim_ws(line.substr(0, eq));
        const std::string value = trim_ws(line.substr(eq + 1));
        std::replace(key.begin(), key.end(), '-', '_');
        if (key.empty()) {
            std::cerr << "error: " << path << ':' << line_no << ": empty key\n";
            return 1;
        }
        if (key == "config") {
            std::cerr << "error: " << path << ':' << line_no
                      << ": config files cannot chain to other config files\n";
            return 1;
        }
        const std::string flag = "--" + key;
        if (sub != nullptr && sub->get_option_no_throw(flag) == nullptr) {
            std::cerr << "error: " << path << ':' << line_no << ": unknown option '" << key
                      << "' for '" << args[sub_idx] << "'\n";
            return 1;
        }
        bool overridden = false;
        for (std::size_t i = sub_idx + 1; i < args.size(); ++i) {
            if (args[i] == flag || args[i].rfind(flag + "=", 0) == 0) {
                overridden = true;
                break;
            }
        }
        if (overridden) continue;
        for (std::size_t i = 0; i + 1 < out.size(); i += 2) {
            if (out[i] == flag) {  // later entries in the file win
                out.erase(out.begin() + long(i), out.begin() + long(i) + 2);
                break;
            }
        }
        out.push_back(flag);
        out.push_back(value);
    }
    return 0;
}

void print_metrics_line(const Prf1& m) {
    std::cout << std::fixed << std::setprecision(6) << m.precision << ' ' << m.recall << ' '
              << m.f1 << '\n';
}

/// Flags shared by every training-like subcommand; `context = 0` means
/// "match the hidden size".
struct TrainFlags {
    TrainStage stage;
    int context = 0;
    std::string variant = "full";
};

void resolve_dims(NetDims& dims, int context) {
    dims.context = context > 0 ? context : dims.hidden;
}

void add_model_flags(CLI::App* cmd, NetDims& dims, int& context) {
    cmd->add_option("--hidden", dims.hidden, "LSTM hidden size per direction")
        ->capture_default_str();
    cmd->add_option("--context", context, "attention context size (0 = match hidden)")
        ->capture_default_str();
}

void add_reward_env_flags(CLI::App* cmd, RewardConfig& rewards, EnvConfig& env) {
    cmd->add_option("--r1", rewards.r1, "reward for a caught labeled anomaly")
        ->capture_default_str();
    cmd->add_option("--r2", rewards.r2, "reward for a confirmed labeled normal")
        ->capture_default_str();
    cmd->add_option("--r3", rewards.r3, "penalty magnitude for a false alarm")
        ->capture_default_str();
    cmd->add_option("--r4", rewards.r4, "penalty magnitude for a missed anomaly")
        ->capture_default_str();
    cmd->add_option("--delta", rewards.delta, "confidence threshold of the shaped reward")
        ->capture_default_str();
    cmd->add_option("--unlabeled_anomaly_penalty", rewards.unlabeled_anomaly_penalty,
                    "reward for flagging an unlabeled sequence")
        ->capture_default_str();
    cmd->add_option("--p", env.labeled_prob, "probability the next state is a labeled draw")
        ->capture_default_str();
    cmd->add_option("--subset_size", env.subset_size,
                    "candidate pool per unlabeled transition (capped at |du|)")
        ->capture_default_str();
}

void add_train_flags(CLI::App* cmd, TrainFlags& f, bool with_variant) {
    cmd->add_option("--dl", f.stage.dl, "labeled training sequences")->required();
    cmd->add_option("--du", f.stage.du, "unlabeled training sequences")->required();
    cmd->add_option("--embeddings", f.stage.embeddings, "template embedding table")->required();
    cmd->add_option("--oracle", f.stage.oracle_ckpt, "oracle checkpoint")->required();
    cmd->add_option("--test", f.stage.test, "test sequences for per-episode evaluation");
    cmd->add_option("--t_max", f.stage.t_max, "maximum sequence length fed to the network")
        ->capture_default_str();
    add_model_flags(cmd, f.stage.train.dims, f.context);

    TrainConfig& t = f.stage.train;
    cmd->add_option("--n_episodes", t.n_episodes, "training episodes")->capture_default_str();
    cmd->add_option("--n_steps", t.n_steps, "steps per episode")->capture_default_str();
    cmd->add_option("--warmup_episodes", t.warmup_episodes,
                    "episodes that only fill the replay memory")
        ->capture_default_str();
    cmd->add_option("--target_sync_steps", t.target_sync_steps,
                    "steps between target-network copies")
        ->capture_default_str();
    cmd->add_option("--replay_capacity", t.replay_capacity, "replay memory capacity")
        ->capture_default_str();
    cmd->add_option("--replay_batch", t.replay_batch, "transitions per update")
        ->capture_default_str();
    cmd->add_option("--reg_batch", t.reg_batch,
                    "labeled samples per update (split evenly across classes)")
        ->capture_default_str();
    cmd->add_option("--gamma", t.gamma, "discount factor")->capture_default_str();
    cmd->add_option("--lr", t.lr, "learning rate")->capture_default_str();
    cmd->add_option("--lambda", t.lambda, "weight of the label-consistency loss")
        ->capture_default_str();
    cmd->add_option("--epsilon_start", t.epsilon_start, "initial exploration rate")
        ->capture_default_str();
    cmd->add_option("--epsilon_end", t.epsilon_end, "final exploration rate")
        ->capture_default_str();
    cmd->add_option("--anneal_rate", t.anneal_rate,
                    "exploration decay per step (default: reach the floor halfway)");
    cmd->add_option("--seed", t.seed, "run seed")->capture_default_str();
    add_reward_env_flags(cmd, f.stage.rewards, f.stage.env);
    if (with_variant) {
        cmd->add_option("--variant", f.variant, "training variant")
            ->check(CLI::IsMember({"full", "no_cross", "random_env", "euc_env"}))
            ->capture_default_str();
    }
}

void finalize_train_flags(TrainFlags& f) {
    resolve_dims(f.stage.train.dims, f.context);
    f.stage.variant = variant_from_name(f.variant);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Semi-supervised log anomaly detection with a deep Q-network agent"};
    app.require_subcommand(1);

    // --- synth -------------------------------------------------------------
    auto* synth = app.add_subcommand("synth", "generate a synthetic labeled log corpus");
    synth->add_option("--config", config_sink, "INI file of key=value defaults for this subcommand (flags override)");
    SynthStage synth_stage;
    synth->add_option("--n_sessions", synth_stage.synth.n_sessions, "number of sessions")
        ->capture_default_str();
    synth->add_option("--templates", synth_stage.synth.templates_k, "distinct message templates")
        ->capture_default_str();
    synth->add_option("--contamination", synth_stage.synth.contamination,
                      "fraction of anomalous sessions")
        ->capture_default_str();
    synth->add_option("--seed", synth_stage.synth.seed, "corpus seed")->capture_default_str();
    synth->add_option("--out", synth_stage.out_dir, "output directory")->required();
    synth->callback([&] { run_synth_stage(synth_stage); });

    // --- parse -------------------------------------------------------------
    auto* parse = app.add_subcommand("parse", "mine message templates from a raw log");
    parse->add_option("--config", config_sink, "INI file of key=value defaults for this subcommand (flags override)");
    ParseStage parse_stage;
    std::string adapter_name_flag = "hdfs";
    parse->add_option("--input", parse_stage.input, "raw log file")->required();
    parse->add_option("--adapter", adapter_name_flag, "log format adapter")
        ->check(CLI::IsMember({"hdfs", "bgl", "generic"}))
        ->capture_default_str();
    parse->add_option("--labels", parse_stage.labels, "session label csv");
    parse->add_option("--tree_depth", parse_stage.parser.tree_depth, "parse tree depth")
        ->capture_default_str();
    parse->add_option("--sim_threshold", parse_stage.parser.sim_threshold,
                      "template merge similarity threshold")
        ->capture_default_str();
    parse->add_option("--max_children", parse_stage.parser.max_children,
                      "max children per tree node")
        ->capture_default_str();
    parse->add_option("--out", parse_stage.out_dir, "output directory")->required();
    parse->callback([&] {
        parse_stage.adapter = adapter_from_name(adapter_name_flag);
        run_parse_stage(parse_stage);
    });

    // --- group -------------------------------------------------------------
    auto* group = app.add_subcommand("group", "group events into sequences and split them");
    group->add_option("--config", config_sink, "INI file of key=value defaults for this subcommand (flags override)");
    GroupStage group_stage;
    std::string mode = "session";
    group->add_option("--events", group_stage.events, "parsed event file")->required();
    group->add_option("--mode", mode, "grouping mode")
        ->check(CLI::IsMember({"session", "window"}))
        ->capture_default_str();
    group->add_option("--window_size", group_stage.window_size, "sliding window size")
        ->capture_default_str();
    group->add_option("--window_stride", group_stage.window_stride, "sliding window stride")
        ->capture_default_str();
    group->add_option("--train_fraction", group_stage.split.train_fraction,
                      "fraction of sequences used for training")
        ->capture_default_str();
    group->add_option("--labeled_fraction", group_stage.split.labeled_fraction,
                      "labeled share of the training sequences")
        ->capture_default_str();
    group->add_option("--seed", group_stage.split.seed, "split seed")->capture_default_str();
    group->add_option("--out", group_stage.out_dir, "output directory")->required();
    group->callback([&] {
        group_stage.by_session = mode == "session";
        run_group_stage(group_stage);
    });

    // --- embed -------------------------------------------------------------
    auto* embed = app.add_subcommand("embed", "embed templates into vectors");
    embed->add_option("--config", config_sink, "INI file of key=value defaults for this subcommand (flags override)");
    EmbedStage embed_stage;
    embed->add_option("--templates", embed_stage.templates, "template catalog")->required();
    embed->add_option("--dim", embed_stage.dim, "embedding dimension")->capture_default_str();
    embed->add_option("--hash_seed", embed_stage.hash_seed, "feature-hashing seed")
        ->capture_default_str();
    embed->add_option("--external", embed_stage.external,
                      "external embedding table to validate and use instead");
    embed->add_option("--out", embed_stage.out_dir, "output directory")->required();
    embed->callback([&] { run_embed_stage(embed_stage); });

    // --- train-oracle ------------------------------------------------------
    auto* oracle = app.add_subcommand("train-oracle", "fit the reference classifier");
    oracle->add_option("--config", config_sink, "INI file of key=value defaults for this subcommand (flags override)");
    OracleStage oracle_stage;
    int oracle_context = 0;
    oracle->add_option("--dl", oracle_stage.dl, "labeled training sequences")->required();
    oracle->add_option("--embeddings", oracle_stage.embeddings, "template embedding table")
        ->required();
    oracle->add_option("--t_max", oracle_stage.t_max, "maximum sequence length")
        ->capture_default_str();
    add_model_flags(oracle, oracle_stage.oracle.dims, oracle_context);
    oracle->add_option("--epochs", oracle_stage.oracle.epochs, "training epochs")
        ->capture_default_str();
    oracle->add_option("--batch", oracle_stage.oracle.batch_size, "minibatch size")
        ->capture_default_str();
    oracle->add_option("--lr", oracle_stage.oracle.lr, "learning rate")->capture_default_str();
    oracle->add_option("--seed", oracle_stage.oracle.seed, "training seed")
        ->capture_default_str();
    oracle->add_option("--out", oracle_stage.out_dir, "output directory")->required();
    oracle->callback([&] {
        resolve_dims(oracle_stage.oracle.dims, oracle_context);
        const OracleMetrics m = run_oracle_stage(oracle_stage);
        std::cout << std::fixed << std::setprecision(6) << "final_ce " << m.mean_cross_entropy
                  << " accuracy " << m.accuracy << '\n';
    });

    // --- train -------------------------------------------------------------
    auto* train_cmd = app.add_subcommand("train", "train the detection agent");
    train_cmd->add_option("--config", config_sink, "INI file of key=value defaults for this subcommand (flags override)");
    TrainFlags train_flags;
    add_train_flags(train_cmd, train_flags, true);
    train_cmd->add_option("--out", train_flags.stage.out_dir, "output directory")->required();
    train_cmd->callback([&] {
        finalize_train_flags(train_flags);
        const VariantResult res = run_train_stage(train_flags.stage);
        if (!train_flags.stage.test.empty()) {
            print_metrics_line(res.metrics);
        }
    });

    // --- eval --------------------------------------------------------------
    auto* eval = app.add_subcommand("eval", "score a checkpoint on a test set");
    eval->add_option("--config", config_sink, "INI file of key=value defaults for this subcommand (flags override)");
    EvalStage eval_stage;
    eval->add_option("--model", eval_stage.model, "agent checkpoint")->required();
    eval->add_option("--test", eval_stage.test, "test sequences")->required();
    eval->add_option("--embeddings", eval_stage.embeddings, "template embedding table")
        ->required();
    eval->add_option("--t_max", eval_stage.t_max, "maximum sequence length")
        ->capture_default_str();
    eval->add_option("--out", eval_stage.out_dir, "optional report directory");
    eval->callback([&] { print_metrics_line(run_eval_stage(eval_stage)); });

    // --- ablate ------------------------------------------------------------
    auto* ablate = app.add_subcommand("ablate", "compare training variants");
    ablate->add_option("--config", config_sink, "INI file of key=value defaults for this subcommand (flags override)");
    TrainFlags ablate_flags;
    std::vector<std::string> variant_names{"full", "no_cross", "random_env", "euc_env"};
    add_train_flags(ablate, ablate_flags, false);
    ablate->add_option("--variants", variant_names, "variants to run")
        ->delimiter(',')
        ->check(CLI::IsMember({"full", "no_cross", "random_env", "euc_env"}))
        ->capture_default_str();
    std::string ablate_out;
    ablate->add_option("--out", ablate_out, "output directory")->required();
    ablate->callback([&] {
        finalize_train_flags(ablate_flags);
        AblateStage stage;
        stage.base = ablate_flags.stage;
        for (const std::string& name : variant_names) {
            stage.variants.push_back(variant_from_name(name));
        }
        stage.out_dir = ablate_out;
        run_ablate_stage(stage);
    });

    // --- sweep -------------------------------------------------------------
    auto* sweep_cmd = app.add_subcommand("sweep", "grid-search reward/loss hyperparameters");
    sweep_cmd->add_option("--config", config_sink, "INI file of key=value defaults for this subcommand (flags override)");
    TrainFlags sweep_flags;
    SweepGrid grid;
    int jobs = 1;
    add_train_flags(sweep_cmd, sweep_flags, false);
    sweep_cmd->add_option("--lambda_grid", grid.lambdas, "loss-weight values")->delimiter(',');
    sweep_cmd->add_option("--r3_grid", grid.r3s, "false-alarm penalty values")->delimiter(',');
    sweep_cmd->add_option("--r4_grid", grid.r4s, "missed-anomaly penalty values")->delimiter(',');
    sweep_cmd->add_option("--jobs", jobs, "worker cap (runs are serial at 1)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    std::string sweep_out;
    sweep_cmd->add_option("--out", sweep_out, "output directory")->required();
    sweep_cmd->callback([&] {
        finalize_train_flags(sweep_flags);
        SweepStage stage;
        stage.base = sweep_flags.stage;
        stage.grid = grid;
        stage.out_dir = sweep_out;
        run_sweep_stage(stage);
    });

    // --- run ---------------------------------------------------------------
    auto* run = app.add_subcommand("run", "full pipeline on a synthetic corpus");
    run->add_option("--config", config_sink, "INI file of key=value defaults for this subcommand (flags override)");
    EndToEndConfig e2e;
    int run_context = 0;
    std::string run_variant_name = "full";
    std::string run_mode = "session";
    run->add_option("--out", e2e.run_dir, "run directory")->required();
    run->add_option("--seed", e2e.seed, "master seed fanned out to every stage")
        ->capture_default_str();
    run->add_option("--n_sessions", e2e.synth.n_sessions, "number of sessions")
        ->capture_default_str();
    run->add_option("--templates", e2e.synth.templates_k, "distinct message templates")
        ->capture_default_str();
    run->add_option("--contamination", e2e.synth.contamination, "fraction of anomalous sessions")
        ->capture_default_str();
    run->add_option("--mode", run_mode, "grouping mode")
        ->check(CLI::IsMember({"session", "window"}))
        ->capture_default_str();
    run->add_option("--train_fraction", e2e.split.train_fraction,
                    "fraction of sequences used for training")
        ->capture_default_str();
    run->add_option("--labeled_fraction", e2e.split.labeled_fraction,
                    "labeled share of the training sequences")
        ->capture_default_str();
    run->add_option("--dim", e2e.dim, "embedding dimension")->capture_default_str();
    run->add_option("--t_max", e2e.t_max, "maximum sequence length")->capture_default_str();
    add_model_flags(run, e2e.train.dims, run_context);
    run->add_option("--oracle_epochs", e2e.oracle.epochs, "oracle training epochs")
        ->capture_default_str();
    run->add_option("--n_episodes", e2e.train.n_episodes, "training episodes")
        ->capture_default_str();
    run->add_option("--n_steps", e2e.train.n_steps, "steps per episode")->capture_default_str();
    run->add_option("--warmup_episodes", e2e.train.warmup_episodes,
                    "episodes that only fill the replay memory")
        ->capture_default_str();
    run->add_option("--lambda", e2e.train.lambda, "weight of the label-consistency loss")
        ->capture_default_str();
    run->add_option("--variant", run_variant_name, "training variant")
        ->check(CLI::IsMember({"full", "no_cross", "random_env", "euc_env"}))
        ->capture_default_str();
    add_reward_env_flags(run, e2e.rewards, e2e.env);
    run->callback([&] {
        e2e.by_session = run_mode == "session";
        resolve_dims(e2e.train.dims, run_context);
        e2e.oracle.dims = e2e.train.dims;
        e2e.variant = variant_from_name(run_variant_name);
        print_metrics_line(run_end_to_end(e2e));
    });

    // Long flags are registered with underscores (matching config-file keys);
    // accept dashed spellings too by normalizing the name part of each token.
    std::vector<std::string> args;
    args.reserve(static_cast<std::size_t>(argc));
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        if (a.size() > 2 && a[0] == '-' && a[1] == '-') {
            const std::size_t stop = std::min(a.find('='), a.size());
            for (std::size_t k = 2; k < stop; ++k) {
                if (a[k] == '-') a[k] = '_';
            }
        }
        args.push_back(std::move(a));
    }
    // Apply a config file, if any, as defaults: its values are inserted right
    // after the subcommand token so explicit flags stay authoritative.
    std::size_t sub_idx = args.size();
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (!args[i].empty() && args[i][0] != '-') {
            sub_idx = i;
            break;
        }
    }
    std::string config_path;
    for (std::size_t i = sub_idx + 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            config_path = args[i + 1];
        } else if (args[i].rfind("--config=", 0) == 0) {
            config_path = args[i].substr(9);
        }
    }
    if (!config_path.empty()) {
        std::vector<std::string> from_file;
        const int rc = splice_config_tokens(config_path, app.get_subcommand_no_throw(args[sub_idx]),
                                            args, sub_idx, from_file);
        if (rc != 0) return rc;
        args.insert(args.begin() + long(sub_idx) + 1, from_file.begin(), from_file.end());
    }

    std::vector<const char*> arg_ptrs;
    arg_ptrs.reserve(args.size() + 1);
    arg_ptrs.push_back(argv[0]);
    for (const std::string& a : args) arg_ptrs.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(arg_ptrs.size()), arg_ptrs.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
