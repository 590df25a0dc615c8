// End-to-end checks of the command-line executable: exit codes, flag
// spellings, config files, stage chaining and logging.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

namespace {

namespace fs = std::filesystem;

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::size_t line_count(const fs::path& path) {
    std::ifstream in(path);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) ++n;
    return n;
}

/// Runs the installed binary through the shell, capturing exit code and both
/// streams. `env_prefix` may set variables, e.g. "LOGDQN_LOG_LEVEL=error".
CliResult run_cli(const std::string& args, const std::string& env_prefix = "") {
    static int counter = 0;
    const fs::path dir = fs::temp_directory_path() / "logdqn_cli_capture";
    fs::create_directories(dir);
    const fs::path out_file = dir / ("out_" + std::to_string(counter) + ".txt");
    const fs::path err_file = dir / ("err_" + std::to_string(counter) + ".txt");
    ++counter;

    std::string cmd = env_prefix;
    if (!cmd.empty()) cmd += ' ';
    cmd += std::string("'") + LOGDQN_CLI_PATH + "' " + args + " >'" + out_file.string() +
           "' 2>'" + err_file.string() + "'";
    const int status = std::system(cmd.c_str());

    CliResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = slurp(out_file);
    result.err = slurp(err_file);
    return result;
}

/// Scratch directory per test case, removed on destruction.
struct Scratch {
    fs::path base;
    explicit Scratch(const std::string& tag) {
        base = fs::temp_directory_path() / ("logdqn_cli_" + tag);
        fs::remove_all(base);
        fs::create_directories(base);
    }
    ~Scratch() {
        std::error_code ec;
        fs::remove_all(base, ec);
    }
    std::string operator/(const std::string& name) const { return (base / name).string(); }
};

bool parse_metrics_line(const std::string& text, double metrics[3]) {
    std::istringstream in(text);
    return bool(in >> metrics[0] >> metrics[1] >> metrics[2]);
}

}  // namespace

TEST_CASE("help requests succeed and list the subcommands") {
    const CliResult top = run_cli("--help");
    CHECK(top.exit_code == 0);
    CHECK(top.out.find("synth") != std::string::npos);
    CHECK(top.out.find("train") != std::string::npos);
    CHECK(top.out.find("eval") != std::string::npos);

    const CliResult sub = run_cli("train --help");
    CHECK(sub.exit_code == 0);
    CHECK(sub.out.find("--lambda") != std::string::npos);
}

TEST_CASE("usage mistakes exit with code one") {
    CHECK(run_cli("").exit_code == 1);                        // no subcommand
    CHECK(run_cli("frobnicate").exit_code == 1);              // unknown subcommand
    CHECK(run_cli("synth").exit_code == 1);                   // missing required --out
    Scratch dir("usage");
    CHECK(run_cli("synth --bogus 1 --out '" + (dir / "x") + "'").exit_code == 1);
    CHECK(run_cli("parse --input a --adapter syslog --out '" + (dir / "y") + "'").exit_code == 1);
}

TEST_CASE("the stages chain on disk and the final scores print as three floats") {
    Scratch dir("chain");
    const std::string corpus = dir / "corpus";
    const std::string parse = dir / "parse";
    const std::string group = dir / "group";
    const std::string embed = dir / "embed";
    const std::string oracle = dir / "oracle";
    const std::string train = dir / "train";

    CHECK(run_cli("synth --n_sessions 60 --templates 6 --contamination 0.1 --seed 5 --out '" +
                  corpus + "'")
              .exit_code == 0);
    CHECK(run_cli("parse --input '" + corpus + "/raw.log' --labels '" + corpus +
                  "/labels.csv' --out '" + parse + "'")
              .exit_code == 0);
    CHECK(run_cli("group --events '" + parse + "/events.tsv' --train_fraction 0.7 "
                  "--labeled_fraction 0.4 --seed 5 --out '" + group + "'")
              .exit_code == 0);
    CHECK(run_cli("embed --templates '" + parse + "/templates.tsv' --dim 16 --out '" + embed +
                  "'")
              .exit_code == 0);

    const CliResult oracle_run =
        run_cli("train-oracle --dl '" + group + "/dl.seq' --embeddings '" + embed +
                "/embeddings.tsv' --t_max 10 --hidden 8 --epochs 2 --batch 8 --lr 0.01 "
                "--seed 5 --out '" + oracle + "'");
    CHECK(oracle_run.exit_code == 0);
    CHECK(oracle_run.out.find("final_ce") != std::string::npos);
    CHECK(oracle_run.out.find("accuracy") != std::string::npos);

    const CliResult train_run = run_cli(
        "train --dl '" + group + "/dl.seq' --du '" + group + "/du.seq' --embeddings '" + embed +
        "/embeddings.tsv' --oracle '" + oracle + "/oracle.ckpt' --test '" + group +
        "/test.seq' --t_max 10 --hidden 8 --n_episodes 2 --n_steps 30 --warmup_episodes 1 "
        "--target_sync_steps 25 --replay_capacity 300 --replay_batch 8 --reg_batch 4 "
        "--subset_size 16 --seed 5 --out '" + train + "'");
    CHECK(train_run.exit_code == 0);
    double train_metrics[3];
    REQUIRE(parse_metrics_line(train_run.out, train_metrics));

    const CliResult eval_run =
        run_cli("eval --model '" + train + "/agent.ckpt' --test '" + group +
                "/test.seq' --embeddings '" + embed + "/embeddings.tsv' --t_max 10");
    CHECK(eval_run.exit_code == 0);
    double eval_metrics[3];
    REQUIRE(parse_metrics_line(eval_run.out, eval_metrics));
    for (int i = 0; i < 3; ++i) {
        CHECK(eval_metrics[i] >= 0.0);
        CHECK(eval_metrics[i] <= 1.0);
        CHECK(eval_metrics[i] == train_metrics[i]);  // same model, same test set
    }
    // six fixed decimals, space-separated
    CHECK(eval_run.out.find('.') != std::string::npos);
    const std::size_t dot = eval_run.out.find('.');
    CHECK(eval_run.out.find(' ', dot) - dot == 7);
}

TEST_CASE("dashed long flags are aliases for the underscored spellings") {
    Scratch dir("dashes");
    const CliResult dashed = run_cli(
        "synth --n-sessions 30 --templates 5 --contamination 0.1 --seed 4 --out '" +
        (dir / "a") + "'");
    CHECK(dashed.exit_code == 0);
    const CliResult underscored = run_cli(
        "synth --n_sessions 30 --templates 5 --contamination 0.1 --seed 4 --out '" +
        (dir / "b") + "'");
    CHECK(underscored.exit_code == 0);
    CHECK(slurp(dir.base / "a" / "raw.log") == slurp(dir.base / "b" / "raw.log"));
    CHECK(slurp(dir.base / "a" / "labels.csv") == slurp(dir.base / "b" / "labels.csv"));
}

TEST_CASE("config files provide defaults that explicit flags override") {
    Scratch dir("config");
    std::ofstream(dir / "synth.ini") << "n_sessions=24\ntemplates=5\ncontamination=0.1\nseed=9\n";

    CHECK(run_cli("synth --config '" + (dir / "synth.ini") + "' --out '" + (dir / "a") + "'")
              .exit_code == 0);
    CHECK(line_count(dir.base / "a" / "labels.csv") == 24);

    CHECK(run_cli("synth --config '" + (dir / "synth.ini") + "' --n_sessions 12 --out '" +
                  (dir / "b") + "'")
              .exit_code == 0);
    CHECK(line_count(dir.base / "b" / "labels.csv") == 12);
}

TEST_CASE("runtime failures exit with code two and name the culprit") {
    Scratch dir("runtime");
    std::ofstream(dir / "broken.ckpt") << "not a checkpoint";
    std::ofstream(dir / "embeddings.tsv") << "0\t1.0\t0.0\n";
    std::ofstream(dir / "test.seq") << "s1\tNormal\t0\n";

    const CliResult corrupt =
        run_cli("eval --model '" + (dir / "broken.ckpt") + "' --test '" + (dir / "test.seq") +
                "' --embeddings '" + (dir / "embeddings.tsv") + "'");
    CHECK(corrupt.exit_code == 2);
    CHECK(corrupt.err.find("broken.ckpt") != std::string::npos);

    const CliResult missing =
        run_cli("parse --input '" + (dir / "nope.log") + "' --out '" + (dir / "out") + "'");
    CHECK(missing.exit_code == 2);
    CHECK(missing.err.find("nope.log") != std::string::npos);
}

TEST_CASE("the log level variable silences informational messages") {
    Scratch dir("loglevel");
    const CliResult quiet =
        run_cli("synth --n_sessions 20 --templates 5 --contamination 0.1 --out '" +
                    (dir / "a") + "'",
                "LOGDQN_LOG_LEVEL=error");
    CHECK(quiet.exit_code == 0);
    CHECK(quiet.err.find("[info]") == std::string::npos);

    const CliResult chatty =
        run_cli("synth --n_sessions 20 --templates 5 --contamination 0.1 --out '" +
                    (dir / "b") + "'",
                "LOGDQN_LOG_LEVEL=info");
    CHECK(chatty.exit_code == 0);
    CHECK(chatty.err.find("[info]") != std::string::npos);
}
