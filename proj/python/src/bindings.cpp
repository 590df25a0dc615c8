// Python bindings: the pipeline stages, the end-to-end runner and the small
// numeric primitives (rewards, schedule, metrics, parsing) that are useful
// for notebook-scale experiments.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "logdqn/drain.hpp"
#include "logdqn/environment.hpp"
#include "logdqn/evaluation.hpp"
#include "logdqn/pipeline.hpp"
#include "logdqn/trainer.hpp"

namespace py = pybind11;
using namespace logdqn;

namespace {

EpisodeState stub_state(const std::string& label) {
    EpisodeState s;
    s.seq_id = "stub";
    s.length = 1;
    s.vectors = Eigen::VectorXd::Zero(1);
    s.pooled = Eigen::VectorXd::Zero(1);
    if (label == "unlabeled") {
        s.origin = Origin::Unlabeled;
    } else if (label == "normal") {
        s.origin = Origin::Labeled;
        s.label = Label::Normal;
    } else if (label == "anomaly") {
        s.origin = Origin::Labeled;
        s.label = Label::Anomaly;
    } else {
        throw ConfigError("label must be 'normal', 'anomaly' or 'unlabeled', got '" + label + "'");
    }
    return s;
}

Action action_from(const std::string& name) {
    if (name == "normal") return Action::Normal;
    if (name == "anomaly") return Action::Anomaly;
    throw ConfigError("action must be 'normal' or 'anomaly', got '" + name + "'");
}

std::string repr_prf1(const Prf1& m) {
    std::ostringstream os;
    os << "Prf1(precision=" << m.precision << ", recall=" << m.recall << ", f1=" << m.f1 << ")";
    return os.str();
}

}  // namespace

PYBIND11_MODULE(_logdqn, m) {
    m.doc() = "Semi-supervised log anomaly detection with a deep Q-network agent";
    m.attr("__version__") = kArtifactVersion;

    py::class_<Prf1>(m, "Prf1")
        .def_readonly("precision", &Prf1::precision)
        .def_readonly("recall", &Prf1::recall)
        .def_readonly("f1", &Prf1::f1)
        .def("__repr__", &repr_prf1);

    m.def(
        "prf1",
        [](std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn) {
            ConfusionCounts c;
            c.tp = tp;
            c.fp = fp;
            c.fn = fn;
            c.tn = tn;
            return prf1(c);
        },
        py::arg("tp"), py::arg("fp"), py::arg("fn"), py::arg("tn"),
        "Precision, recall and F1 from confusion counts; 0/0 collapses to 0.");

    m.def(
        "external_reward",
        [](const std::string& label, const std::string& action) {
            return external_reward(stub_state(label), action_from(action), RewardConfig{});
        },
        py::arg("label"), py::arg("action"),
        "Default-config reward for acting on a 'normal', 'anomaly' or 'unlabeled' sequence.");

    m.def("intrinsic_reward", &intrinsic_reward_from_prob, py::arg("rob_p"),
          py::arg("delta") = 0.5,
          "Confidence-shaped reward from the classifier's normalcy probability.");

    m.def("joint_reward", &joint_reward, py::arg("external"), py::arg("intrinsic"));

    m.def(
        "softmax_binary",
        [](double q_normal, double q_anomaly) {
            return softmax_binary(Eigen::Vector2d(q_normal, q_anomaly));
        },
        py::arg("q_normal"), py::arg("q_anomaly"),
        "Probability assigned to the anomaly entry of a two-value vector.");

    m.def(
        "epsilon_at",
        [](std::int64_t step, std::int64_t total_steps, double start, double end,
           std::optional<double> anneal_rate) {
            TrainConfig cfg;
            cfg.n_episodes = 1;
            cfg.n_steps = int(total_steps);
            cfg.epsilon_start = start;
            cfg.epsilon_end = end;
            cfg.anneal_rate = anneal_rate;
            return epsilon_at(step, cfg);
        },
        py::arg("step"), py::arg("total_steps"), py::arg("start") = 1.0, py::arg("end") = 0.1,
        py::arg("anneal_rate") = py::none(),
        "Linear exploration schedule with a floor; the default rate reaches the "
        "floor halfway through.");

    py::class_<DrainParser>(m, "DrainParser")
        .def(py::init([](int tree_depth, double sim_threshold, int max_children) {
                 return DrainParser(ParserConfig{tree_depth, sim_threshold, max_children});
             }),
             py::arg("tree_depth") = 4, py::arg("sim_threshold") = 0.4,
             py::arg("max_children") = 100)
        .def(
            "parse_line",
            [](DrainParser& self, const std::string& line) {
                std::istringstream in(line);
                LogRecord rec;
                std::string tok;
                while (in >> tok) rec.content.push_back(tok);
                return self.parse_record(rec);
            },
            py::arg("line"),
            "Whitespace-tokenizes one message, masks digit-bearing tokens and "
            "returns its template id.")
        .def_property_readonly("template_count",
                               [](const DrainParser& self) { return self.templates().size(); })
        .def("templates", [](const DrainParser& self) {
            py::list out;
            for (const Template& t : self.templates()) {
                out.append(py::make_tuple(t.id, t.tokens, t.count));
            }
            return out;
        });

    m.def(
        "run_synth",
        [](const std::string& out, std::int64_t n_sessions, int templates, double contamination,
           std::uint64_t seed) {
            SynthStage stage;
            stage.synth.n_sessions = n_sessions;
            stage.synth.templates_k = templates;
            stage.synth.contamination = contamination;
            stage.synth.seed = seed;
            stage.out_dir = out;
            run_synth_stage(stage);
        },
        py::arg("out"), py::arg("n_sessions") = 1000, py::arg("templates") = 50,
        py::arg("contamination") = 0.03, py::arg("seed") = 0,
        "Generates a labeled synthetic corpus (raw.log, labels.csv).");

    m.def(
        "run_eval",
        [](const std::string& model, const std::string& test, const std::string& embeddings,
           int t_max) {
            EvalStage stage;
            stage.model = model;
            stage.test = test;
            stage.embeddings = embeddings;
            stage.t_max = t_max;
            return run_eval_stage(stage);
        },
        py::arg("model"), py::arg("test"), py::arg("embeddings"), py::arg("t_max") = 50,
        "Scores a trained checkpoint on a labeled sequence file.");

    m.def(
        "run_end_to_end",
        [](const std::string& out, std::uint64_t seed, std::int64_t n_sessions, int templates,
           double contamination, double train_fraction, double labeled_fraction, int dim,
           int t_max, int hidden, int oracle_epochs, int n_episodes, int n_steps,
           int warmup_episodes, double lambda, std::size_t subset_size,
           const std::string& variant) {
            EndToEndConfig cfg;
            cfg.run_dir = out;
            cfg.seed = seed;
            cfg.synth.n_sessions = n_sessions;
            cfg.synth.templates_k = templates;
            cfg.synth.contamination = contamination;
            cfg.split.train_fraction = train_fraction;
            cfg.split.labeled_fraction = labeled_fraction;
            cfg.dim = dim;
            cfg.t_max = t_max;
            cfg.train.dims = NetDims{dim, hidden, hidden};
            cfg.oracle.dims = cfg.train.dims;
            cfg.oracle.epochs = oracle_epochs;
            cfg.train.n_episodes = n_episodes;
            cfg.train.n_steps = n_steps;
            cfg.train.warmup_episodes = warmup_episodes;
            cfg.train.lambda = lambda;
            cfg.env.subset_size = subset_size;
            cfg.variant = variant_from_name(variant);
            return run_end_to_end(cfg);
        },
        py::arg("out"), py::arg("seed") = 0, py::arg("n_sessions") = 1000,
        py::arg("templates") = 50, py::arg("contamination") = 0.03,
        py::arg("train_fraction") = 0.8, py::arg("labeled_fraction") = 0.3, py::arg("dim") = 64,
        py::arg("t_max") = 50, py::arg("hidden") = 128, py::arg("oracle_epochs") = 30,
        py::arg("n_episodes") = 10, py::arg("n_steps") = 2000, py::arg("warmup_episodes") = 5,
        py::arg("lambda_") = 1.0, py::arg("subset_size") = 1000, py::arg("variant") = "full",
        py::call_guard<py::gil_scoped_release>(),
        "Synthesizes, parses, groups, embeds, trains and evaluates under one "
        "run directory; stages with outputs present are skipped.");

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);
}
