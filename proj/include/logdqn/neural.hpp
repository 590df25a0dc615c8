#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>

#include "logdqn/embedding.hpp"

namespace logdqn {

/// Shapes of the attention Bi-LSTM Q-network: input dimension, LSTM hidden
/// size, attention context size.
struct NetDims {
    int input = 64;
    int hidden = 128;
    int context = 128;

    bool operator==(const NetDims&) const = default;
};

/// All weights of the attention Bi-LSTM network stored as one flat vector
/// with named block views. Gate rows are ordered [input, forget, candidate,
/// output]. The same parameter set serves the Q-network, its target copy and
/// the oracle classifier.
class QNetworkParams {
public:
    explicit QNetworkParams(NetDims dims);

    /// Uniform init in +/- 1/sqrt(fan_in) per weight block, zero biases with
    /// forget-gate bias +1. Deterministic per seed.
    static QNetworkParams random_init(NetDims dims, std::uint64_t seed);

    const NetDims& dims() const { return dims_; }
    Eigen::VectorXd& flat() { return flat_; }
    const Eigen::VectorXd& flat() const { return flat_; }
    Eigen::Index size() const { return flat_.size(); }

    void set_zero() { flat_.setZero(); }

    using MatView = Eigen::Map<Eigen::MatrixXd>;
    using VecView = Eigen::Map<Eigen::VectorXd>;
    using ConstMatView = Eigen::Map<const Eigen::MatrixXd>;
    using ConstVecView = Eigen::Map<const Eigen::VectorXd>;

    // Forward-direction LSTM.
    MatView wx_f();
    MatView wh_f();
    VecView b_f();
    // Backward-direction LSTM.
    MatView wx_b();
    MatView wh_b();
    VecView b_b();
    // Additive attention: score_t = attn_v . tanh(attn_w * h_t).
    MatView attn_w();
    VecView attn_v();
    // Dense output head over the attention context.
    MatView out_w();
    VecView out_b();

    ConstMatView wx_f() const;
    ConstMatView wh_f() const;
    ConstVecView b_f() const;
    ConstMatView wx_b() const;
    ConstMatView wh_b() const;
    ConstVecView b_b() const;
    ConstMatView attn_w() const;
    ConstVecView attn_v() const;
    ConstMatView out_w() const;
    ConstVecView out_b() const;

    static Eigen::Index param_count(NetDims dims);

private:
    NetDims dims_;
    Eigen::VectorXd flat_;
};

/// Every intermediate of one forward pass, kept for exact backpropagation.
/// Buffers are reused across calls; `length` marks the valid prefix.
struct ForwardTrace {
    int length = 0;
    NetDims dims;
    const EpisodeState* state = nullptr;

    // Per direction: activated gates (4H x T), cell states, tanh(cell),
    // hidden states (H x T).
    Eigen::MatrixXd gates_f, cells_f, tanhc_f, h_f;
    Eigen::MatrixXd gates_b, cells_b, tanhc_b, h_b;
    Eigen::MatrixXd h_cat;    // 2H x T
    Eigen::MatrixXd attn_u;   // Hc x T, tanh(attn_w * h_t)
    Eigen::VectorXd attn_a;   // T, softmax weights over the valid prefix
    Eigen::VectorXd context;  // 2H
    Eigen::Vector2d q;        // q[0] = normal action, q[1] = anomaly action

    // Scratch for forward/backward steps.
    Eigen::VectorXd z4, dz4, dh_step, dc_step, dh_carry, dc_carry, dpre, dcontext;
    Eigen::MatrixXd d_hcat;  // 2H x T
    Eigen::VectorXd de;      // softmax backward buffer, per valid step
};

/// Q-values for a state: q[0] for the normal action, q[1] for the anomaly
/// action. Attention weights are nonnegative, sum to 1 over the true length
/// and are zero on padding.
void forward(const QNetworkParams& params, const EpisodeState& state, ForwardTrace& trace);

Eigen::Vector2d forward_q(const QNetworkParams& params, const EpisodeState& state);

/// Exact reverse-mode gradients for the upstream gradient `dq`, accumulated
/// into `grads` (callers zero it first when starting a batch). The trace must
/// come from a forward call against the same parameter values, and the state
/// passed to that forward call must still be alive: the trace refers to its
/// event vectors rather than copying them.
void backward(const QNetworkParams& params, const ForwardTrace& trace, const Eigen::Vector2d& dq,
              QNetworkParams& grads);

struct AdamState {
    Eigen::VectorXd m;
    Eigen::VectorXd v;
    std::int64_t step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    explicit AdamState(Eigen::Index n) : m(Eigen::VectorXd::Zero(n)), v(Eigen::VectorXd::Zero(n)) {}
};

/// Bias-corrected Adam update applied in place. Non-finite gradients raise
/// rather than corrupt the parameters.
void adam_step(QNetworkParams& params, const QNetworkParams& grads, AdamState& state, double lr);

/// exp(q1) / (exp(q0) + exp(q1)), computed with max-subtraction.
double softmax_binary(const Eigen::Vector2d& q);

enum class ModelKind : std::uint32_t { Agent = 0, Oracle = 1 };

/// Versioned binary checkpoint: header (format version, kind, dims, seed)
/// followed by the flat parameter vector as little-endian 64-bit floats.
void save_checkpoint(const std::string& path, const QNetworkParams& params, ModelKind kind,
                     std::uint64_t seed);

struct Checkpoint {
    QNetworkParams params;
    ModelKind kind = ModelKind::Agent;
    std::uint64_t seed = 0;
};

Checkpoint load_checkpoint(const std::string& path);

}  // namespace logdqn
