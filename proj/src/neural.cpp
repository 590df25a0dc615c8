#include "logdqn/neural.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <vector>

#include "logdqn/errors.hpp"
#include "logdqn/rng.hpp"

namespace logdqn {

namespace {

struct Layout {
    Eigen::Index wx_f, wh_f, b_f;
    Eigen::Index wx_b, wh_b, b_b;
    Eigen::Index attn_w, attn_v;
    Eigen::Index out_w, out_b;
    Eigen::Index total;
};

Layout layout_of(const NetDims& d) {
    const Eigen::Index in = d.input;
    const Eigen::Index h = d.hidden;
    const Eigen::Index hc = d.context;
    Layout l{};
    Eigen::Index off = 0;
    l.wx_f = off;
    off += 4 * h * in;
    l.wh_f = off;
    off += 4 * h * h;
    l.b_f = off;
    off += 4 * h;
    l.wx_b = off;
    off += 4 * h * in;
    l.wh_b = off;
    off += 4 * h * h;
    l.b_b = off;
    off += 4 * h;
    l.attn_w = off;
    off += hc * 2 * h;
    l.attn_v = off;
    off += hc;
    l.out_w = off;
    off += 2 * 2 * h;
    l.out_b = off;
    off += 2;
    l.total = off;
    return l;
}

void validate_dims(const NetDims& d) {
    if (d.input < 1 || d.hidden < 1 || d.context < 1) {
        throw ConfigError("network dims must be positive, got input=" + std::to_string(d.input) +
                          " hidden=" + std::to_string(d.hidden) +
                          " context=" + std::to_string(d.context));
    }
}

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

QNetworkParams::QNetworkParams(NetDims dims) : dims_(dims) {
    validate_dims(dims_);
    flat_ = Eigen::VectorXd::Zero(layout_of(dims_).total);
}

Eigen::Index QNetworkParams::param_count(NetDims dims) {
    validate_dims(dims);
    return layout_of(dims).total;
}

#define LOGDQN_MAT_VIEW(name, rows, cols)                                                 \
    QNetworkParams::MatView QNetworkParams::name() {                                      \
        const Layout l = layout_of(dims_);                                                \
        return MatView(flat_.data() + l.name, (rows), (cols));                            \
    }                                                                                     \
    QNetworkParams::ConstMatView QNetworkParams::name() const {                           \
        const Layout l = layout_of(dims_);                                                \
        return ConstMatView(flat_.data() + l.name, (rows), (cols));                       \
    }

#define LOGDQN_VEC_VIEW(name, len)                                                        \
    QNetworkParams::VecView QNetworkParams::name() {                                      \
        const Layout l = layout_of(dims_);                                                \
        return VecView(flat_.data() + l.name, (len));                                     \
    }                                                                                     \
    QNetworkParams::ConstVecView QNetworkParams::name() const {                           \
        const Layout l = layout_of(dims_);                                                \
        return ConstVecView(flat_.data() + l.name, (len));                                \
    }

LOGDQN_MAT_VIEW(wx_f, 4 * dims_.hidden, dims_.input)
LOGDQN_MAT_VIEW(wh_f, 4 * dims_.hidden, dims_.hidden)
LOGDQN_VEC_VIEW(b_f, 4 * dims_.hidden)
LOGDQN_MAT_VIEW(wx_b, 4 * dims_.hidden, dims_.input)
LOGDQN_MAT_VIEW(wh_b, 4 * dims_.hidden, dims_.hidden)
LOGDQN_VEC_VIEW(b_b, 4 * dims_.hidden)
LOGDQN_MAT_VIEW(attn_w, dims_.context, 2 * dims_.hidden)
LOGDQN_VEC_VIEW(attn_v, dims_.context)
LOGDQN_MAT_VIEW(out_w, 2, 2 * dims_.hidden)
LOGDQN_VEC_VIEW(out_b, 2)

#undef LOGDQN_MAT_VIEW
#undef LOGDQN_VEC_VIEW

QNetworkParams QNetworkParams::random_init(NetDims dims, std::uint64_t seed) {
    QNetworkParams params(dims);
    Rng rng(seed);
    const Layout l = layout_of(dims);
    const int h = dims.hidden;

    auto fill = [&](Eigen::Index offset, Eigen::Index count, double fan_in) {
        const double bound = 1.0 / std::sqrt(fan_in);
        double* p = params.flat_.data() + offset;
        for (Eigen::Index i = 0; i < count; ++i) {
            p[i] = (2.0 * rng.uniform() - 1.0) * bound;
        }
    };
    fill(l.wx_f, 4 * h * dims.input, dims.input);
    fill(l.wh_f, Eigen::Index(4) * h * h, dims.hidden);
    fill(l.wx_b, 4 * h * dims.input, dims.input);
    fill(l.wh_b, Eigen::Index(4) * h * h, dims.hidden);
    fill(l.attn_w, Eigen::Index(dims.context) * 2 * h, 2.0 * h);
    fill(l.attn_v, dims.context, dims.context);
    fill(l.out_w, Eigen::Index(2) * 2 * h, 2.0 * h);

    // Biases stay zero except the forget gates, which start open so early
    // training does not wipe the cell state.
    params.b_f().segment(h, h).setOnes();
    params.b_b().segment(h, h).setOnes();
    return params;
}

namespace {

void ensure_trace(ForwardTrace& trace, const NetDims& dims, int t) {
    const int h = dims.hidden;
    const int hc = dims.context;
    const bool dims_changed = !(trace.dims == dims);
    const bool grow = dims_changed || trace.gates_f.cols() < t;
    if (grow) {
        const int cap = std::max<int>(t, dims_changed ? t : int(trace.gates_f.cols()));
        trace.gates_f.resize(4 * h, cap);
        trace.cells_f.resize(h, cap);
        trace.tanhc_f.resize(h, cap);
        trace.h_f.resize(h, cap);
        trace.gates_b.resize(4 * h, cap);
        trace.cells_b.resize(h, cap);
        trace.tanhc_b.resize(h, cap);
        trace.h_b.resize(h, cap);
        trace.h_cat.resize(2 * h, cap);
        trace.attn_u.resize(hc, cap);
        trace.attn_a.resize(cap);
        trace.d_hcat.resize(2 * h, cap);
        trace.de.resize(cap);
    }
    if (dims_changed || trace.z4.size() != 4 * h) {
        trace.z4.resize(4 * h);
        trace.dz4.resize(4 * h);
        trace.dh_step.resize(h);
        trace.dc_step.resize(h);
        trace.dh_carry.resize(h);
        trace.dc_carry.resize(h);
        trace.dpre.resize(hc);
        trace.dcontext.resize(2 * h);
        trace.context.resize(2 * h);
    }
    trace.dims = dims;
}

/// One LSTM sweep over columns [0, len) of `x`, walking `t` in the order
/// given by `step` (+1 forward, -1 backward). Gate rows are ordered
/// [input, forget, candidate, output].
void lstm_sweep(const QNetworkParams::ConstMatView& wx, const QNetworkParams::ConstMatView& wh,
                const QNetworkParams::ConstVecView& b, const Eigen::MatrixXd& x, int len, int step,
                Eigen::VectorXd& z4, Eigen::MatrixXd& gates, Eigen::MatrixXd& cells,
                Eigen::MatrixXd& tanhc, Eigen::MatrixXd& h) {
    const int hs = int(h.rows());
    const int start = step > 0 ? 0 : len - 1;
    for (int k = 0; k < len; ++k) {
        const int t = start + k * step;
        z4.noalias() = wx * x.col(t) + b;
        if (k > 0) {
            z4.noalias() += wh * h.col(t - step);
        }
        auto gi = gates.col(t).segment(0, hs);
        auto gf = gates.col(t).segment(hs, hs);
        auto gg = gates.col(t).segment(2 * hs, hs);
        auto go = gates.col(t).segment(3 * hs, hs);
        gi = z4.segment(0, hs).unaryExpr([](double z) { return sigmoid(z); });
        gf = z4.segment(hs, hs).unaryExpr([](double z) { return sigmoid(z); });
        gg = z4.segment(2 * hs, hs).array().tanh();
        go = z4.segment(3 * hs, hs).unaryExpr([](double z) { return sigmoid(z); });
        if (k > 0) {
            cells.col(t) = gf.cwiseProduct(cells.col(t - step)) + gi.cwiseProduct(gg);
        } else {
            cells.col(t) = gi.cwiseProduct(gg);
        }
        tanhc.col(t) = cells.col(t).array().tanh();
        h.col(t) = go.cwiseProduct(tanhc.col(t));
    }
}

/// Reverse-mode pass for one LSTM direction. `d_h_total` holds, per column,
/// the gradient arriving from the layers above; carries along the recurrent
/// links are added internally. Walks `t` opposite to the forward order.
template <typename Derived>
void lstm_backprop(const QNetworkParams::ConstMatView& wh, const Eigen::MatrixXd& x,
                   const Eigen::MatrixBase<Derived>& d_h_total, int len, int step,
                   const Eigen::MatrixXd& gates, const Eigen::MatrixXd& cells,
                   const Eigen::MatrixXd& tanhc, const Eigen::MatrixXd& h, ForwardTrace& tr,
                   QNetworkParams::MatView d_wx, QNetworkParams::MatView d_wh,
                   QNetworkParams::VecView d_b) {
    const int hs = int(h.rows());
    tr.dh_carry.setZero();
    tr.dc_carry.setZero();
    const int start = step > 0 ? len - 1 : 0;
    for (int k = 0; k < len; ++k) {
        const int t = start - k * step;
        const bool first_step = (step > 0) ? (t == 0) : (t == len - 1);
        auto gi = gates.col(t).segment(0, hs);
        auto gf = gates.col(t).segment(hs, hs);
        auto gg = gates.col(t).segment(2 * hs, hs);
        auto go = gates.col(t).segment(3 * hs, hs);

        tr.dh_step = d_h_total.col(t) + tr.dh_carry;
        // h = o * tanh(c): split into the output-gate and cell paths.
        tr.dc_step = tr.dc_carry;
        tr.dc_step.array() += tr.dh_step.array() * go.array() * (1.0 - tanhc.col(t).array().square());
        const auto d_o = tr.dh_step.cwiseProduct(tanhc.col(t));

        // c = f * c_prev + i * g, then back through each gate nonlinearity.
        tr.dz4.segment(0, hs).array() =
            tr.dc_step.array() * gg.array() * gi.array() * (1.0 - gi.array());
        if (first_step) {
            tr.dz4.segment(hs, hs).setZero();  // c_prev is zero, so df vanishes
        } else {
            tr.dz4.segment(hs, hs).array() = tr.dc_step.array() * cells.col(t - step).array() *
                                             gf.array() * (1.0 - gf.array());
        }
        tr.dz4.segment(2 * hs, hs).array() =
            tr.dc_step.array() * gi.array() * (1.0 - gg.array().square());
        tr.dz4.segment(3 * hs, hs).array() =
            d_o.array() * go.array() * (1.0 - go.array());

        d_wx.noalias() += tr.dz4 * x.col(t).transpose();
        d_b += tr.dz4;
        if (!first_step) {
            d_wh.noalias() += tr.dz4 * h.col(t - step).transpose();
            tr.dh_carry.noalias() = wh.transpose() * tr.dz4;
            tr.dc_carry = tr.dc_step.cwiseProduct(gf);
        }
    }
}

}  // namespace

void forward(const QNetworkParams& params, const EpisodeState& state, ForwardTrace& trace) {
    const NetDims& dims = params.dims();
    if (state.vectors.rows() != dims.input) {
        throw ContractViolation("state dimension " + std::to_string(state.vectors.rows()) +
                                " does not match network input " + std::to_string(dims.input));
    }
    if (state.length < 1) {
        throw ContractViolation("cannot run the network on an empty state");
    }
    const int len = state.length;
    ensure_trace(trace, dims, len);
    trace.length = len;
    trace.state = &state;

    lstm_sweep(params.wx_f(), params.wh_f(), params.b_f(), state.vectors, len, +1, trace.z4,
               trace.gates_f, trace.cells_f, trace.tanhc_f, trace.h_f);
    lstm_sweep(params.wx_b(), params.wh_b(), params.b_b(), state.vectors, len, -1, trace.z4,
               trace.gates_b, trace.cells_b, trace.tanhc_b, trace.h_b);

    const int h = dims.hidden;
    trace.h_cat.topLeftCorner(h, len) = trace.h_f.leftCols(len);
    trace.h_cat.block(h, 0, h, len) = trace.h_b.leftCols(len);

    // Additive attention: e_t = v . tanh(W h_t), weights via stable softmax.
    trace.attn_u.leftCols(len).noalias() = params.attn_w() * trace.h_cat.leftCols(len);
    trace.attn_u.leftCols(len) = trace.attn_u.leftCols(len).array().tanh();
    trace.attn_a.head(len).noalias() = trace.attn_u.leftCols(len).transpose() * params.attn_v();
    const double e_max = trace.attn_a.head(len).maxCoeff();
    trace.attn_a.head(len) = (trace.attn_a.head(len).array() - e_max).exp();
    trace.attn_a.head(len) /= trace.attn_a.head(len).sum();

    trace.context.noalias() = trace.h_cat.leftCols(len) * trace.attn_a.head(len);
    trace.q.noalias() = params.out_w() * trace.context + params.out_b();
}

Eigen::Vector2d forward_q(const QNetworkParams& params, const EpisodeState& state) {
    ForwardTrace trace;
    forward(params, state, trace);
    return trace.q;
}

void backward(const QNetworkParams& params, const ForwardTrace& trace_in, const Eigen::Vector2d& dq,
              QNetworkParams& grads) {
    if (trace_in.state == nullptr || trace_in.length < 1) {
        throw ContractViolation("backward called without a preceding forward");
    }
    if (!(grads.dims() == params.dims()) || !(trace_in.dims == params.dims())) {
        throw ContractViolation("parameter, gradient and trace dims must agree");
    }
    // The trace doubles as scratch space; the recorded activations stay intact.
    ForwardTrace& tr = const_cast<ForwardTrace&>(trace_in);
    const int len = tr.length;
    const int h = params.dims().hidden;
    const Eigen::MatrixXd& x = tr.state->vectors;

    // Dense head.
    grads.out_b() += dq;
    grads.out_w().noalias() += dq * tr.context.transpose();
    tr.dcontext.noalias() = params.out_w().transpose() * dq;  // 2H

    // context = sum_t a_t h_t.
    tr.d_hcat.leftCols(len).noalias() = tr.dcontext * tr.attn_a.head(len).transpose();
    tr.de.head(len).noalias() = tr.h_cat.leftCols(len).transpose() * tr.dcontext;  // da

    // Softmax jacobian: de = a * (da - a.da).
    const double a_dot_da = tr.attn_a.head(len).dot(tr.de.head(len));
    tr.de.head(len) = tr.attn_a.head(len).array() * (tr.de.head(len).array() - a_dot_da);

    // Attention scores e_t = v . tanh(W h_t).
    auto g_attn_v = grads.attn_v();
    auto g_attn_w = grads.attn_w();
    const auto p_attn_v = params.attn_v();
    const auto p_attn_w = params.attn_w();
    for (int t = 0; t < len; ++t) {
        g_attn_v.noalias() += tr.de(t) * tr.attn_u.col(t);
        tr.dpre = (tr.de(t) * p_attn_v.array() * (1.0 - tr.attn_u.col(t).array().square())).matrix();
        g_attn_w.noalias() += tr.dpre * tr.h_cat.col(t).transpose();
        tr.d_hcat.col(t).noalias() += p_attn_w.transpose() * tr.dpre;
    }

    lstm_backprop(params.wh_f(), x, tr.d_hcat.topRows(h), len, +1, tr.gates_f, tr.cells_f,
                  tr.tanhc_f, tr.h_f, tr, grads.wx_f(), grads.wh_f(), grads.b_f());
    lstm_backprop(params.wh_b(), x, tr.d_hcat.bottomRows(h), len, -1, tr.gates_b, tr.cells_b,
                  tr.tanhc_b, tr.h_b, tr, grads.wx_b(), grads.wh_b(), grads.b_b());
}

void adam_step(QNetworkParams& params, const QNetworkParams& grads, AdamState& state, double lr) {
    if (!(grads.dims() == params.dims()) || state.m.size() != params.size()) {
        throw ContractViolation("adam state does not match the parameter shape");
    }
    if (!grads.flat().allFinite()) {
        throw NumericError("non-finite gradient in optimizer step " +
                           std::to_string(state.step + 1));
    }
    state.step += 1;
    const auto g = grads.flat().array();
    state.m.array() = state.beta1 * state.m.array() + (1.0 - state.beta1) * g;
    state.v.array() = state.beta2 * state.v.array() + (1.0 - state.beta2) * g.square();
    const double bc1 = 1.0 - std::pow(state.beta1, double(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, double(state.step));
    params.flat().array() -=
        lr * (state.m.array() / bc1) / ((state.v.array() / bc2).sqrt() + state.epsilon);
}

double softmax_binary(const Eigen::Vector2d& q) {
    const double m = std::max(q[0], q[1]);
    const double e0 = std::exp(q[0] - m);
    const double e1 = std::exp(q[1] - m);
    return e1 / (e0 + e1);
}

namespace {

constexpr char kMagic[4] = {'L', 'D', 'Q', 'N'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = (unsigned char)((v >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = (unsigned char)((v >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32(std::istream& is, const std::string& path) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4)) {
        throw ParseError("truncated checkpoint: " + path);
    }
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(b[i]) << (8 * i);
    return v;
}

std::uint64_t get_u64(std::istream& is, const std::string& path) {
    unsigned char b[8];
    if (!is.read(reinterpret_cast<char*>(b), 8)) {
        throw ParseError("truncated checkpoint: " + path);
    }
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(b[i]) << (8 * i);
    return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const QNetworkParams& params, ModelKind kind,
                     std::uint64_t seed) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) {
        throw IoError("cannot open checkpoint for writing: " + path);
    }
    os.write(kMagic, 4);
    put_u32(os, kVersion);
    put_u32(os, static_cast<std::uint32_t>(kind));
    put_u32(os, std::uint32_t(params.dims().input));
    put_u32(os, std::uint32_t(params.dims().hidden));
    put_u32(os, std::uint32_t(params.dims().context));
    put_u64(os, seed);
    put_u64(os, std::uint64_t(params.size()));
    for (Eigen::Index i = 0; i < params.size(); ++i) {
        std::uint64_t bits;
        const double v = params.flat()[i];
        std::memcpy(&bits, &v, sizeof bits);
        put_u64(os, bits);
    }
    os.flush();
    if (!os) {
        throw IoError("short write while saving checkpoint: " + path);
    }
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw IoError("cannot open checkpoint: " + path);
    }
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
        throw ParseError("not a checkpoint file: " + path);
    }
    const std::uint32_t version = get_u32(is, path);
    if (version != kVersion) {
        throw ParseError("unsupported checkpoint version " + std::to_string(version) + ": " + path);
    }
    const std::uint32_t kind_raw = get_u32(is, path);
    if (kind_raw > 1) {
        throw ParseError("unknown model kind " + std::to_string(kind_raw) + ": " + path);
    }
    NetDims dims;
    dims.input = int(get_u32(is, path));
    dims.hidden = int(get_u32(is, path));
    dims.context = int(get_u32(is, path));
    if (dims.input < 1 || dims.hidden < 1 || dims.context < 1) {
        throw ParseError("corrupt checkpoint dims: " + path);
    }
    const std::uint64_t seed = get_u64(is, path);
    const std::uint64_t count = get_u64(is, path);
    if (count != std::uint64_t(QNetworkParams::param_count(dims))) {
        throw ParseError("checkpoint parameter count " + std::to_string(count) +
                         " does not match dims: " + path);
    }
    Checkpoint ckpt{QNetworkParams(dims), static_cast<ModelKind>(kind_raw), seed};
    for (std::uint64_t i = 0; i < count; ++i) {
        const std::uint64_t bits = get_u64(is, path);
        double v;
        std::memcpy(&v, &bits, sizeof v);
        ckpt.params.flat()[Eigen::Index(i)] = v;
    }
    return ckpt;
}

}  // namespace logdqn
