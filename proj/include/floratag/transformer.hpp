// SPDX-License-Identifier: Apache-2.0
#pragma once

// Compact pre-LN transformer encoder for token classification,
// implemented on Eigen in double precision. One sentence at a time
// (no padding, no masks); a training batch accumulates gradients over
// its sentences before the optimizer step. Everything is seeded and
// single-threaded, so runs are bit-reproducible.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "floratag/errors.hpp"
#include "floratag/rng.hpp"

namespace floratag::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Parameter {
    std::string name;
    Matrix value;
    Matrix grad;
    Matrix adam_m;
    Matrix adam_v;

    void init_zero(std::string n, Eigen::Index rows, Eigen::Index cols) {
        name = std::move(n);
        value = Matrix::Zero(rows, cols);
        reset_grad();
    }

    void init_normal(std::string n, Eigen::Index rows, Eigen::Index cols, Rng& rng,
                     double stddev = 0.02) {
        name = std::move(n);
        value.resize(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r) {
            for (Eigen::Index c = 0; c < cols; ++c) value(r, c) = rng.normal(0.0, stddev);
        }
        reset_grad();
    }

    void init_const(std::string n, Eigen::Index rows, Eigen::Index cols, double v) {
        name = std::move(n);
        value = Matrix::Constant(rows, cols, v);
        reset_grad();
    }

    void reset_grad() { grad = Matrix::Zero(value.rows(), value.cols()); }
};

struct ModelConfig {
    std::size_t vocab_size = 0;
    std::size_t hidden = 64;
    std::size_t layers = 2;
    std::size_t heads = 4;
    std::size_t ffn = 128;
    std::size_t max_position = 128;
    bool lowercase = true;

    void validate() const {
        if (vocab_size < 5) throw UsageError("model config: vocab_size too small");
        if (hidden == 0 || heads == 0 || hidden % heads != 0) {
            throw UsageError("model config: hidden must be a positive multiple of heads");
        }
        if (layers == 0 || ffn == 0 || max_position == 0) {
            throw UsageError("model config: layers, ffn and max_position must be positive");
        }
    }
};

namespace ops {

inline constexpr double kLnEps = 1e-5;

struct LayerNormCache {
    Matrix normalized; // (x - mean) / std, per row
    Vector inv_std;
};

inline Matrix layer_norm(const Matrix& x, const Parameter& gain, const Parameter& bias,
                         LayerNormCache& cache) {
    const auto rows = x.rows();
    const auto cols = x.cols();
    cache.normalized.resize(rows, cols);
    cache.inv_std.resize(rows);
    Matrix out(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const double mean = x.row(r).mean();
        const double var = (x.row(r).array() - mean).square().mean();
        const double inv_std = 1.0 / std::sqrt(var + kLnEps);
        cache.inv_std(r) = inv_std;
        cache.normalized.row(r) = (x.row(r).array() - mean) * inv_std;
        out.row(r) = cache.normalized.row(r).cwiseProduct(gain.value.row(0)) + bias.value.row(0);
    }
    return out;
}

inline Matrix layer_norm_backward(const Matrix& d_out, const LayerNormCache& cache,
                                  Parameter& gain, Parameter& bias) {
    const auto rows = d_out.rows();
    const auto cols = d_out.cols();
    Matrix dx(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto xhat = cache.normalized.row(r);
        const Eigen::RowVectorXd dy_g = d_out.row(r).cwiseProduct(gain.value.row(0));
        const double mean_dy = dy_g.mean();
        const double mean_dy_xhat = dy_g.cwiseProduct(xhat).mean();
        dx.row(r) = (dy_g.array() - mean_dy - xhat.array() * mean_dy_xhat) * cache.inv_std(r);
        gain.grad.row(0) += d_out.row(r).cwiseProduct(xhat);
        bias.grad.row(0) += d_out.row(r);
    }
    return dx;
}

inline double gelu_scalar(double x) { return 0.5 * x * (1.0 + std::erf(x / std::sqrt(2.0))); }

inline double gelu_grad_scalar(double x) {
    static const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    static const double inv_sqrt2pi = 1.0 / std::sqrt(2.0 * 3.14159265358979323846);
    return 0.5 * (1.0 + std::erf(x * inv_sqrt2)) + x * inv_sqrt2pi * std::exp(-0.5 * x * x);
}

inline Matrix gelu(const Matrix& x) { return x.unaryExpr([](double v) { return gelu_scalar(v); }); }

inline Matrix gelu_backward(const Matrix& d_out, const Matrix& x_pre) {
    return d_out.cwiseProduct(x_pre.unaryExpr([](double v) { return gelu_grad_scalar(v); }));
}

inline Matrix linear(const Matrix& x, const Parameter& w, const Parameter& b) {
    return (x * w.value).rowwise() + b.value.row(0);
}

inline Matrix linear_backward(const Matrix& d_out, const Matrix& x, Parameter& w, Parameter& b) {
    w.grad += x.transpose() * d_out;
    b.grad.row(0) += d_out.colwise().sum();
    return d_out * w.value.transpose();
}

inline Matrix softmax_rows(const Matrix& scores) {
    Matrix out(scores.rows(), scores.cols());
    for (Eigen::Index r = 0; r < scores.rows(); ++r) {
        const double m = scores.row(r).maxCoeff();
        Eigen::RowVectorXd e = (scores.row(r).array() - m).exp();
        out.row(r) = e / e.sum();
    }
    return out;
}

inline Matrix softmax_rows_backward(const Matrix& d_probs, const Matrix& probs) {
    Matrix d_scores(probs.rows(), probs.cols());
    for (Eigen::Index r = 0; r < probs.rows(); ++r) {
        const double dot = d_probs.row(r).dot(probs.row(r));
        d_scores.row(r) = probs.row(r).cwiseProduct(d_probs.row(r).array() - dot);
    }
    return d_scores;
}

} // namespace ops

struct LayerParams {
    Parameter ln1_gain, ln1_bias;
    Parameter wq, bq, wk, bk, wv, bv, wo, bo;
    Parameter ln2_gain, ln2_bias;
    Parameter w1, b1, w2, b2;
};

struct LayerCache {
    Matrix x_in;             // layer input
    ops::LayerNormCache ln1;
    Matrix attn_in;          // ln1 output
    Matrix q, k, v;
    std::vector<Matrix> head_probs;
    Matrix attn_concat;      // concatenated head outputs
    Matrix x_mid;            // after attention residual
    ops::LayerNormCache ln2;
    Matrix ffn_in;           // ln2 output
    Matrix ffn_pre;          // before gelu
    Matrix ffn_act;          // after gelu
};

struct EncoderCache {
    std::vector<int> ids;
    std::vector<LayerCache> layers;
    Matrix x_last;
    ops::LayerNormCache lnf;
};

class Encoder {
public:
    Encoder() = default;

    Encoder(ModelConfig config, Rng& rng) : config_(config) {
        config_.validate();
        const auto h = static_cast<Eigen::Index>(config_.hidden);
        const auto f = static_cast<Eigen::Index>(config_.ffn);
        tok_embed_.init_normal("tok_embed", static_cast<Eigen::Index>(config_.vocab_size), h, rng);
        pos_embed_.init_normal("pos_embed", static_cast<Eigen::Index>(config_.max_position), h, rng);
        layers_.resize(config_.layers);
        for (std::size_t l = 0; l < config_.layers; ++l) {
            auto& p = layers_[l];
            const std::string prefix = "layer" + std::to_string(l) + ".";
            p.ln1_gain.init_const(prefix + "ln1_gain", 1, h, 1.0);
            p.ln1_bias.init_zero(prefix + "ln1_bias", 1, h);
            p.wq.init_normal(prefix + "wq", h, h, rng);
            p.bq.init_zero(prefix + "bq", 1, h);
            p.wk.init_normal(prefix + "wk", h, h, rng);
            p.bk.init_zero(prefix + "bk", 1, h);
            p.wv.init_normal(prefix + "wv", h, h, rng);
            p.bv.init_zero(prefix + "bv", 1, h);
            p.wo.init_normal(prefix + "wo", h, h, rng);
            p.bo.init_zero(prefix + "bo", 1, h);
            p.ln2_gain.init_const(prefix + "ln2_gain", 1, h, 1.0);
            p.ln2_bias.init_zero(prefix + "ln2_bias", 1, h);
            p.w1.init_normal(prefix + "w1", h, f, rng);
            p.b1.init_zero(prefix + "b1", 1, f);
            p.w2.init_normal(prefix + "w2", f, h, rng);
            p.b2.init_zero(prefix + "b2", 1, h);
        }
        lnf_gain_.init_const("lnf_gain", 1, h, 1.0);
        lnf_bias_.init_zero("lnf_bias", 1, h);
    }

    const ModelConfig& config() const { return config_; }

    // Hidden states for one sentence of subword ids (length <= max_position).
    Matrix forward(const std::vector<int>& ids, EncoderCache& cache) const {
        if (ids.empty()) throw UsageError("encoder: empty id sequence");
        if (ids.size() > config_.max_position) {
            throw UsageError("encoder: sequence length " + std::to_string(ids.size()) +
                             " exceeds max position " + std::to_string(config_.max_position));
        }
        const auto len = static_cast<Eigen::Index>(ids.size());
        const auto h = static_cast<Eigen::Index>(config_.hidden);
        cache.ids = ids;
        Matrix x(len, h);
        for (Eigen::Index t = 0; t < len; ++t) {
            x.row(t) = tok_embed_.value.row(ids[static_cast<std::size_t>(t)]) +
                       pos_embed_.value.row(t);
        }
        cache.layers.assign(config_.layers, LayerCache{});
        for (std::size_t l = 0; l < config_.layers; ++l) {
            x = forward_layer(layers_[l], x, cache.layers[l]);
        }
        cache.x_last = x;
        return ops::layer_norm(x, lnf_gain_, lnf_bias_, cache.lnf);
    }

    // Accumulates parameter gradients; returns nothing (inputs are ids).
    void backward(const EncoderCache& cache, const Matrix& d_hidden) {
        Matrix dx = ops::layer_norm_backward(d_hidden, cache.lnf, lnf_gain_, lnf_bias_);
        for (std::size_t l = config_.layers; l-- > 0;) {
            dx = backward_layer(layers_[l], cache.layers[l], dx);
        }
        for (Eigen::Index t = 0; t < dx.rows(); ++t) {
            tok_embed_.grad.row(cache.ids[static_cast<std::size_t>(t)]) += dx.row(t);
            pos_embed_.grad.row(t) += dx.row(t);
        }
    }

    std::vector<Parameter*> parameters() {
        std::vector<Parameter*> out = {&tok_embed_, &pos_embed_};
        for (auto& p : layers_) {
            for (Parameter* q : {&p.ln1_gain, &p.ln1_bias, &p.wq, &p.bq, &p.wk, &p.bk, &p.wv,
                                 &p.bv, &p.wo, &p.bo, &p.ln2_gain, &p.ln2_bias, &p.w1, &p.b1,
                                 &p.w2, &p.b2}) {
                out.push_back(q);
            }
        }
        out.push_back(&lnf_gain_);
        out.push_back(&lnf_bias_);
        return out;
    }

private:
    Matrix forward_layer(const LayerParams& p, const Matrix& x, LayerCache& cache) const {
        const auto len = x.rows();
        const auto h = static_cast<Eigen::Index>(config_.hidden);
        const auto n_heads = static_cast<Eigen::Index>(config_.heads);
        const auto dh = h / n_heads;
        const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

        cache.x_in = x;
        cache.attn_in = ops::layer_norm(x, p.ln1_gain, p.ln1_bias, cache.ln1);
        cache.q = ops::linear(cache.attn_in, p.wq, p.bq);
        cache.k = ops::linear(cache.attn_in, p.wk, p.bk);
        cache.v = ops::linear(cache.attn_in, p.wv, p.bv);
        cache.head_probs.assign(static_cast<std::size_t>(n_heads), Matrix());
        cache.attn_concat.resize(len, h);
        for (Eigen::Index head = 0; head < n_heads; ++head) {
            const auto qh = cache.q.middleCols(head * dh, dh);
            const auto kh = cache.k.middleCols(head * dh, dh);
            const auto vh = cache.v.middleCols(head * dh, dh);
            const Matrix scores = qh * kh.transpose() * scale;
            Matrix probs = ops::softmax_rows(scores);
            cache.attn_concat.middleCols(head * dh, dh) = probs * vh;
            cache.head_probs[static_cast<std::size_t>(head)] = std::move(probs);
        }
        const Matrix attn_out = ops::linear(cache.attn_concat, p.wo, p.bo);
        cache.x_mid = x + attn_out;

        cache.ffn_in = ops::layer_norm(cache.x_mid, p.ln2_gain, p.ln2_bias, cache.ln2);
        cache.ffn_pre = ops::linear(cache.ffn_in, p.w1, p.b1);
        cache.ffn_act = ops::gelu(cache.ffn_pre);
        const Matrix ffn_out = ops::linear(cache.ffn_act, p.w2, p.b2);
        return cache.x_mid + ffn_out;
    }

    Matrix backward_layer(LayerParams& p, const LayerCache& cache, const Matrix& d_out) {
        const auto h = static_cast<Eigen::Index>(config_.hidden);
        const auto n_heads = static_cast<Eigen::Index>(config_.heads);
        const auto dh = h / n_heads;
        const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

        // FFN block: x_out = x_mid + linear(gelu(linear(ln2(x_mid))))
        Matrix d_ffn_act = ops::linear_backward(d_out, cache.ffn_act, p.w2, p.b2);
        Matrix d_ffn_pre = ops::gelu_backward(d_ffn_act, cache.ffn_pre);
        Matrix d_ffn_in = ops::linear_backward(d_ffn_pre, cache.ffn_in, p.w1, p.b1);
        Matrix d_x_mid =
            d_out + ops::layer_norm_backward(d_ffn_in, cache.ln2, p.ln2_gain, p.ln2_bias);

        // attention block: x_mid = x_in + linear(concat_heads)
        Matrix d_concat = ops::linear_backward(d_x_mid, cache.attn_concat, p.wo, p.bo);
        Matrix dq = Matrix::Zero(d_out.rows(), h);
        Matrix dk = Matrix::Zero(d_out.rows(), h);
        Matrix dv = Matrix::Zero(d_out.rows(), h);
        for (Eigen::Index head = 0; head < n_heads; ++head) {
            const auto qh = cache.q.middleCols(head * dh, dh);
            const auto kh = cache.k.middleCols(head * dh, dh);
            const auto vh = cache.v.middleCols(head * dh, dh);
            const auto& probs = cache.head_probs[static_cast<std::size_t>(head)];
            const auto d_head = d_concat.middleCols(head * dh, dh);
            const Matrix d_probs = d_head * vh.transpose();
            dv.middleCols(head * dh, dh) = probs.transpose() * d_head;
            const Matrix d_scores = ops::softmax_rows_backward(d_probs, probs);
            dq.middleCols(head * dh, dh) = d_scores * kh * scale;
            dk.middleCols(head * dh, dh) = d_scores.transpose() * qh * scale;
        }
        Matrix d_attn_in = ops::linear_backward(dq, cache.attn_in, p.wq, p.bq);
        d_attn_in += ops::linear_backward(dk, cache.attn_in, p.wk, p.bk);
        d_attn_in += ops::linear_backward(dv, cache.attn_in, p.wv, p.bv);
        return d_x_mid + ops::layer_norm_backward(d_attn_in, cache.ln1, p.ln1_gain, p.ln1_bias);
    }

    ModelConfig config_;
    Parameter tok_embed_;
    Parameter pos_embed_;
    std::vector<LayerParams> layers_;
    Parameter lnf_gain_;
    Parameter lnf_bias_;
};

// Linear projection head (classifier or LM head).
struct LinearHead {
    Parameter w;
    Parameter b;

    LinearHead() = default;

    LinearHead(const std::string& name, std::size_t in_dim, std::size_t out_dim, Rng& rng) {
        w.init_normal(name + ".w", static_cast<Eigen::Index>(in_dim),
                      static_cast<Eigen::Index>(out_dim), rng);
        b.init_zero(name + ".b", 1, static_cast<Eigen::Index>(out_dim));
    }

    Matrix forward(const Matrix& hidden) const { return ops::linear(hidden, w, b); }

    Matrix backward(const Matrix& d_logits, const Matrix& hidden) {
        return ops::linear_backward(d_logits, hidden, w, b);
    }

    std::vector<Parameter*> parameters() { return {&w, &b}; }
};

// Mean cross entropy over the labeled rows (label >= 0); rows labeled
// kIgnore contribute nothing. d_logits is scaled by 1/n_labeled.
struct CrossEntropyResult {
    double loss_sum = 0.0;       // summed over labeled rows
    std::size_t n_labeled = 0;
    Matrix d_logits;             // gradient of the summed loss
};

inline CrossEntropyResult softmax_cross_entropy(const Matrix& logits,
                                                const std::vector<int>& labels) {
    if (static_cast<std::size_t>(logits.rows()) != labels.size()) {
        throw UsageError("cross entropy: " + std::to_string(logits.rows()) + " rows vs " +
                         std::to_string(labels.size()) + " labels");
    }
    CrossEntropyResult out;
    out.d_logits = Matrix::Zero(logits.rows(), logits.cols());
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
        const int label = labels[static_cast<std::size_t>(r)];
        if (label < 0) continue;
        const double m = logits.row(r).maxCoeff();
        const Eigen::RowVectorXd e = (logits.row(r).array() - m).exp();
        const double z = e.sum();
        const Eigen::RowVectorXd probs = e / z;
        out.loss_sum += -std::log(std::max(probs(label), 1e-300));
        out.d_logits.row(r) = probs;
        out.d_logits(r, label) -= 1.0;
        ++out.n_labeled;
    }
    return out;
}

class AdamOptimizer {
public:
    AdamOptimizer(std::vector<Parameter*> params, double lr, double beta1 = 0.9,
                  double beta2 = 0.999, double eps = 1e-8, double clip_norm = 1.0)
        : params_(std::move(params)), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps),
          clip_norm_(clip_norm) {
        for (auto* p : params_) {
            p->adam_m = Matrix::Zero(p->value.rows(), p->value.cols());
            p->adam_v = Matrix::Zero(p->value.rows(), p->value.cols());
        }
    }

    // Applies one update from the accumulated gradients, then clears them.
    void step() {
        ++t_;
        if (clip_norm_ > 0.0) {
            double sq = 0.0;
            for (auto* p : params_) sq += p->grad.squaredNorm();
            const double norm = std::sqrt(sq);
            if (norm > clip_norm_) {
                const double factor = clip_norm_ / norm;
                for (auto* p : params_) p->grad *= factor;
            }
        }
        const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
        const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
        for (auto* p : params_) {
            p->adam_m = beta1_ * p->adam_m + (1.0 - beta1_) * p->grad;
            p->adam_v = beta2_ * p->adam_v + (1.0 - beta2_) * p->grad.cwiseProduct(p->grad);
            const Matrix m_hat = p->adam_m / bc1;
            const Matrix v_hat = p->adam_v / bc2;
            p->value -= lr_ * (m_hat.array() / (v_hat.array().sqrt() + eps_)).matrix();
            p->reset_grad();
        }
    }

    double learning_rate() const { return lr_; }

private:
    std::vector<Parameter*> params_;
    double lr_;
    double beta1_;
    double beta2_;
    double eps_;
    double clip_norm_;
    std::uint64_t t_ = 0;
};

} // namespace floratag::nn
