#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>
#include <vector>

namespace evade {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Activation { Identity, ReLU, Tanh };

namespace detail {

inline Matrix apply_activation(Activation a, const Matrix& z) {
    switch (a) {
        case Activation::Identity: return z;
        case Activation::ReLU: return z.cwiseMax(0.0);
        case Activation::Tanh: return z.array().tanh().matrix();
    }
    throw std::logic_error("unknown activation");
}

/// Derivative expressed through pre-activation z and output y = act(z).
inline Matrix activation_grad(Activation a, const Matrix& z, const Matrix& y, const Matrix& up) {
    switch (a) {
        case Activation::Identity: return up;
        case Activation::ReLU: return (z.array() > 0.0).cast<double>().matrix().cwiseProduct(up);
        case Activation::Tanh: return (1.0 - y.array().square()).matrix().cwiseProduct(up);
    }
    throw std::logic_error("unknown activation");
}

inline void write_f64(std::ostream& os, double v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

inline double read_f64(std::istream& is) {
    double v = 0.0;
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!is) throw std::runtime_error("truncated network data");
    return v;
}

inline void write_u64(std::ostream& os, std::uint64_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

inline std::uint64_t read_u64(std::istream& is) {
    std::uint64_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!is) throw std::runtime_error("truncated network data");
    return v;
}

} // namespace detail

struct LinearLayer {
    Matrix w; // rows = outputs, cols = inputs
    Vector b;
    Matrix grad_w;
    Vector grad_b;
    Matrix adam_m_w, adam_v_w;
    Vector adam_m_b, adam_v_b;
};

struct AdamConfig {
    double lr = 3e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Fully connected network with one activation on hidden layers and one on
/// the output layer. Batches are stored column-wise. backward() must follow a
/// forward_cached() on the same object and accumulates into the layer grads.
class Mlp {
public:
    Mlp() = default;

    Mlp(const std::vector<int>& sizes, Activation hidden, Activation output, std::mt19937_64& rng)
        : hidden_(hidden), output_(output) {
        if (sizes.size() < 2) throw std::invalid_argument("network needs at least one layer");
        sizes_ = sizes;
        for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
            const int in = sizes[i];
            const int out = sizes[i + 1];
            if (in <= 0 || out <= 0) throw std::invalid_argument("layer sizes must be positive");
            LinearLayer layer;
            const double bound = 1.0 / std::sqrt(static_cast<double>(in));
            std::uniform_real_distribution<double> dist(-bound, bound);
            layer.w = Matrix::NullaryExpr(out, in, [&]() { return dist(rng); });
            layer.b = Vector::NullaryExpr(out, [&]() { return dist(rng); });
            layer.grad_w = Matrix::Zero(out, in);
            layer.grad_b = Vector::Zero(out);
            layer.adam_m_w = Matrix::Zero(out, in);
            layer.adam_v_w = Matrix::Zero(out, in);
            layer.adam_m_b = Vector::Zero(out);
            layer.adam_v_b = Vector::Zero(out);
            layers_.push_back(std::move(layer));
        }
    }

    int input_size() const { return sizes_.front(); }
    int output_size() const { return sizes_.back(); }
    const std::vector<int>& sizes() const { return sizes_; }
    std::vector<LinearLayer>& layers() { return layers_; }
    const std::vector<LinearLayer>& layers() const { return layers_; }

    /// Inference pass without gradient bookkeeping.
    Matrix forward(const Matrix& x) const {
        Matrix a = x;
        for (std::size_t i = 0; i < layers_.size(); ++i) {
            const Matrix z = (layers_[i].w * a).colwise() + layers_[i].b;
            a = detail::apply_activation(activation_at(i), z);
        }
        return a;
    }

    Matrix forward_cached(const Matrix& x) {
        inputs_.assign(1, x);
        pre_.clear();
        post_.clear();
        for (std::size_t i = 0; i < layers_.size(); ++i) {
            const Matrix z = (layers_[i].w * inputs_.back()).colwise() + layers_[i].b;
            const Matrix a = detail::apply_activation(activation_at(i), z);
            pre_.push_back(z);
            post_.push_back(a);
            if (i + 1 < layers_.size()) inputs_.push_back(a);
        }
        return post_.back();
    }

    /// Accumulates parameter gradients for the cached batch and returns the
    /// loss gradient with respect to the network input.
    Matrix backward(const Matrix& dloss_dout) {
        if (pre_.size() != layers_.size()) throw std::logic_error("backward without forward_cached");
        Matrix up = dloss_dout;
        for (std::size_t idx = layers_.size(); idx-- > 0;) {
            const Matrix dz = detail::activation_grad(activation_at(idx), pre_[idx], post_[idx], up);
            layers_[idx].grad_w += dz * inputs_[idx].transpose();
            layers_[idx].grad_b += dz.rowwise().sum();
            up = layers_[idx].w.transpose() * dz;
        }
        return up;
    }

    void zero_grad() {
        for (auto& layer : layers_) {
            layer.grad_w.setZero();
            layer.grad_b.setZero();
        }
    }

    void adam_step(const AdamConfig& cfg) {
        ++adam_t_;
        const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(adam_t_));
        const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(adam_t_));
        for (auto& layer : layers_) {
            layer.adam_m_w = cfg.beta1 * layer.adam_m_w + (1.0 - cfg.beta1) * layer.grad_w;
            layer.adam_v_w = cfg.beta2 * layer.adam_v_w +
                             (1.0 - cfg.beta2) * layer.grad_w.cwiseProduct(layer.grad_w).eval();
            layer.adam_m_b = cfg.beta1 * layer.adam_m_b + (1.0 - cfg.beta1) * layer.grad_b;
            layer.adam_v_b = cfg.beta2 * layer.adam_v_b +
                             (1.0 - cfg.beta2) * layer.grad_b.cwiseProduct(layer.grad_b).eval();
            layer.w -= (cfg.lr / bc1) *
                       (layer.adam_m_w.array() / ((layer.adam_v_w.array() / bc2).sqrt() + cfg.eps))
                           .matrix();
            layer.b -= (cfg.lr / bc1) *
                       (layer.adam_m_b.array() / ((layer.adam_v_b.array() / bc2).sqrt() + cfg.eps))
                           .matrix();
        }
    }

    void zero_last_layer() {
        layers_.back().w.setZero();
        layers_.back().b.setZero();
    }

    void copy_from(const Mlp& src) {
        if (src.sizes_ != sizes_) throw std::invalid_argument("network shape mismatch");
        for (std::size_t i = 0; i < layers_.size(); ++i) {
            layers_[i].w = src.layers_[i].w;
            layers_[i].b = src.layers_[i].b;
        }
    }

    void soft_update_from(const Mlp& src, double tau) {
        if (src.sizes_ != sizes_) throw std::invalid_argument("network shape mismatch");
        for (std::size_t i = 0; i < layers_.size(); ++i) {
            layers_[i].w = (1.0 - tau) * layers_[i].w + tau * src.layers_[i].w;
            layers_[i].b = (1.0 - tau) * layers_[i].b + tau * src.layers_[i].b;
        }
    }

    void save(std::ostream& os) const {
        detail::write_u64(os, static_cast<std::uint64_t>(sizes_.size()));
        for (int s : sizes_) detail::write_u64(os, static_cast<std::uint64_t>(s));
        detail::write_u64(os, static_cast<std::uint64_t>(hidden_));
        detail::write_u64(os, static_cast<std::uint64_t>(output_));
        detail::write_u64(os, adam_t_);
        for (const auto& layer : layers_) {
            for (const Matrix* m : {&layer.w, &layer.adam_m_w, &layer.adam_v_w}) {
                for (Eigen::Index c = 0; c < m->cols(); ++c) {
                    for (Eigen::Index r = 0; r < m->rows(); ++r) detail::write_f64(os, (*m)(r, c));
                }
            }
            for (const Vector* v : {&layer.b, &layer.adam_m_b, &layer.adam_v_b}) {
                for (Eigen::Index r = 0; r < v->size(); ++r) detail::write_f64(os, (*v)(r));
            }
        }
    }

    void load(std::istream& is) {
        const auto n_sizes = detail::read_u64(is);
        if (n_sizes < 2 || n_sizes > 64) throw std::runtime_error("corrupt network header");
        std::vector<int> sizes(n_sizes);
        for (auto& s : sizes) s = static_cast<int>(detail::read_u64(is));
        hidden_ = static_cast<Activation>(detail::read_u64(is));
        output_ = static_cast<Activation>(detail::read_u64(is));
        const auto t = detail::read_u64(is);
        std::mt19937_64 dummy(0);
        *this = Mlp(sizes, hidden_, output_, dummy);
        adam_t_ = t;
        for (auto& layer : layers_) {
            for (Matrix* m : {&layer.w, &layer.adam_m_w, &layer.adam_v_w}) {
                for (Eigen::Index c = 0; c < m->cols(); ++c) {
                    for (Eigen::Index r = 0; r < m->rows(); ++r) (*m)(r, c) = detail::read_f64(is);
                }
            }
            for (Vector* v : {&layer.b, &layer.adam_m_b, &layer.adam_v_b}) {
                for (Eigen::Index r = 0; r < v->size(); ++r) (*v)(r) = detail::read_f64(is);
            }
        }
    }

private:
    Activation activation_at(std::size_t layer_index) const {
        return layer_index + 1 == layers_.size() ? output_ : hidden_;
    }

    std::vector<int> sizes_;
    Activation hidden_ = Activation::ReLU;
    Activation output_ = Activation::Identity;
    std::vector<LinearLayer> layers_;
    std::uint64_t adam_t_ = 0;
    std::vector<Matrix> inputs_;
    std::vector<Matrix> pre_;
    std::vector<Matrix> post_;
};

} // namespace evade
