#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "evade/geometry.hpp"
#include "evade/net.hpp"
#include "evade/observation.hpp"
#include "evade/replay.hpp"
#include "evade/rng.hpp"

namespace evade {

struct PolicyAction {
    double raw = 0.0; // in [-1, 1]
};

inline double heading_from_raw(double raw) { return kPi * raw; }
inline double raw_from_heading(double heading) {
    return std::clamp(wrap_angle(heading) / kPi, -1.0, 1.0);
}

struct Td3Config {
    double actor_lr = 3e-4;
    double critic_lr = 3e-4;
    double discount = 0.99;
    int batch_size = 256;
    std::size_t buffer_capacity = 1000000;
    double target_noise = 0.2;
    double target_noise_clip = 0.5;
    int policy_delay = 2;
    double tau = 0.005;
    double exploration_noise = 0.1;
    std::vector<int> hidden = {256, 256};

    void validate() const {
        if (!(actor_lr > 0.0)) throw std::invalid_argument("actor_lr must be > 0");
        if (!(critic_lr > 0.0)) throw std::invalid_argument("critic_lr must be > 0");
        if (!(discount > 0.0) || discount > 1.0)
            throw std::invalid_argument("discount must be in (0, 1]");
        if (batch_size <= 0) throw std::invalid_argument("batch_size must be > 0");
        if (buffer_capacity == 0) throw std::invalid_argument("buffer_capacity must be > 0");
        if (target_noise < 0.0) throw std::invalid_argument("target_noise must be >= 0");
        if (target_noise_clip < 0.0) throw std::invalid_argument("target_noise_clip must be >= 0");
        if (policy_delay < 1) throw std::invalid_argument("policy_delay must be >= 1");
        if (!(tau > 0.0) || tau > 1.0) throw std::invalid_argument("tau must be in (0, 1]");
        if (exploration_noise < 0.0) throw std::invalid_argument("exploration_noise must be >= 0");
        if (hidden.empty()) throw std::invalid_argument("hidden widths must be non-empty");
        for (int h : hidden) {
            if (h <= 0) throw std::invalid_argument("hidden widths must be positive");
        }
    }
};

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

/// Hash of every field that changes the meaning of stored weights; checked on
/// checkpoint load so stale weights cannot silently drive a different setup.
inline std::uint64_t config_hash(const Td3Config& cfg) {
    char buf[512];
    std::string s;
    std::snprintf(buf, sizeof(buf), "td3|%.17g|%.17g|%.17g|%d|%zu|%.17g|%.17g|%d|%.17g|%.17g|",
                  cfg.actor_lr, cfg.critic_lr, cfg.discount, cfg.batch_size, cfg.buffer_capacity,
                  cfg.target_noise, cfg.target_noise_clip, cfg.policy_delay, cfg.tau,
                  cfg.exploration_noise);
    s = buf;
    for (int h : cfg.hidden) {
        std::snprintf(buf, sizeof(buf), "%d|", h);
        s += buf;
    }
    return fnv1a64(s);
}

struct UpdateReport {
    bool updated = false;
    double critic1_loss = 0.0;
    double critic2_loss = 0.0;
    bool actor_updated = false;
    double actor_loss = 0.0;
};

class CheckpointMismatch : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class Td3Agent {
public:
    Td3Agent(const Td3Config& cfg, std::uint64_t master_seed)
        : cfg_(cfg), buffer_(cfg.buffer_capacity),
          update_rng_(make_rng(master_seed, Stream::Replay)),
          explore_rng_(make_rng(master_seed, Stream::Exploration)) {
        cfg_.validate();
        std::mt19937_64 init_rng = make_rng(master_seed, Stream::Init);
        std::vector<int> actor_sizes{kObservationDim};
        std::vector<int> critic_sizes{kObservationDim + 1};
        for (int h : cfg_.hidden) {
            actor_sizes.push_back(h);
            critic_sizes.push_back(h);
        }
        actor_sizes.push_back(1);
        critic_sizes.push_back(1);
        actor_ = Mlp(actor_sizes, Activation::ReLU, Activation::Tanh, init_rng);
        critic1_ = Mlp(critic_sizes, Activation::ReLU, Activation::Identity, init_rng);
        critic2_ = Mlp(critic_sizes, Activation::ReLU, Activation::Identity, init_rng);
        // Zeroed actor head: the untrained mean policy heads straight along
        // +x instead of spinning randomly, so exploration is noise around a
        // consistent walk from the very first step.
        actor_.zero_last_layer();
        actor_target_ = actor_;
        critic1_target_ = critic1_;
        critic2_target_ = critic2_;
    }

    const Td3Config& config() const { return cfg_; }
    ReplayBuffer& buffer() { return buffer_; }
    const ReplayBuffer& buffer() const { return buffer_; }
    Mlp& actor() { return actor_; }
    Mlp& critic1() { return critic1_; }
    Mlp& critic2() { return critic2_; }
    const Mlp& actor_target() const { return actor_target_; }
    const Mlp& critic1_target() const { return critic1_target_; }
    const Mlp& critic2_target() const { return critic2_target_; }
    std::uint64_t update_count() const { return update_count_; }

    PolicyAction act(const Observation& obs, bool deterministic) {
        Matrix x(kObservationDim, 1);
        for (int i = 0; i < kObservationDim; ++i) x(i, 0) = obs[i];
        double raw = actor_.forward(x)(0, 0);
        if (!deterministic && cfg_.exploration_noise > 0.0) {
            std::normal_distribution<double> noise(0.0, cfg_.exploration_noise);
            raw += noise(explore_rng_);
        }
        return PolicyAction{std::clamp(raw, -1.0, 1.0)};
    }

    UpdateReport update() {
        UpdateReport report;
        if (buffer_.size() < static_cast<std::size_t>(cfg_.batch_size)) return report;
        report.updated = true;
        ++update_count_;

        const auto idx = buffer_.sample_indices(static_cast<std::size_t>(cfg_.batch_size),
                                                update_rng_);
        const int B = cfg_.batch_size;
        Matrix obs(kObservationDim, B), next_obs(kObservationDim, B);
        Matrix action(1, B);
        Vector rew(B), not_done(B);
        for (int b = 0; b < B; ++b) {
            const Transition& t = buffer_.at(idx[static_cast<std::size_t>(b)]);
            for (int i = 0; i < kObservationDim; ++i) {
                obs(i, b) = t.obs[i];
                next_obs(i, b) = t.next_obs[i];
            }
            action(0, b) = t.action;
            rew(b) = t.reward;
            not_done(b) = t.done ? 0.0 : 1.0;
        }

        // Smoothed target action and clipped twin-min bootstrap target.
        Matrix next_action = actor_target_.forward(next_obs);
        std::normal_distribution<double> smooth(0.0, cfg_.target_noise);
        for (int b = 0; b < B; ++b) {
            const double eps = cfg_.target_noise > 0.0
                                   ? std::clamp(smooth(update_rng_), -cfg_.target_noise_clip,
                                                cfg_.target_noise_clip)
                                   : 0.0;
            next_action(0, b) = std::clamp(next_action(0, b) + eps, -1.0, 1.0);
        }
        Matrix next_in(kObservationDim + 1, B);
        next_in.topRows(kObservationDim) = next_obs;
        next_in.bottomRows(1) = next_action;
        const Matrix q1n = critic1_target_.forward(next_in);
        const Matrix q2n = critic2_target_.forward(next_in);
        Matrix y(1, B);
        for (int b = 0; b < B; ++b) {
            y(0, b) = rew(b) + cfg_.discount * not_done(b) * std::min(q1n(0, b), q2n(0, b));
        }

        Matrix in(kObservationDim + 1, B);
        in.topRows(kObservationDim) = obs;
        in.bottomRows(1) = action;
        const AdamConfig critic_adam{cfg_.critic_lr};
        for (Mlp* critic : {&critic1_, &critic2_}) {
            critic->zero_grad();
            const Matrix q = critic->forward_cached(in);
            const Matrix err = q - y;
            const double loss = err.cwiseProduct(err).sum() / B;
            critic->backward((2.0 / B) * err);
            critic->adam_step(critic_adam);
            (critic == &critic1_ ? report.critic1_loss : report.critic2_loss) = loss;
        }

        if (update_count_ % static_cast<std::uint64_t>(cfg_.policy_delay) == 0) {
            report.actor_updated = true;
            const Matrix a_pred = actor_.forward_cached(obs);
            Matrix actor_in(kObservationDim + 1, B);
            actor_in.topRows(kObservationDim) = obs;
            actor_in.bottomRows(1) = a_pred;
            critic1_.zero_grad();
            const Matrix q = critic1_.forward_cached(actor_in);
            report.actor_loss = -q.sum() / B;
            const Matrix dq = Matrix::Constant(1, B, -1.0 / B);
            const Matrix dinput = critic1_.backward(dq);
            critic1_.zero_grad(); // scratch pass; critic weights unchanged
            actor_.zero_grad();
            actor_.backward(dinput.bottomRows(1));
            actor_.adam_step(AdamConfig{cfg_.actor_lr});

            actor_target_.soft_update_from(actor_, cfg_.tau);
            critic1_target_.soft_update_from(critic1_, cfg_.tau);
            critic2_target_.soft_update_from(critic2_, cfg_.tau);
        }
        return report;
    }

    void save(std::ostream& os) const {
        os.write(kMagic, 8);
        detail::write_u64(os, config_hash(cfg_));
        detail::write_u64(os, update_count_);
        actor_.save(os);
        critic1_.save(os);
        critic2_.save(os);
        actor_target_.save(os);
        critic1_target_.save(os);
        critic2_target_.save(os);
    }

    void load(std::istream& is) {
        char magic[8] = {};
        is.read(magic, 8);
        if (!is || std::string(magic, 8) != std::string(kMagic, 8)) {
            throw std::runtime_error("not a checkpoint file");
        }
        const std::uint64_t stored = detail::read_u64(is);
        const std::uint64_t expected = config_hash(cfg_);
        if (stored != expected) {
            throw CheckpointMismatch("checkpoint config hash " + std::to_string(stored) +
                                     " does not match current config hash " +
                                     std::to_string(expected));
        }
        update_count_ = detail::read_u64(is);
        actor_.load(is);
        critic1_.load(is);
        critic2_.load(is);
        actor_target_.load(is);
        critic1_target_.load(is);
        critic2_target_.load(is);
    }

    void save_file(const std::string& path) const {
        std::ofstream os(path, std::ios::binary);
        if (!os) throw std::runtime_error("cannot open checkpoint for writing: " + path);
        save(os);
        if (!os) throw std::runtime_error("checkpoint write failed: " + path);
    }

    void load_file(const std::string& path) {
        std::ifstream is(path, std::ios::binary);
        if (!is) throw std::runtime_error("cannot open checkpoint: " + path);
        load(is);
    }

private:
    static constexpr const char* kMagic = "EVADECP1";

    Td3Config cfg_;
    ReplayBuffer buffer_;
    Mlp actor_, critic1_, critic2_;
    Mlp actor_target_, critic1_target_, critic2_target_;
    std::mt19937_64 update_rng_;
    std::mt19937_64 explore_rng_;
    std::uint64_t update_count_ = 0;
};

} // namespace evade
