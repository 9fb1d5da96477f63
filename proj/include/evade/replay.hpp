#pragma once

#include <cstddef>
#include <random>
#include <stdexcept>
#include <vector>

#include "evade/observation.hpp"

namespace evade {

struct Transition {
    Observation obs{};
    double action = 0.0; // executed (post-filter) action, raw scale
    double reward = 0.0;
    Observation next_obs{};
    bool done = false; // absorbing end; false for timeout so bootstrap continues
};

/// Fixed-capacity ring buffer; once full, each push overwrites the oldest
/// entry. Sampling is uniform over the stored entries.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
        if (capacity == 0) throw std::invalid_argument("replay capacity must be > 0");
        storage_.reserve(std::min<std::size_t>(capacity, 1 << 20));
    }

    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return storage_.size(); }

    void push(const Transition& t) {
        if (storage_.size() < capacity_) {
            storage_.push_back(t);
        } else {
            storage_[cursor_] = t;
        }
        cursor_ = (cursor_ + 1) % capacity_;
    }

    const Transition& at(std::size_t i) const { return storage_.at(i); }

    std::vector<std::size_t> sample_indices(std::size_t batch, std::mt19937_64& rng) const {
        if (storage_.empty()) throw std::logic_error("sampling from empty replay buffer");
        std::uniform_int_distribution<std::size_t> pick(0, storage_.size() - 1);
        std::vector<std::size_t> out(batch);
        for (auto& i : out) i = pick(rng);
        return out;
    }

private:
    std::size_t capacity_;
    std::size_t cursor_ = 0;
    std::vector<Transition> storage_;
};

} // namespace evade
