#pragma once

#include <cmath>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "lada/common.hpp"
#include "lada/stats.hpp"

namespace lada {

struct AdapterConfig {
    /// Memory vectors per class before clamping to the class sample count.
    std::size_t lambda1 = 16;
    /// Sharpness of exp(-beta * (1 - similarity)).
    double beta = 5.0;

    void validate() const {
        if (lambda1 < 1) throw Error(ErrorKind::parameter, "lambda1 must be >= 1");
        if (!(beta > 0.0) || !std::isfinite(beta)) throw Error(ErrorKind::parameter, "beta must be positive and finite");
    }

    bool operator==(const AdapterConfig&) const = default;
};

/// The label-specific memory of one class: one row per memory vector.
struct LabelMemoryBlock {
    std::uint32_t task_id = 0;
    std::uint32_t class_id = 0;
    Matrix weights;
    bool frozen = false;

    bool operator==(const LabelMemoryBlock&) const = default;
};

struct AdapterState {
    AdapterConfig config;
    /// One block per seen class, grouped by task, in registry order.
    std::vector<LabelMemoryBlock> blocks;

    bool empty() const noexcept { return blocks.empty(); }
    std::size_t class_count() const noexcept { return blocks.size(); }

    std::size_t dimension() const { return blocks.empty() ? 0 : blocks.front().weights.cols; }

    std::vector<std::uint32_t> class_ids() const {
        std::vector<std::uint32_t> out;
        for (const auto& b : blocks) out.push_back(b.class_id);
        return out;
    }

    /// Learnable scalars: sum over classes of rows * d.
    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (const auto& b : blocks) n += b.weights.data.size();
        return n;
    }

    std::size_t parameter_count(std::uint32_t task_id) const {
        std::size_t n = 0;
        for (const auto& b : blocks)
            if (b.task_id == task_id) n += b.weights.data.size();
        return n;
    }

    bool operator==(const AdapterState&) const = default;
};

/// k-means over one class's features with k = min(lambda1, count); the
/// centers are renormalized to unit length and become the block rows.
inline LabelMemoryBlock init_block(std::span<const Vec> features, std::uint32_t task_id, std::uint32_t class_id,
                                   const AdapterConfig& config, std::uint64_t seed) {
    config.validate();
    if (features.empty()) throw Error(ErrorKind::empty_input, "class " + std::to_string(class_id) + " has no features");
    const std::size_t k = std::min(config.lambda1, features.size());
    const auto clusters = kmeans(features, k, seed);
    LabelMemoryBlock block{task_id, class_id, Matrix(k, features.front().size()), false};
    for (std::size_t r = 0; r < k; ++r) {
        const Vec unit = normalized(clusters.centers[r]);
        std::copy(unit.begin(), unit.end(), block.weights.row(r).begin());
    }
    return block;
}

namespace detail {
inline void check_input(const AdapterState& state, std::span<const double> x) {
    if (state.empty()) throw Error(ErrorKind::contract, "adapter has no memory blocks");
    if (x.size() != state.dimension())
        throw Error(ErrorKind::shape, "input has dimension " + std::to_string(x.size()) + ", adapter expects " +
                                          std::to_string(state.dimension()));
}
} // namespace detail

/// Inner products of the input with every memory row, one entry per class.
inline std::vector<Vec> phi_map(const AdapterState& state, std::span<const double> x) {
    detail::check_input(state, x);
    std::vector<Vec> out;
    out.reserve(state.blocks.size());
    for (const auto& b : state.blocks) {
        Vec sims(b.weights.rows);
        for (std::size_t r = 0; r < b.weights.rows; ++r) sims[r] = dot(b.weights.row(r), x);
        out.push_back(std::move(sims));
    }
    return out;
}

inline double similarity_kernel(double similarity, double beta) { return std::exp(-beta * (1.0 - similarity)); }

/// Per-class score sum_l exp(-beta * (1 - <w_l, x>)), in block order.
inline Vec lada_logits(const AdapterState& state, std::span<const double> x) {
    detail::check_input(state, x);
    Vec out(state.blocks.size());
    for (std::size_t c = 0; c < state.blocks.size(); ++c) {
        const auto& w = state.blocks[c].weights;
        double s = 0.0;
        for (std::size_t r = 0; r < w.rows; ++r) s += similarity_kernel(dot(w.row(r), x), state.config.beta);
        out[c] = s;
    }
    return out;
}

/// Appends the new blocks and freezes everything that was already there.
inline AdapterState expand_for_task(AdapterState state, std::vector<LabelMemoryBlock> new_blocks) {
    std::set<std::uint32_t> seen;
    for (const auto& b : state.blocks) seen.insert(b.class_id);
    for (const auto& b : new_blocks) {
        if (!seen.insert(b.class_id).second) throw Error(ErrorKind::registry, "class " + std::to_string(b.class_id) + " already has a memory block");
        if (!state.empty() && b.weights.cols != state.dimension())
            throw Error(ErrorKind::shape, "block for class " + std::to_string(b.class_id) + " has the wrong dimension");
    }
    for (auto& b : state.blocks) b.frozen = true;
    for (auto& b : new_blocks) state.blocks.push_back(std::move(b));
    return state;
}

inline AdapterState freeze_task(AdapterState state, std::uint32_t task_id) {
    bool found = false;
    for (auto& b : state.blocks) {
        if (b.task_id == task_id) {
            b.frozen = true;
            found = true;
        }
    }
    if (!found) throw Error(ErrorKind::registry, "adapter has no blocks for task " + std::to_string(task_id));
    return state;
}

} // namespace lada
