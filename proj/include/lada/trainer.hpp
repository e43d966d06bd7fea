#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "lada/adapter.hpp"
#include "lada/common.hpp"
#include "lada/embedding_store.hpp"
#include "lada/prototypes.hpp"
#include "lada/text_head.hpp"

namespace lada {

enum class LossMode { joint_logits, sum_losses };

inline const char* to_string(LossMode m) { return m == LossMode::joint_logits ? "joint_logits" : "sum_losses"; }

inline LossMode loss_mode_from_string(const std::string& s) {
    if (s == "joint_logits") return LossMode::joint_logits;
    if (s == "sum_losses") return LossMode::sum_losses;
    throw Error(ErrorKind::parameter, "unknown loss mode '" + s + "'");
}

struct TrainConfig {
    int epochs = 20;
    double lr = 1e-3;
    double weight_decay = 0.01;
    std::size_t batch_size = 64;
    LossMode loss_mode = LossMode::joint_logits;
    ReplayMode replay_mode = ReplayMode::augmented;
    std::uint64_t seed = 0;
    double beta = 5.0;
    std::size_t lambda1 = 16;
    std::size_t lambda2 = 4;
    double logit_scale = 100.0;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    double var_floor = 1e-6;
    /// Logit paths that take part in the loss.
    bool use_text = true;
    bool use_lada = true;

    void validate() const {
        if (epochs < 0) throw Error(ErrorKind::parameter, "epochs must be >= 0");
        if (!(lr >= 0.0)) throw Error(ErrorKind::parameter, "lr must be >= 0");
        if (!(weight_decay >= 0.0)) throw Error(ErrorKind::parameter, "weight_decay must be >= 0");
        if (batch_size < 1) throw Error(ErrorKind::parameter, "batch_size must be >= 1");
        if (lambda2 < 1) throw Error(ErrorKind::parameter, "lambda2 must be >= 1");
        if (!(logit_scale > 0.0)) throw Error(ErrorKind::parameter, "logit_scale must be positive");
        if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0))
            throw Error(ErrorKind::parameter, "adam betas must lie in [0, 1)");
        if (!(adam_eps > 0.0)) throw Error(ErrorKind::parameter, "adam_eps must be positive");
        if (!(var_floor >= 0.0)) throw Error(ErrorKind::parameter, "var_floor must be >= 0");
        if (!use_text && !use_lada) throw Error(ErrorKind::parameter, "at least one of use_text / use_lada must be on");
        adapter_config().validate();
    }

    AdapterConfig adapter_config() const { return {lambda1, beta}; }
};

struct LossBreakdown {
    double current_task_loss = 0.0;
    double replay_loss = 0.0;
    double total = 0.0;
};

/// Everything a continual run learns, plus the task bookkeeping.
struct ModelState {
    ClassRegistry registry;
    AdapterState adapter;
    TextClassifier text;
    PrototypeSet prototypes;
};

struct LabeledVector {
    std::span<const double> x;
    std::uint32_t class_id = 0;
};

// ---------------------------------------------------------------------------
// Logits
// ---------------------------------------------------------------------------

namespace detail {
inline void check_aligned(const AdapterState& adapter, const TextClassifier& text) {
    if (adapter.empty()) return;
    if (adapter.class_ids() != text.class_ids())
        throw Error(ErrorKind::shape, "adapter blocks and text entries cover different classes");
}
} // namespace detail

/// Text logit plus LADA logit per seen class. An empty adapter contributes zero.
inline Vec combined_logits(const AdapterState& adapter, const TextClassifier& text, std::span<const double> x) {
    detail::check_aligned(adapter, text);
    Vec z = text_logits(text, x);
    if (!adapter.empty()) {
        const Vec a = lada_logits(adapter, x);
        for (std::size_t j = 0; j < z.size(); ++j) z[j] += a[j];
    }
    return z;
}

// ---------------------------------------------------------------------------
// Trainable parameters
// ---------------------------------------------------------------------------

/// Flat indexing of the unfrozen tensors that take part in the loss.
struct TrainableLayout {
    static constexpr std::size_t none = static_cast<std::size_t>(-1);
    /// Offsets per seen class position, `none` when that tensor is frozen.
    std::vector<std::size_t> block_offset;
    std::vector<std::size_t> text_offset;
    std::size_t size = 0;
};

inline TrainableLayout make_layout(const AdapterState& adapter, const TextClassifier& text, const TrainConfig& cfg) {
    detail::check_aligned(adapter, text);
    TrainableLayout layout;
    const std::size_t m = text.class_count();
    layout.block_offset.assign(m, TrainableLayout::none);
    layout.text_offset.assign(m, TrainableLayout::none);
    for (std::size_t j = 0; j < m; ++j) {
        if (cfg.use_lada && !adapter.empty() && !adapter.blocks[j].frozen) {
            layout.block_offset[j] = layout.size;
            layout.size += adapter.blocks[j].weights.data.size();
        }
        if (cfg.use_text && !text.entries[j].frozen) {
            layout.text_offset[j] = layout.size;
            layout.size += text.entries[j].vector.size();
        }
    }
    return layout;
}

/// Copies the trainable tensors into one flat vector, in layout order.
inline Vec gather_parameters(const AdapterState& adapter, const TextClassifier& text, const TrainableLayout& layout) {
    Vec out(layout.size);
    for (std::size_t j = 0; j < layout.text_offset.size(); ++j) {
        if (layout.block_offset[j] != TrainableLayout::none)
            std::copy(adapter.blocks[j].weights.data.begin(), adapter.blocks[j].weights.data.end(), out.begin() + layout.block_offset[j]);
        if (layout.text_offset[j] != TrainableLayout::none)
            std::copy(text.entries[j].vector.begin(), text.entries[j].vector.end(), out.begin() + layout.text_offset[j]);
    }
    return out;
}

inline void scatter_parameters(AdapterState& adapter, TextClassifier& text, const TrainableLayout& layout, std::span<const double> flat) {
    for (std::size_t j = 0; j < layout.text_offset.size(); ++j) {
        if (layout.block_offset[j] != TrainableLayout::none) {
            auto& w = adapter.blocks[j].weights.data;
            std::copy_n(flat.begin() + layout.block_offset[j], w.size(), w.begin());
        }
        if (layout.text_offset[j] != TrainableLayout::none) {
            auto& t = text.entries[j].vector;
            std::copy_n(flat.begin() + layout.text_offset[j], t.size(), t.begin());
        }
    }
}

/// Gradient laid out like the parameters it belongs to. Frozen tensors are
/// all-zero by construction.
struct ParameterGradients {
    std::vector<Vec> blocks;
    std::vector<Vec> text;
};

inline ParameterGradients expand_gradient(const AdapterState& adapter, const TextClassifier& text, const TrainableLayout& layout,
                                          std::span<const double> flat) {
    ParameterGradients g;
    for (std::size_t j = 0; j < adapter.blocks.size(); ++j) {
        Vec v(adapter.blocks[j].weights.data.size(), 0.0);
        if (layout.block_offset[j] != TrainableLayout::none) std::copy_n(flat.begin() + layout.block_offset[j], v.size(), v.begin());
        g.blocks.push_back(std::move(v));
    }
    for (std::size_t j = 0; j < text.entries.size(); ++j) {
        Vec v(text.entries[j].vector.size(), 0.0);
        if (layout.text_offset[j] != TrainableLayout::none) std::copy_n(flat.begin() + layout.text_offset[j], v.size(), v.begin());
        g.text.push_back(std::move(v));
    }
    return g;
}

// ---------------------------------------------------------------------------
// Losses and gradients
// ---------------------------------------------------------------------------

namespace detail {

/// Softmax cross-entropy of one labeled vector against all seen classes,
/// scaled by `weight`; adds d(weight * loss)/d(params) into grad when given.
inline double sample_loss(const AdapterState& adapter, const TextClassifier& text, const TrainConfig& cfg, const TrainableLayout& layout,
                          std::span<const double> x, std::size_t label, double weight, double* grad) {
    const std::size_t m = text.class_count();
    const std::size_t d = x.size();
    const bool with_lada = cfg.use_lada && !adapter.empty();
    const bool with_text = cfg.use_text;

    Vec zt(m, 0.0), za(m, 0.0);
    std::vector<Vec> kernel;
    if (with_text) zt = text_logits(text, x);
    if (with_lada) {
        kernel.resize(m);
        for (std::size_t j = 0; j < m; ++j) {
            const auto& w = adapter.blocks[j].weights;
            if (w.cols != d) throw Error(ErrorKind::shape, "input dimension does not match the adapter");
            kernel[j].resize(w.rows);
            for (std::size_t r = 0; r < w.rows; ++r) {
                kernel[j][r] = similarity_kernel(dot(w.row(r), x), cfg.beta);
                za[j] += kernel[j][r];
            }
        }
    }

    // dloss/dz for each path; the joint mode shares one softmax.
    Vec gt(m, 0.0), ga(m, 0.0);
    double loss = 0.0;
    // p_label - 1 is taken as minus the other probabilities, which stays
    // accurate when the true class is nearly certain.
    auto cross_entropy = [&](const Vec& z, Vec& g) {
        const double lse = log_sum_exp(z);
        double rest = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            if (j == label) continue;
            g[j] = std::exp(z[j] - lse);
            rest += g[j];
        }
        g[label] = -rest;
        return rest < 0.5 ? -std::log1p(-rest) : lse - z[label];
    };
    if (cfg.loss_mode == LossMode::joint_logits) {
        Vec z(m);
        for (std::size_t j = 0; j < m; ++j) z[j] = zt[j] + za[j];
        Vec g(m);
        loss = cross_entropy(z, g);
        if (with_text) gt = g;
        if (with_lada) ga = g;
    } else {
        if (with_text) loss += cross_entropy(zt, gt);
        if (with_lada) loss += cross_entropy(za, ga);
    }

    if (grad) {
        for (std::size_t j = 0; j < m; ++j) {
            if (with_text && layout.text_offset[j] != TrainableLayout::none) {
                const double c = weight * gt[j] * text.logit_scale;
                double* g = grad + layout.text_offset[j];
                for (std::size_t i = 0; i < d; ++i) g[i] += c * x[i];
            }
            if (with_lada && layout.block_offset[j] != TrainableLayout::none) {
                double* g = grad + layout.block_offset[j];
                for (std::size_t r = 0; r < kernel[j].size(); ++r) {
                    const double c = weight * ga[j] * cfg.beta * kernel[j][r];
                    for (std::size_t i = 0; i < d; ++i) g[r * d + i] += c * x[i];
                }
            }
        }
    }
    return weight * loss;
}

inline std::map<std::uint32_t, std::size_t> label_index(const TextClassifier& text) {
    std::map<std::uint32_t, std::size_t> out;
    for (std::size_t j = 0; j < text.entries.size(); ++j) out[text.entries[j].class_id] = j;
    return out;
}

struct WeightedItem {
    std::span<const double> x;
    std::size_t label = 0;
    double weight = 0.0;
    bool replay = false;
};

/// Fixed chunking keeps the summation order independent of the worker count.
inline constexpr std::size_t reduction_chunk = 16;

inline LossBreakdown accumulate(const AdapterState& adapter, const TextClassifier& text, const TrainConfig& cfg, const TrainableLayout& layout,
                                const std::vector<WeightedItem>& items, Vec* grad) {
    const std::size_t chunks = (items.size() + reduction_chunk - 1) / reduction_chunk;
    std::vector<Vec> partial_grad(grad ? chunks : 0);
    std::vector<double> partial_current(chunks, 0.0), partial_replay(chunks, 0.0);
    parallel_for(chunks, [&](std::size_t c) {
        double* g = nullptr;
        if (grad) {
            partial_grad[c].assign(layout.size, 0.0);
            g = partial_grad[c].data();
        }
        const std::size_t end = std::min(items.size(), (c + 1) * reduction_chunk);
        for (std::size_t i = c * reduction_chunk; i < end; ++i) {
            const auto& it = items[i];
            const double l = sample_loss(adapter, text, cfg, layout, it.x, it.label, it.weight, g);
            (it.replay ? partial_replay[c] : partial_current[c]) += l;
        }
    });
    LossBreakdown out;
    if (grad) grad->assign(layout.size, 0.0);
    for (std::size_t c = 0; c < chunks; ++c) {
        out.current_task_loss += partial_current[c];
        out.replay_loss += partial_replay[c];
        if (grad)
            for (std::size_t i = 0; i < layout.size; ++i) (*grad)[i] += partial_grad[c][i];
    }
    out.total = out.current_task_loss + out.replay_loss;
    return out;
}

inline std::vector<WeightedItem> current_items(const TextClassifier& text, std::uint32_t task_id, std::span<const LabeledVector> batch) {
    const auto index = label_index(text);
    std::vector<WeightedItem> items;
    const double w = batch.empty() ? 0.0 : 1.0 / static_cast<double>(batch.size());
    for (const auto& s : batch) {
        auto it = index.find(s.class_id);
        if (it == index.end() || text.entries[it->second].task_id != task_id)
            throw Error(ErrorKind::contract, "class " + std::to_string(s.class_id) + " is not a class of task " + std::to_string(task_id));
        items.push_back({s.x, it->second, w, false});
    }
    return items;
}

inline std::vector<WeightedItem> replay_items(const TextClassifier& text, std::span<const ReplayEntry> entries) {
    const auto index = label_index(text);
    std::map<std::uint32_t, int> classes;
    for (const auto& e : entries) classes[e.class_id] = 1;
    const double per_class = classes.empty() ? 0.0 : 1.0 / static_cast<double>(classes.size());
    std::vector<WeightedItem> items;
    for (const auto& e : entries) {
        auto it = index.find(e.class_id);
        if (it == index.end()) throw Error(ErrorKind::contract, "replayed class " + std::to_string(e.class_id) + " is not a seen class");
        items.push_back({e.vector, it->second, e.weight * per_class, true});
    }
    return items;
}

} // namespace detail

/// Mean cross-entropy over the batch. Every sample must belong to `task_id`.
inline LossBreakdown loss_current(std::span<const LabeledVector> batch, const AdapterState& adapter, const TextClassifier& text,
                                  const TrainConfig& cfg, std::uint32_t task_id) {
    const auto layout = make_layout(adapter, text, cfg);
    return detail::accumulate(adapter, text, cfg, layout, detail::current_items(text, task_id, batch), nullptr);
}

/// Class-averaged, entry-weighted cross-entropy over fixed replay entries.
inline LossBreakdown loss_replay(std::span<const ReplayEntry> entries, const AdapterState& adapter, const TextClassifier& text,
                                 const TrainConfig& cfg) {
    const auto layout = make_layout(adapter, text, cfg);
    return detail::accumulate(adapter, text, cfg, layout, detail::replay_items(text, entries), nullptr);
}

/// Draws replay entries from the prototypes; zero when nothing is learned yet.
inline LossBreakdown loss_replay(const PrototypeSet& protos, const AdapterState& adapter, const TextClassifier& text, const TrainConfig& cfg,
                                 std::mt19937_64& rng) {
    if (protos.empty()) return {};
    const auto entries = replay_batch(protos, rng, cfg.replay_mode);
    return loss_replay(entries, adapter, text, cfg);
}

struct LossAndGradient {
    LossBreakdown loss;
    Vec gradient; // flat, in TrainableLayout order
};

inline LossAndGradient loss_and_gradient(const AdapterState& adapter, const TextClassifier& text, const TrainConfig& cfg, const TrainableLayout& layout,
                                         std::uint32_t task_id, std::span<const LabeledVector> batch, std::span<const ReplayEntry> replay) {
    auto items = detail::current_items(text, task_id, batch);
    auto extra = detail::replay_items(text, replay);
    items.insert(items.end(), extra.begin(), extra.end());
    LossAndGradient out;
    out.loss = detail::accumulate(adapter, text, cfg, layout, items, &out.gradient);
    return out;
}

// ---------------------------------------------------------------------------
// Finite-difference check
// ---------------------------------------------------------------------------

struct GradientCheck {
    double max_relative_error = 0.0;
    double max_absolute_error = 0.0;
    std::size_t parameters = 0;
};

/// Compares the analytic gradient with central differences of the total loss
/// over every trainable scalar. The relative error uses max(|a|, |n|, floor).
inline GradientCheck check_gradient(const AdapterState& adapter, const TextClassifier& text, const TrainConfig& cfg, std::uint32_t task_id,
                                    std::span<const LabeledVector> batch, std::span<const ReplayEntry> replay, double h = 1e-5,
                                    double floor = 1e-8) {
    const auto layout = make_layout(adapter, text, cfg);
    const auto analytic = loss_and_gradient(adapter, text, cfg, layout, task_id, batch, replay);
    const Vec base = gather_parameters(adapter, text, layout);
    AdapterState a = adapter;
    TextClassifier t = text;
    auto total_at = [&](const Vec& params) {
        scatter_parameters(a, t, layout, params);
        return loss_and_gradient(a, t, cfg, make_layout(a, t, cfg), task_id, batch, replay).loss.total;
    };
    GradientCheck out;
    out.parameters = layout.size;
    for (std::size_t i = 0; i < layout.size; ++i) {
        Vec p = base;
        p[i] = base[i] + h;
        const double up = total_at(p);
        p[i] = base[i] - h;
        const double down = total_at(p);
        const double numeric = (up - down) / (2.0 * h);
        const double err = std::abs(numeric - analytic.gradient[i]);
        out.max_absolute_error = std::max(out.max_absolute_error, err);
        out.max_relative_error = std::max(out.max_relative_error, err / std::max({std::abs(numeric), std::abs(analytic.gradient[i]), floor}));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Optimizer
// ---------------------------------------------------------------------------

/// Adam moments for the trainable parameters only, in layout order.
struct OptimizerState {
    Vec first_moment;
    Vec second_moment;
    std::uint64_t step = 0;

    explicit OptimizerState(std::size_t n = 0) : first_moment(n, 0.0), second_moment(n, 0.0) {}
};

/// Decoupled weight decay followed by the bias-corrected adaptive step.
inline void adamw_update(std::span<double> params, std::span<const double> grad, OptimizerState& state, const TrainConfig& cfg) {
    if (state.first_moment.size() != params.size() || grad.size() != params.size())
        throw Error(ErrorKind::shape, "optimizer state does not match the trainable parameters");
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double bc1 = 1.0 - std::pow(cfg.adam_beta1, t);
    const double bc2 = 1.0 - std::pow(cfg.adam_beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto& m = state.first_moment[i];
        auto& v = state.second_moment[i];
        m = cfg.adam_beta1 * m + (1.0 - cfg.adam_beta1) * grad[i];
        v = cfg.adam_beta2 * v + (1.0 - cfg.adam_beta2) * grad[i] * grad[i];
        params[i] *= 1.0 - cfg.lr * cfg.weight_decay;
        params[i] -= cfg.lr * (m / bc1) / (std::sqrt(v / bc2) + cfg.adam_eps);
    }
}

/// One optimization step: current mini-batch plus full replay with fresh noise.
inline LossBreakdown grad_step(AdapterState& adapter, TextClassifier& text, std::uint32_t task_id, std::span<const LabeledVector> batch,
                               const PrototypeSet& protos, const TrainConfig& cfg, OptimizerState& opt, std::mt19937_64& rng) {
    const auto layout = make_layout(adapter, text, cfg);
    std::vector<ReplayEntry> replay;
    if (!protos.empty()) replay = replay_batch(protos, rng, cfg.replay_mode);
    auto lg = loss_and_gradient(adapter, text, cfg, layout, task_id, batch, replay);
    const std::string where = "task " + std::to_string(task_id) + ", step " + std::to_string(opt.step + 1);
    if (!std::isfinite(lg.loss.total)) throw Error(ErrorKind::numerical, "non-finite loss at " + where);
    for (double g : lg.gradient)
        if (!std::isfinite(g)) throw Error(ErrorKind::numerical, "non-finite gradient at " + where);
    Vec params = gather_parameters(adapter, text, layout);
    adamw_update(params, lg.gradient, opt, cfg);
    scatter_parameters(adapter, text, layout, params);
    return lg.loss;
}

// ---------------------------------------------------------------------------
// Per-task loop
// ---------------------------------------------------------------------------

struct TrainReport {
    std::uint32_t task_id = 0;
    std::size_t steps = 0;
    /// Mean total loss over the steps of each epoch.
    std::vector<double> epoch_losses;
};

/// Learns one task: initialize its memory blocks and text vectors, optimize,
/// freeze, then distill its training features into prototypes.
/// `train` must be normalized and hold only this task's records.
inline TrainReport train_task(ModelState& model, const EmbeddingSet& train, const EmbeddingSet& vanilla_text, std::uint32_t task_id,
                              const TrainConfig& cfg) {
    cfg.validate();
    auto& registry = model.registry;
    const auto& task = registry.task(task_id);
    const std::size_t pos = registry.position_of(task_id);
    for (std::size_t i = 0; i < registry.tasks().size(); ++i) {
        const auto status = registry.tasks()[i].status;
        if (i < pos && status != TaskStatus::learned)
            throw Error(ErrorKind::state, "task " + std::to_string(registry.tasks()[i].task_id) + " must be learned before task " + std::to_string(task_id));
        if (i >= pos && status != TaskStatus::unseen)
            throw Error(ErrorKind::state, "task " + std::to_string(registry.tasks()[i].task_id) + " is not unseen");
    }
    if (!train.normalized) throw Error(ErrorKind::contract, "training features must be normalized");
    check_registered(train, registry);
    for (const auto& r : train.records)
        if (r.task_id != task_id) throw Error(ErrorKind::contract, "training set for task " + std::to_string(task_id) + " contains task " + std::to_string(r.task_id));

    registry.set_status(task_id, TaskStatus::current);
    model.text.logit_scale = cfg.logit_scale;
    model.adapter.config = cfg.adapter_config();
    model.prototypes.lambda2 = cfg.lambda2;

    std::vector<std::vector<Vec>> per_class;
    for (auto c : task.class_ids) {
        per_class.push_back(vectors_of_class(train, c));
        if (per_class.back().empty()) throw Error(ErrorKind::empty_input, "no training samples for class " + std::to_string(c));
    }

    if (cfg.use_lada) {
        std::vector<LabelMemoryBlock> blocks;
        for (std::size_t i = 0; i < task.class_ids.size(); ++i)
            blocks.push_back(init_block(per_class[i], task_id, task.class_ids[i], model.adapter.config, derive_seed(cfg.seed, 1, task.class_ids[i])));
        model.adapter = expand_for_task(std::move(model.adapter), std::move(blocks));
    }
    model.text = add_task(std::move(model.text), vanilla_text, registry, task_id);

    TrainReport report;
    report.task_id = task_id;
    const auto layout = make_layout(model.adapter, model.text, cfg);
    OptimizerState opt(layout.size);
    std::mt19937_64 shuffle_rng(derive_seed(cfg.seed, 2, task_id));
    std::mt19937_64 noise_rng(derive_seed(cfg.seed, 3, task_id));
    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), 0);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        double sum = 0.0;
        std::size_t steps = 0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            std::vector<LabeledVector> batch;
            for (std::size_t i = start; i < std::min(order.size(), start + cfg.batch_size); ++i)
                batch.push_back({train.records[order[i]].vector, train.records[order[i]].class_id});
            sum += grad_step(model.adapter, model.text, task_id, batch, model.prototypes, cfg, opt, noise_rng).total;
            ++steps;
        }
        report.steps += steps;
        report.epoch_losses.push_back(sum / static_cast<double>(steps));
    }

    if (cfg.use_lada) model.adapter = freeze_task(std::move(model.adapter), task_id);
    model.text = complete_task(std::move(model.text), task_id);

    std::vector<ClassPrototypes> protos;
    for (std::size_t i = 0; i < task.class_ids.size(); ++i)
        protos.push_back(distill_class(per_class[i], task_id, task.class_ids[i], cfg.lambda2, derive_seed(cfg.seed, 4, task.class_ids[i]), cfg.var_floor));
    model.prototypes = add_prototypes(std::move(model.prototypes), std::move(protos));

    registry.set_status(task_id, TaskStatus::learned);
    return report;
}

} // namespace lada
