#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lada/checkpoint.hpp"
#include "lada/embedding_store.hpp"
#include "lada/inference.hpp"
#include "lada/metrics.hpp"
#include "lada/run_config.hpp"
#include "lada/trainer.hpp"

namespace lada {

/// Normalized inputs of one continual run; `train[i]` holds task i (learning order).
struct BenchmarkData {
    ClassRegistry registry;
    std::vector<EmbeddingSet> train;
    EmbeddingSet test;
    EmbeddingSet text;
    std::optional<EmbeddingSet> unseen_extra;
};

inline EmbeddingSet select_task(const EmbeddingSet& set, std::uint32_t task_id) {
    EmbeddingSet out;
    out.dimension = set.dimension;
    out.normalized = set.normalized;
    for (const auto& r : set.records)
        if (r.task_id == task_id) out.records.push_back(r);
    return out;
}

inline BenchmarkData load_benchmark_data(const RunConfig& cfg) {
    if (cfg.registry_file.empty() || cfg.train_files.empty() || cfg.test_file.empty() || cfg.text_file.empty())
        throw Error(ErrorKind::parameter, "registry_file, train_files, test_file and text_file are required");
    BenchmarkData data;
    data.registry = load_registry(cfg.resolve(cfg.registry_file));
    if (data.registry.task_count() == 0) throw Error(ErrorKind::empty_input, "registry has no tasks");

    EmbeddingSet all_train;
    for (const auto& f : cfg.train_files) {
        auto s = load_lse(cfg.resolve(f));
        if (all_train.dimension != 0 && s.dimension != all_train.dimension) throw Error(ErrorKind::shape, f + " has a different dimension");
        all_train.dimension = s.dimension;
        all_train.records.insert(all_train.records.end(), s.records.begin(), s.records.end());
    }
    all_train = normalize_set(all_train);
    check_registered(all_train, data.registry);
    for (const auto& t : data.registry.tasks()) data.train.push_back(select_task(all_train, t.task_id));

    data.test = normalize_set(load_lse(cfg.resolve(cfg.test_file)));
    data.text = normalize_set(load_lse(cfg.resolve(cfg.text_file)));
    if (!cfg.unseen_text_file.empty()) data.unseen_extra = normalize_set(load_lse(cfg.resolve(cfg.unseen_text_file)));
    for (const auto* s : {&data.test, &data.text})
        if (s->dimension != all_train.dimension) throw Error(ErrorKind::shape, "test/text embeddings differ in dimension from training");
    check_registered(data.text, data.registry);
    return data;
}

/// Per-task accuracy of vanilla text vectors over every class (no training).
inline std::vector<double> zero_shot_accuracy(const BenchmarkData& data) {
    ClassRegistry fresh = data.registry;
    for (const auto& t : data.registry.tasks()) fresh.set_status(t.task_id, TaskStatus::unseen);
    const auto bank = make_unseen_bank(data.text, fresh, data.unseen_extra ? &*data.unseen_extra : nullptr);
    const auto report = batch_eval(data.test, AdapterState{}, TextClassifier{}, bank, fresh, InferenceConfig{});
    std::vector<double> out;
    for (const auto& t : data.registry.tasks()) {
        const auto* e = report.find(t.task_id);
        out.push_back(e ? e->accuracy() : 0.0);
    }
    return out;
}

struct BenchmarkResult {
    AccuracyMatrix matrix{1};
    MetricsSummary metrics;
    std::vector<double> zero_shot;
    std::vector<TrainReport> train_reports;
    std::vector<EvalReport> evals;
    ModelState model;
    nlohmann::json summary;
};

/// Called after each task is learned and evaluated (1-based step).
using StepObserver = std::function<void(std::size_t step, const ModelState&, const EvalReport&)>;

inline UnseenBank current_unseen_bank(const BenchmarkData& data, const ClassRegistry& registry) {
    return make_unseen_bank(data.text, registry, data.unseen_extra ? &*data.unseen_extra : nullptr);
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) { detail::write_text_file(path, j.dump(2) + "\n"); }

/// The continual protocol: learn each task in order, evaluate every task after
/// each step (future tasks through the unseen bank) and fill the matrix column.
/// Writes outputs when cfg.out_dir is set.
inline BenchmarkResult run_benchmark(const RunConfig& cfg, const BenchmarkData& data, const StepObserver& observer = {}) {
    cfg.validate();
    const std::size_t K = data.registry.task_count();
    const std::filesystem::path out = cfg.out_dir.empty() ? std::filesystem::path() : cfg.resolve(cfg.out_dir);
    if (!out.empty()) {
        std::filesystem::create_directories(out / "eval");
        detail::write_text_file(out / "config.txt", to_config_text(cfg));
    }

    BenchmarkResult result;
    result.matrix = AccuracyMatrix(K);
    result.zero_shot = zero_shot_accuracy(data);
    result.model.registry = data.registry;
    for (const auto& t : data.registry.tasks()) result.model.registry.set_status(t.task_id, TaskStatus::unseen);

    for (std::size_t step = 1; step <= K; ++step) {
        const auto task_id = data.registry.tasks()[step - 1].task_id;
        result.train_reports.push_back(train_task(result.model, data.train[step - 1], data.text, task_id, cfg.train));

        for (std::size_t i = 0; i < K; ++i) {
            const auto expected = i < step ? TaskStatus::learned : TaskStatus::unseen;
            if (result.model.registry.tasks()[i].status != expected) throw Error(ErrorKind::state, "task status out of protocol order");
        }
        const auto bank = current_unseen_bank(data, result.model.registry);
        auto report = batch_eval(data.test, result.model.adapter, result.model.text, bank, result.model.registry, cfg.inference);
        std::vector<double> column;
        for (const auto& t : data.registry.tasks()) {
            const auto* e = report.find(t.task_id);
            column.push_back(e ? e->accuracy() : 0.0);
        }
        result.matrix.set_column(step, column);

        if (!out.empty()) {
            write_json(out / "eval" / ("step_" + std::to_string(step) + ".json"), to_json(report));
            detail::write_text_file(out / "matrix.csv", result.matrix.to_csv());
            if (cfg.save_checkpoints)
                save_checkpoint({result.model, bank, to_key_values(cfg)}, out / "checkpoints" / ("after_task_" + std::to_string(step)));
        }
        if (observer) observer(step, result.model, report);
        result.evals.push_back(std::move(report));
    }

    result.metrics = summary(result.matrix);
    nlohmann::json config = nlohmann::json::object();
    for (const auto& [k, v] : to_key_values(cfg)) config[k] = v;
    nlohmann::json zs = nlohmann::json::array();
    double zs_mean = 0.0;
    for (double v : result.zero_shot) {
        zs.push_back(v);
        zs_mean += v / static_cast<double>(K);
    }
    std::vector<std::uint32_t> task_ids;
    for (const auto& t : data.registry.tasks()) task_ids.push_back(t.task_id);
    result.summary = to_json(result.metrics);
    result.summary["config"] = config;
    result.summary["tasks"] = task_ids;
    result.summary["zero_shot"] = {{"per_task", zs}, {"mean", zs_mean}};

    if (!out.empty()) {
        write_json(out / "summary.json", result.summary);
        nlohmann::json log = nlohmann::json::array();
        for (const auto& r : result.train_reports) log.push_back({{"task_id", r.task_id}, {"steps", r.steps}, {"epoch_losses", r.epoch_losses}});
        write_json(out / "train_log.json", log);
    }
    return result;
}

/// Learns the next `count` unseen tasks, starting from `model`.
inline std::vector<TrainReport> train_next_tasks(ModelState& model, const BenchmarkData& data, const TrainConfig& cfg, std::size_t count) {
    std::vector<TrainReport> reports;
    for (std::size_t i = 0; i < model.registry.task_count() && reports.size() < count; ++i) {
        const auto& t = model.registry.tasks()[i];
        if (t.status == TaskStatus::learned) continue;
        reports.push_back(train_task(model, data.train[i], data.text, t.task_id, cfg));
    }
    return reports;
}

} // namespace lada
