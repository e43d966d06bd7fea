#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "lada/adapter.hpp"
#include "lada/common.hpp"
#include "lada/embedding_store.hpp"
#include "lada/text_head.hpp"

namespace lada {

struct InferenceConfig {
    /// Weight of the LADA logits in the seen-class fusion.
    double alpha = 0.5;

    void validate() const {
        if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorKind::parameter, "alpha must lie in [0, 1]");
    }
};

enum class Route { seen_fused, unseen_direct };

inline const char* to_string(Route r) { return r == Route::seen_fused ? "seen_fused" : "unseen_direct"; }

struct Prediction {
    std::uint32_t class_id = 0;
    Route route = Route::seen_fused;
    /// Scores of the deciding stage and the classes they belong to.
    Vec scores;
    std::vector<std::uint32_t> classes;
};

namespace detail {
/// Highest score; equal scores go to the lowest class id.
inline std::size_t best_by_score(std::span<const double> scores, std::span<const std::uint32_t> classes) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i)
        if (scores[i] > scores[best] || (scores[i] == scores[best] && classes[i] < classes[best])) best = i;
    return best;
}
} // namespace detail

/// Stage 1 ranks seen (trained) and unseen (vanilla) text logits together; an
/// unseen winner is returned as is. Otherwise stage 2 fuses text and LADA
/// logits over the seen classes: (1 - alpha) * text + alpha * lada.
inline Prediction predict(std::span<const double> x, const AdapterState& adapter, const TextClassifier& text, const UnseenBank& bank,
                          const InferenceConfig& cfg) {
    cfg.validate();
    if (text.class_count() == 0 && bank.empty()) throw Error(ErrorKind::contract, "no classes to predict from");
    if (!adapter.empty() && adapter.class_ids() != text.class_ids())
        throw Error(ErrorKind::shape, "adapter blocks and text entries cover different classes");

    Prediction p;
    const Vec stage1 = text_logits(text, bank, x);
    std::vector<std::uint32_t> stage1_classes = text.class_ids();
    for (auto c : bank.class_ids()) stage1_classes.push_back(c);
    const std::size_t top = detail::best_by_score(stage1, stage1_classes);
    if (top >= text.class_count()) {
        p.route = Route::unseen_direct;
        p.class_id = stage1_classes[top];
        p.scores = stage1;
        p.classes = std::move(stage1_classes);
        return p;
    }

    const std::size_t m = text.class_count();
    Vec fused(m);
    const Vec lada = adapter.empty() ? Vec(m, 0.0) : lada_logits(adapter, x);
    for (std::size_t j = 0; j < m; ++j) fused[j] = (1.0 - cfg.alpha) * stage1[j] + cfg.alpha * lada[j];
    p.route = Route::seen_fused;
    p.classes = text.class_ids();
    p.class_id = p.classes[detail::best_by_score(fused, p.classes)];
    p.scores = std::move(fused);
    return p;
}

struct TaskEval {
    std::uint32_t task_id = 0;
    std::size_t n = 0;
    std::size_t correct = 0;
    /// Samples whose predicted class belongs to their own task.
    std::size_t task_correct = 0;

    double accuracy() const { return n ? static_cast<double>(correct) / static_cast<double>(n) : 0.0; }
    double task_recall() const { return n ? static_cast<double>(task_correct) / static_cast<double>(n) : 0.0; }
};

struct EvalReport {
    std::vector<TaskEval> per_task; // registry order, tasks with test samples only
    std::size_t n = 0;
    std::size_t correct = 0;
    std::size_t task_correct = 0;
    std::size_t seen_fused = 0;
    std::size_t unseen_direct = 0;
    /// task_confusion[true task position][predicted task position]
    std::vector<std::vector<std::size_t>> task_confusion;
    std::vector<std::uint32_t> task_ids; // registry order, labels of task_confusion

    const TaskEval* find(std::uint32_t task_id) const {
        for (const auto& t : per_task)
            if (t.task_id == task_id) return &t;
        return nullptr;
    }

    double accuracy() const { return n ? static_cast<double>(correct) / static_cast<double>(n) : 0.0; }
    double task_recall() const { return n ? static_cast<double>(task_correct) / static_cast<double>(n) : 0.0; }
};

inline EvalReport evaluate_predictions(const EmbeddingSet& test, std::span<const Prediction> predictions, const ClassRegistry& registry,
                                       const UnseenBank& bank) {
    std::map<std::uint32_t, std::uint32_t> extra_task;
    for (const auto& e : bank.entries)
        if (!registry.has_class(e.class_id)) extra_task[e.class_id] = e.task_id;
    auto task_of = [&](std::uint32_t c) -> std::uint32_t {
        if (registry.has_class(c)) return registry.task_of(c);
        auto it = extra_task.find(c);
        if (it == extra_task.end()) throw Error(ErrorKind::registry, "class " + std::to_string(c) + " is not registered");
        return it->second;
    };

    EvalReport report;
    std::map<std::uint32_t, std::size_t> position;
    for (const auto& t : registry.tasks()) {
        position[t.task_id] = report.task_ids.size();
        report.task_ids.push_back(t.task_id);
    }
    for (const auto& [c, t] : extra_task) {
        if (!position.count(t)) {
            position[t] = report.task_ids.size();
            report.task_ids.push_back(t);
        }
    }
    const std::size_t tasks = report.task_ids.size();
    report.task_confusion.assign(tasks, std::vector<std::size_t>(tasks, 0));
    std::vector<TaskEval> per(tasks);
    for (std::size_t i = 0; i < tasks; ++i) per[i].task_id = report.task_ids[i];

    for (std::size_t i = 0; i < test.size(); ++i) {
        const auto& r = test.records[i];
        const auto truth_task = task_of(r.class_id);
        const auto& p = predictions[i];
        const auto pred_task = task_of(p.class_id);
        auto& t = per[position.at(truth_task)];
        ++t.n;
        if (p.class_id == r.class_id) ++t.correct;
        if (pred_task == truth_task) ++t.task_correct;
        ++report.task_confusion[position.at(truth_task)][position.at(pred_task)];
        (p.route == Route::seen_fused ? report.seen_fused : report.unseen_direct) += 1;
    }
    for (auto& t : per) {
        report.n += t.n;
        report.correct += t.correct;
        report.task_correct += t.task_correct;
        if (t.n) report.per_task.push_back(t);
    }
    return report;
}

/// Predicts every test record (in parallel) and tallies accuracy, task recall,
/// route counts and the task confusion matrix.
inline EvalReport batch_eval(const EmbeddingSet& test, const AdapterState& adapter, const TextClassifier& text, const UnseenBank& bank,
                             const ClassRegistry& registry, const InferenceConfig& cfg) {
    for (std::size_t i = 0; i < test.size(); ++i) {
        const auto c = test.records[i].class_id;
        bool known = registry.has_class(c);
        for (const auto& e : bank.entries) known = known || e.class_id == c;
        if (!known) throw Error(ErrorKind::registry, "test record " + std::to_string(i) + " has unregistered class " + std::to_string(c));
    }
    std::vector<Prediction> predictions(test.size());
    parallel_for(test.size(), [&](std::size_t i) { predictions[i] = predict(test.records[i].vector, adapter, text, bank, cfg); });
    return evaluate_predictions(test, predictions, registry, bank);
}

inline nlohmann::json to_json(const EvalReport& r) {
    nlohmann::json per_task = nlohmann::json::object();
    for (const auto& t : r.per_task)
        per_task[std::to_string(t.task_id)] = {
            {"accuracy", t.accuracy()}, {"task_recall", t.task_recall()}, {"n", t.n}, {"correct", t.correct}, {"task_correct", t.task_correct}};
    return {
        {"per_task", per_task},
        {"overall", {{"accuracy", r.accuracy()}, {"task_recall", r.task_recall()}, {"n", r.n}}},
        {"route_counts", {{"seen_fused", r.seen_fused}, {"unseen_direct", r.unseen_direct}}},
        {"task_ids", r.task_ids},
        {"task_confusion", r.task_confusion},
    };
}

} // namespace lada
