#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "lada/common.hpp"
#include "lada/embedding_store.hpp"

namespace lada {

struct TextEntry {
    std::uint32_t task_id = 0;
    std::uint32_t class_id = 0;
    Vec vector;
    bool frozen = false;

    bool operator==(const TextEntry&) const = default;
};

/// Text-feature classifier over seen classes. Entries follow registry order;
/// vectors of completed tasks are frozen, the current task's are trainable.
struct TextClassifier {
    std::vector<TextEntry> entries;
    double logit_scale = 100.0;

    std::size_t class_count() const noexcept { return entries.size(); }
    std::size_t dimension() const { return entries.empty() ? 0 : entries.front().vector.size(); }

    std::vector<std::uint32_t> class_ids() const {
        std::vector<std::uint32_t> out;
        for (const auto& e : entries) out.push_back(e.class_id);
        return out;
    }

    bool operator==(const TextClassifier&) const = default;
};

/// Vanilla text vectors of the classes not learned yet.
struct UnseenBank {
    std::vector<TextEntry> entries;

    bool empty() const noexcept { return entries.empty(); }
    std::size_t class_count() const noexcept { return entries.size(); }

    std::vector<std::uint32_t> class_ids() const {
        std::vector<std::uint32_t> out;
        for (const auto& e : entries) out.push_back(e.class_id);
        return out;
    }

    bool operator==(const UnseenBank&) const = default;
};

namespace detail {

inline std::map<std::uint32_t, const EmbeddingRecord*> index_by_class(const EmbeddingSet& set) {
    std::map<std::uint32_t, const EmbeddingRecord*> out;
    for (const auto& r : set.records) {
        if (!out.emplace(r.class_id, &r).second)
            throw Error(ErrorKind::registry, "class " + std::to_string(r.class_id) + " has more than one text record");
    }
    return out;
}

inline std::vector<TextEntry> text_entries(const std::map<std::uint32_t, const EmbeddingRecord*>& index, const ClassRegistry& registry,
                                           const TaskDescriptor& task) {
    std::vector<TextEntry> out;
    for (auto c : task.class_ids) {
        auto it = index.find(c);
        if (it == index.end())
            throw Error(ErrorKind::registry, "no text embedding for class " + std::to_string(c) + " (" + registry.name_of(c) + ")");
        out.push_back({task.task_id, c, normalized(it->second->vector), false});
    }
    return out;
}

} // namespace detail

/// Classifier over every registered class, all unfrozen.
inline TextClassifier init_from_embeddings(const EmbeddingSet& text_set, const ClassRegistry& registry, double logit_scale = 100.0) {
    if (!(logit_scale > 0.0)) throw Error(ErrorKind::parameter, "logit scale must be positive");
    const auto index = detail::index_by_class(text_set);
    TextClassifier clf;
    clf.logit_scale = logit_scale;
    for (const auto& t : registry.tasks()) {
        auto entries = detail::text_entries(index, registry, t);
        clf.entries.insert(clf.entries.end(), entries.begin(), entries.end());
    }
    return clf;
}

/// Appends the vanilla vectors of one task's classes as trainable entries.
inline TextClassifier add_task(TextClassifier clf, const EmbeddingSet& text_set, const ClassRegistry& registry, std::uint32_t task_id) {
    const auto& task = registry.task(task_id);
    for (const auto& e : clf.entries)
        if (e.task_id == task_id) throw Error(ErrorKind::registry, "task " + std::to_string(task_id) + " already in the text head");
    auto entries = detail::text_entries(detail::index_by_class(text_set), registry, task);
    if (!clf.entries.empty() && !entries.empty() && entries.front().vector.size() != clf.dimension())
        throw Error(ErrorKind::shape, "text embeddings of task " + std::to_string(task_id) + " have the wrong dimension");
    clf.entries.insert(clf.entries.end(), entries.begin(), entries.end());
    return clf;
}

/// Vanilla vectors for the classes of every task still marked unseen, plus any
/// extra classes present only in `extra` (e.g. an out-of-registry unseen set).
inline UnseenBank make_unseen_bank(const EmbeddingSet& text_set, const ClassRegistry& registry, const EmbeddingSet* extra = nullptr) {
    UnseenBank bank;
    const auto index = detail::index_by_class(text_set);
    for (const auto& t : registry.tasks()) {
        if (t.status != TaskStatus::unseen) continue;
        auto entries = detail::text_entries(index, registry, t);
        for (auto& e : entries) e.frozen = true;
        bank.entries.insert(bank.entries.end(), entries.begin(), entries.end());
    }
    if (extra) {
        for (const auto& r : extra->records) {
            if (registry.has_class(r.class_id))
                throw Error(ErrorKind::registry, "extra unseen class " + std::to_string(r.class_id) + " collides with a registered class");
            bank.entries.push_back({r.task_id, r.class_id, normalized(r.vector), true});
        }
    }
    return bank;
}

/// Scaled inner products s * <x, t>: seen classes in classifier order, then
/// the unseen bank.
inline Vec text_logits(const TextClassifier& clf, const UnseenBank& bank, std::span<const double> x) {
    Vec out;
    out.reserve(clf.entries.size() + bank.entries.size());
    auto add = [&](const TextEntry& e) {
        if (e.vector.size() != x.size())
            throw Error(ErrorKind::shape, "input has dimension " + std::to_string(x.size()) + ", text vector of class " +
                                              std::to_string(e.class_id) + " has " + std::to_string(e.vector.size()));
        out.push_back(clf.logit_scale * dot(x, e.vector));
    };
    for (const auto& e : clf.entries) add(e);
    for (const auto& e : bank.entries) add(e);
    return out;
}

inline Vec text_logits(const TextClassifier& clf, std::span<const double> x) { return text_logits(clf, UnseenBank{}, x); }

inline TextClassifier complete_task(TextClassifier clf, std::uint32_t task_id) {
    bool found = false;
    for (auto& e : clf.entries) {
        if (e.task_id == task_id) {
            e.frozen = true;
            found = true;
        }
    }
    if (!found) throw Error(ErrorKind::registry, "text head has no classes of task " + std::to_string(task_id));
    return clf;
}

} // namespace lada
