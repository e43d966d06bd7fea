#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "lada/common.hpp"
#include "lada/stats.hpp"

namespace lada {

/// Spherical GMM summary of one learned class's training features.
struct ClassPrototypes {
    std::uint32_t task_id = 0;
    std::uint32_t class_id = 0;
    std::vector<GmmComponent> components;

    bool operator==(const ClassPrototypes&) const = default;
};

struct PrototypeSet {
    std::size_t lambda2 = 4;
    std::vector<ClassPrototypes> classes;

    bool empty() const noexcept { return classes.empty(); }
    std::size_t component_count() const {
        std::size_t n = 0;
        for (const auto& c : classes) n += c.components.size();
        return n;
    }

    bool operator==(const PrototypeSet&) const = default;
};

enum class ReplayMode { augmented, plain };

inline const char* to_string(ReplayMode m) { return m == ReplayMode::augmented ? "augmented" : "plain"; }

inline ReplayMode replay_mode_from_string(const std::string& s) {
    if (s == "augmented") return ReplayMode::augmented;
    if (s == "plain") return ReplayMode::plain;
    throw Error(ErrorKind::parameter, "unknown replay mode '" + s + "'");
}

struct ReplayEntry {
    Vec vector;
    std::uint32_t class_id = 0;
    double weight = 0.0;
};

inline ClassPrototypes distill_class(std::span<const Vec> features, std::uint32_t task_id, std::uint32_t class_id, std::size_t lambda2,
                                     std::uint64_t seed, double var_floor = 1e-6) {
    if (lambda2 < 1) throw Error(ErrorKind::parameter, "lambda2 must be >= 1");
    if (features.empty()) throw Error(ErrorKind::empty_input, "class " + std::to_string(class_id) + " has no features to distill");
    GmmOptions opt;
    opt.var_floor = var_floor;
    auto model = gmm_fit_spherical(features, std::min(lambda2, features.size()), seed, opt);
    return {task_id, class_id, std::move(model.components)};
}

/// Mean plus isotropic Gaussian noise scaled by sqrt(Tr(Sigma)/d) = sqrt(variance).
inline Vec augment(const ClassPrototypes& proto, std::size_t component, std::mt19937_64& rng) {
    if (component >= proto.components.size())
        throw Error(ErrorKind::parameter, "component " + std::to_string(component) + " out of range for class " + std::to_string(proto.class_id));
    const auto& c = proto.components[component];
    const double scale = std::sqrt(c.variance);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec out = c.mean;
    for (auto& x : out) x += gauss(rng) * scale;
    return out;
}

/// One entry per (class, component). Augmented entries are weighted by the
/// mixture weight, plain entries by 1 / component count.
inline std::vector<ReplayEntry> replay_batch(const PrototypeSet& set, std::mt19937_64& rng, ReplayMode mode) {
    std::vector<ReplayEntry> out;
    out.reserve(set.component_count());
    for (const auto& cls : set.classes) {
        const double uniform = 1.0 / static_cast<double>(cls.components.size());
        for (std::size_t l = 0; l < cls.components.size(); ++l) {
            if (mode == ReplayMode::augmented)
                out.push_back({augment(cls, l, rng), cls.class_id, cls.components[l].weight});
            else
                out.push_back({cls.components[l].mean, cls.class_id, uniform});
        }
    }
    return out;
}

/// Adds a freshly learned task's prototypes; existing classes are never re-distilled.
inline PrototypeSet add_prototypes(PrototypeSet set, std::vector<ClassPrototypes> protos) {
    for (const auto& p : protos) {
        for (const auto& c : set.classes)
            if (c.class_id == p.class_id) throw Error(ErrorKind::state, "class " + std::to_string(p.class_id) + " is already distilled");
        set.classes.push_back(p);
    }
    return set;
}

} // namespace lada
