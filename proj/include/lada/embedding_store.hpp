#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "lada/common.hpp"

namespace lada {

// ---------------------------------------------------------------------------
// Records and sets
// ---------------------------------------------------------------------------

struct EmbeddingRecord {
    std::uint32_t task_id = 0;
    std::uint32_t class_id = 0;
    Vec vector;

    bool operator==(const EmbeddingRecord&) const = default;
};

struct EmbeddingSet {
    std::uint32_t dimension = 0;
    std::vector<EmbeddingRecord> records;
    bool normalized = false;

    bool operator==(const EmbeddingSet&) const = default;

    std::size_t size() const noexcept { return records.size(); }
    bool empty() const noexcept { return records.empty(); }
};

/// Vectors of one class, in on-disk order.
inline std::vector<Vec> vectors_of_class(const EmbeddingSet& set, std::uint32_t class_id) {
    std::vector<Vec> out;
    for (const auto& r : set.records)
        if (r.class_id == class_id) out.push_back(r.vector);
    return out;
}

inline EmbeddingSet normalize_set(const EmbeddingSet& set) {
    EmbeddingSet out = set;
    for (std::size_t i = 0; i < out.records.size(); ++i) {
        auto& v = out.records[i].vector;
        const double n = std::sqrt(squared_norm(v));
        if (!(n > 0.0) || !std::isfinite(n))
            throw Error(ErrorKind::degenerate_input, "record " + std::to_string(i) + " has a zero or non-finite vector");
        for (auto& x : v) x /= n;
    }
    out.normalized = true;
    return out;
}

// ---------------------------------------------------------------------------
// LSE binary format
//
//   "LSE1" | version u32 = 1 | d u32 | n u64 | n x {task u32 | class u32 | d x f32}
//
// All integers and floats are little-endian.
// ---------------------------------------------------------------------------

inline constexpr char lse_magic[4] = {'L', 'S', 'E', '1'};
inline constexpr std::uint32_t lse_version = 1;
inline constexpr std::size_t lse_header_bytes = 4 + 4 + 4 + 8;

namespace detail {

template <typename T>
void put_le(std::vector<char>& out, T value) {
    using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
    const U bits = std::bit_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xffu));
}

template <typename T>
T get_le(const char* p) {
    using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
    U bits = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) bits |= static_cast<U>(static_cast<unsigned char>(p[i])) << (8 * i);
    return std::bit_cast<T>(bits);
}

inline std::vector<char> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
    return std::vector<char>(std::istreambuf_iterator<char>(in), {});
}

inline void write_file(const std::filesystem::path& path, const std::vector<char>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::io, "cannot open " + path.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorKind::io, "write failed for " + path.string());
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    write_file(path, std::vector<char>(text.begin(), text.end()));
}

} // namespace detail

inline std::vector<char> encode_lse(const EmbeddingSet& set) {
    if (set.empty() || set.dimension == 0) throw Error(ErrorKind::empty_input, "cannot serialize an empty embedding set");
    std::vector<char> out;
    out.reserve(lse_header_bytes + set.size() * (8 + 4 * std::size_t{set.dimension}));
    for (char c : lse_magic) out.push_back(c);
    detail::put_le(out, lse_version);
    detail::put_le(out, set.dimension);
    detail::put_le(out, static_cast<std::uint64_t>(set.size()));
    for (std::size_t i = 0; i < set.size(); ++i) {
        const auto& r = set.records[i];
        if (r.vector.size() != set.dimension)
            throw Error(ErrorKind::shape, "record " + std::to_string(i) + " has length " + std::to_string(r.vector.size()) +
                                              ", expected " + std::to_string(set.dimension));
        detail::put_le(out, r.task_id);
        detail::put_le(out, r.class_id);
        for (double x : r.vector) detail::put_le(out, static_cast<float>(x));
    }
    return out;
}

inline EmbeddingSet decode_lse(const std::vector<char>& bytes) {
    if (bytes.size() < 4 || std::memcmp(bytes.data(), lse_magic, 4) != 0) throw Error(ErrorKind::format, "missing LSE1 magic");
    if (bytes.size() < lse_header_bytes) throw Error(ErrorKind::corruption, "truncated LSE header");
    const char* p = bytes.data() + 4;
    const auto version = detail::get_le<std::uint32_t>(p);
    if (version != lse_version) throw Error(ErrorKind::format, "unsupported LSE version " + std::to_string(version));
    EmbeddingSet set;
    set.dimension = detail::get_le<std::uint32_t>(p + 4);
    const auto n = detail::get_le<std::uint64_t>(p + 8);
    if (set.dimension == 0 || n == 0) throw Error(ErrorKind::empty_input, "LSE header declares d=0 or n=0");
    const std::uint64_t record_bytes = 8 + 4 * std::uint64_t{set.dimension};
    const std::uint64_t payload = bytes.size() - lse_header_bytes;
    if (n > payload / record_bytes) throw Error(ErrorKind::corruption, "payload shorter than the " + std::to_string(n) + " declared records");
    if (payload != n * record_bytes) throw Error(ErrorKind::corruption, "trailing bytes after the declared records");
    set.records.resize(n);
    p = bytes.data() + lse_header_bytes;
    for (auto& r : set.records) {
        r.task_id = detail::get_le<std::uint32_t>(p);
        r.class_id = detail::get_le<std::uint32_t>(p + 4);
        p += 8;
        r.vector.resize(set.dimension);
        for (auto& x : r.vector) {
            x = detail::get_le<float>(p);
            p += 4;
        }
    }
    return set;
}

inline EmbeddingSet load_lse(const std::filesystem::path& path) {
    try {
        return decode_lse(detail::read_file(path));
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::io) throw;
        throw Error(e.kind(), path.string() + ": " + e.detail());
    }
}

inline void save_lse(const EmbeddingSet& set, const std::filesystem::path& path) { detail::write_file(path, encode_lse(set)); }

// ---------------------------------------------------------------------------
// Class registry
// ---------------------------------------------------------------------------

enum class TaskStatus { unseen, current, learned };

inline const char* to_string(TaskStatus s) {
    switch (s) {
    case TaskStatus::unseen: return "unseen";
    case TaskStatus::current: return "current";
    case TaskStatus::learned: return "learned";
    }
    return "unseen";
}

inline TaskStatus task_status_from_string(const std::string& s) {
    if (s == "unseen") return TaskStatus::unseen;
    if (s == "current") return TaskStatus::current;
    if (s == "learned") return TaskStatus::learned;
    throw Error(ErrorKind::format, "unknown task status '" + s + "'");
}

struct TaskDescriptor {
    std::uint32_t task_id = 0;
    std::vector<std::uint32_t> class_ids;
    TaskStatus status = TaskStatus::unseen;

    bool operator==(const TaskDescriptor&) const = default;
};

/// Tasks in learning order. Class ids are globally unique across tasks.
class ClassRegistry {
public:
    ClassRegistry() = default;

    void add_task(std::uint32_t task_id, std::vector<std::uint32_t> class_ids, std::vector<std::string> names = {}) {
        if (find_task(task_id)) throw Error(ErrorKind::registry, "duplicate task id " + std::to_string(task_id));
        if (!names.empty() && names.size() != class_ids.size())
            throw Error(ErrorKind::registry, "task " + std::to_string(task_id) + ": names and class_ids differ in length");
        for (std::size_t i = 0; i < class_ids.size(); ++i) {
            const auto c = class_ids[i];
            if (task_of_.count(c)) throw Error(ErrorKind::registry, "class " + std::to_string(c) + " registered twice");
            task_of_[c] = task_id;
            name_of_[c] = names.empty() ? "class_" + std::to_string(c) : names[i];
        }
        tasks_.push_back({task_id, std::move(class_ids), TaskStatus::unseen});
    }

    const std::vector<TaskDescriptor>& tasks() const noexcept { return tasks_; }
    std::size_t task_count() const noexcept { return tasks_.size(); }
    std::size_t class_count() const noexcept { return task_of_.size(); }

    const TaskDescriptor* find_task(std::uint32_t task_id) const {
        for (const auto& t : tasks_)
            if (t.task_id == task_id) return &t;
        return nullptr;
    }

    const TaskDescriptor& task(std::uint32_t task_id) const {
        if (auto* t = find_task(task_id)) return *t;
        throw Error(ErrorKind::registry, "unknown task " + std::to_string(task_id));
    }

    /// 0-based position of a task in learning order.
    std::size_t position_of(std::uint32_t task_id) const {
        for (std::size_t i = 0; i < tasks_.size(); ++i)
            if (tasks_[i].task_id == task_id) return i;
        throw Error(ErrorKind::registry, "unknown task " + std::to_string(task_id));
    }

    bool has_class(std::uint32_t class_id) const { return task_of_.count(class_id) != 0; }

    std::uint32_t task_of(std::uint32_t class_id) const {
        auto it = task_of_.find(class_id);
        if (it == task_of_.end()) throw Error(ErrorKind::registry, "unregistered class " + std::to_string(class_id));
        return it->second;
    }

    const std::string& name_of(std::uint32_t class_id) const {
        auto it = name_of_.find(class_id);
        if (it == name_of_.end()) throw Error(ErrorKind::registry, "unregistered class " + std::to_string(class_id));
        return it->second;
    }

    TaskStatus status_of(std::uint32_t task_id) const { return task(task_id).status; }

    void set_status(std::uint32_t task_id, TaskStatus status) {
        auto it = std::find_if(tasks_.begin(), tasks_.end(), [&](const TaskDescriptor& t) { return t.task_id == task_id; });
        if (it == tasks_.end()) throw Error(ErrorKind::registry, "unknown task " + std::to_string(task_id));
        if (status == TaskStatus::current)
            for (const auto& other : tasks_)
                if (other.status == TaskStatus::current && other.task_id != task_id)
                    throw Error(ErrorKind::state, "task " + std::to_string(other.task_id) + " is already current");
        it->status = status;
    }

    std::optional<std::uint32_t> current_task() const {
        for (const auto& t : tasks_)
            if (t.status == TaskStatus::current) return t.task_id;
        return std::nullopt;
    }

    /// Class ids of tasks with the given status, in registry order.
    std::vector<std::uint32_t> classes_with_status(TaskStatus status) const {
        std::vector<std::uint32_t> out;
        for (const auto& t : tasks_)
            if (t.status == status) out.insert(out.end(), t.class_ids.begin(), t.class_ids.end());
        return out;
    }

    std::vector<std::uint32_t> all_classes() const {
        std::vector<std::uint32_t> out;
        for (const auto& t : tasks_) out.insert(out.end(), t.class_ids.begin(), t.class_ids.end());
        return out;
    }

    bool operator==(const ClassRegistry&) const = default;

private:
    std::vector<TaskDescriptor> tasks_;
    std::map<std::uint32_t, std::uint32_t> task_of_;
    std::map<std::uint32_t, std::string> name_of_;
};

/// Every record's (task, class) pair must be registered; orphans are rejected.
inline void check_registered(const EmbeddingSet& set, const ClassRegistry& registry) {
    for (std::size_t i = 0; i < set.size(); ++i) {
        const auto& r = set.records[i];
        if (!registry.has_class(r.class_id))
            throw Error(ErrorKind::registry, "record " + std::to_string(i) + ": class " + std::to_string(r.class_id) + " is not registered");
        if (registry.task_of(r.class_id) != r.task_id)
            throw Error(ErrorKind::registry, "record " + std::to_string(i) + ": class " + std::to_string(r.class_id) +
                                                 " belongs to task " + std::to_string(registry.task_of(r.class_id)) + ", not " +
                                                 std::to_string(r.task_id));
    }
}

inline nlohmann::json registry_to_json(const ClassRegistry& registry) {
    nlohmann::json tasks = nlohmann::json::array();
    for (const auto& t : registry.tasks()) {
        nlohmann::json names = nlohmann::json::array();
        for (auto c : t.class_ids) names.push_back(registry.name_of(c));
        tasks.push_back({{"task_id", t.task_id}, {"class_ids", t.class_ids}, {"names", names}});
    }
    return {{"tasks", tasks}};
}

inline ClassRegistry registry_from_json(const nlohmann::json& doc) {
    ClassRegistry registry;
    try {
        for (const auto& t : doc.at("tasks")) {
            std::vector<std::string> names;
            if (t.contains("names")) names = t.at("names").get<std::vector<std::string>>();
            registry.add_task(t.at("task_id").get<std::uint32_t>(), t.at("class_ids").get<std::vector<std::uint32_t>>(), names);
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::format, std::string("malformed registry document: ") + e.what());
    }
    return registry;
}

inline ClassRegistry load_registry(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::format, path.string() + ": " + e.what());
    }
    return registry_from_json(doc);
}

inline void save_registry(const ClassRegistry& registry, const std::filesystem::path& path) {
    detail::write_text_file(path, registry_to_json(registry).dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Synthetic task stream
// ---------------------------------------------------------------------------

struct SyntheticParams {
    std::uint64_t seed = 0;
    std::uint32_t tasks = 5;
    std::uint32_t classes_per_task = 10;
    std::uint32_t dimension = 64;
    std::uint32_t train_per_class = 32;
    std::uint32_t test_per_class = 20;
    /// Per-coordinate noise std is 1/separation; infinity gives noiseless samples.
    double separation = 8.0;
    /// Per-coordinate std of the perturbation applied to text embeddings.
    double text_noise = 0.15;
};

struct SyntheticStream {
    std::vector<EmbeddingSet> train; // one per task
    EmbeddingSet test;
    EmbeddingSet text;               // one record per class
    ClassRegistry registry;
};

/// Each class gets a random unit direction; samples are direction plus
/// isotropic Gaussian noise, projected back to the unit sphere. Text
/// embeddings are the direction perturbed by text_noise.
inline SyntheticStream gen_synthetic_stream(const SyntheticParams& p) {
    if (p.tasks == 0 || p.classes_per_task == 0 || p.dimension == 0 || p.train_per_class == 0 || p.test_per_class == 0)
        throw Error(ErrorKind::parameter, "task count, classes per task, dimension and sample counts must be >= 1");
    if (!(p.separation > 0.0)) throw Error(ErrorKind::parameter, "separation must be positive");
    if (!(p.text_noise >= 0.0)) throw Error(ErrorKind::parameter, "text noise must be non-negative");

    const double noise = std::isinf(p.separation) ? 0.0 : 1.0 / p.separation;
    std::mt19937_64 rng(p.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto draw = [&](std::uint32_t d) {
        Vec v(d);
        for (auto& x : v) x = gauss(rng);
        return v;
    };

    SyntheticStream out;
    out.test.dimension = out.text.dimension = p.dimension;
    std::uint32_t next_class = 0;
    for (std::uint32_t t = 0; t < p.tasks; ++t) {
        std::vector<std::uint32_t> ids;
        std::vector<Vec> directions;
        for (std::uint32_t c = 0; c < p.classes_per_task; ++c) {
            ids.push_back(next_class++);
            directions.push_back(normalized(draw(p.dimension)));
        }
        out.registry.add_task(t, ids);

        auto sample = [&](const Vec& dir, double scale) {
            Vec v = draw(p.dimension);
            for (std::uint32_t i = 0; i < p.dimension; ++i) v[i] = dir[i] + scale * v[i];
            return normalized(v);
        };

        EmbeddingSet train;
        train.dimension = p.dimension;
        for (std::size_t c = 0; c < ids.size(); ++c) {
            out.text.records.push_back({t, ids[c], sample(directions[c], p.text_noise)});
            for (std::uint32_t n = 0; n < p.train_per_class; ++n) train.records.push_back({t, ids[c], sample(directions[c], noise)});
            for (std::uint32_t n = 0; n < p.test_per_class; ++n) out.test.records.push_back({t, ids[c], sample(directions[c], noise)});
        }
        train.normalized = true;
        out.train.push_back(std::move(train));
    }
    out.test.normalized = out.text.normalized = true;
    return out;
}

} // namespace lada
