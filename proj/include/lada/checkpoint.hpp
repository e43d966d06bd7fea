#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lada/common.hpp"
#include "lada/embedding_store.hpp"
#include "lada/trainer.hpp"

namespace lada {

inline constexpr const char* checkpoint_format = "lada-checkpoint";
inline constexpr int checkpoint_version = 1;

using ConfigEcho = std::vector<std::pair<std::string, std::string>>;

struct Checkpoint {
    ModelState model;
    /// Vanilla text vectors of the classes still unseen when the checkpoint was taken.
    UnseenBank unseen;
    ConfigEcho config;
};

struct EncodedCheckpoint {
    std::string manifest;
    std::vector<char> tensors;
};

namespace detail {

class TensorWriter {
public:
    std::string add(const std::string& name, std::size_t rows, std::size_t cols, std::span<const double> values) {
        index_.push_back({{"name", name}, {"offset", bytes_.size()}, {"shape", {rows, cols}}, {"dtype", "f32"}});
        for (double v : values) put_le(bytes_, static_cast<float>(v));
        return name;
    }
    nlohmann::ordered_json index() const { return index_; }
    std::vector<char> take() { return std::move(bytes_); }

private:
    nlohmann::ordered_json index_ = nlohmann::ordered_json::array();
    std::vector<char> bytes_;
};

struct TensorView {
    std::size_t rows = 0, cols = 0;
    Vec values;
};

class TensorReader {
public:
    TensorReader(const nlohmann::ordered_json& index, const std::vector<char>& bytes) {
        std::size_t expected = 0;
        for (const auto& t : index) {
            const auto name = t.at("name").get<std::string>();
            const auto offset = t.at("offset").get<std::size_t>();
            const auto shape = t.at("shape").get<std::vector<std::size_t>>();
            if (t.at("dtype").get<std::string>() != "f32") throw Error(ErrorKind::integrity, "tensor " + name + " has unsupported dtype");
            if (shape.size() != 2) throw Error(ErrorKind::integrity, "tensor " + name + " is not two-dimensional");
            if (offset != expected) throw Error(ErrorKind::integrity, "tensor " + name + " is not at its expected offset");
            const std::size_t count = shape[0] * shape[1];
            if (offset + 4 * count > bytes.size()) throw Error(ErrorKind::integrity, "tensor " + name + " runs past the end of tensors.bin");
            TensorView v{shape[0], shape[1], Vec(count)};
            for (std::size_t i = 0; i < count; ++i) v.values[i] = get_le<float>(bytes.data() + offset + 4 * i);
            if (!tensors_.emplace(name, std::move(v)).second) throw Error(ErrorKind::integrity, "duplicate tensor " + name);
            expected = offset + 4 * count;
        }
        if (expected != bytes.size()) throw Error(ErrorKind::integrity, "tensors.bin size does not match the manifest");
    }

    const TensorView& get(const std::string& name, std::size_t cols) const {
        auto it = tensors_.find(name);
        if (it == tensors_.end()) throw Error(ErrorKind::integrity, "missing tensor " + name);
        if (it->second.cols != cols) throw Error(ErrorKind::integrity, "tensor " + name + " has the wrong width");
        return it->second;
    }

private:
    std::map<std::string, TensorView> tensors_;
};

inline std::size_t checkpoint_dimension(const Checkpoint& c) {
    if (!c.model.text.entries.empty()) return c.model.text.dimension();
    if (!c.model.adapter.empty()) return c.model.adapter.dimension();
    if (!c.unseen.entries.empty()) return c.unseen.entries.front().vector.size();
    return 0;
}

} // namespace detail

inline EncodedCheckpoint encode_checkpoint(const Checkpoint& c) {
    using json = nlohmann::ordered_json;
    detail::TensorWriter tw;
    const std::size_t d = detail::checkpoint_dimension(c);

    json config = json::object();
    for (const auto& [k, v] : c.config) config[k] = v;

    json tasks = json::array();
    for (const auto& t : c.model.registry.tasks()) {
        json names = json::array();
        for (auto id : t.class_ids) names.push_back(c.model.registry.name_of(id));
        tasks.push_back({{"task_id", t.task_id}, {"class_ids", t.class_ids}, {"names", names}, {"status", to_string(t.status)}});
    }

    json blocks = json::array();
    for (const auto& b : c.model.adapter.blocks) {
        const auto name = tw.add("adapter/" + std::to_string(b.class_id), b.weights.rows, b.weights.cols, b.weights.data);
        blocks.push_back({{"task_id", b.task_id}, {"class_id", b.class_id}, {"frozen", b.frozen}, {"tensor", name}});
    }
    json text = json::array();
    for (const auto& e : c.model.text.entries) {
        const auto name = tw.add("text/" + std::to_string(e.class_id), 1, e.vector.size(), e.vector);
        text.push_back({{"task_id", e.task_id}, {"class_id", e.class_id}, {"frozen", e.frozen}, {"tensor", name}});
    }
    json unseen = json::array();
    for (const auto& e : c.unseen.entries) {
        const auto name = tw.add("unseen/" + std::to_string(e.class_id), 1, e.vector.size(), e.vector);
        unseen.push_back({{"task_id", e.task_id}, {"class_id", e.class_id}, {"tensor", name}});
    }
    json protos = json::array();
    for (const auto& p : c.model.prototypes.classes) {
        json comps = json::array();
        for (std::size_t l = 0; l < p.components.size(); ++l) {
            const auto& comp = p.components[l];
            const auto name = tw.add("prototype/" + std::to_string(p.class_id) + "/" + std::to_string(l), 1, comp.mean.size(), comp.mean);
            comps.push_back({{"weight", comp.weight}, {"variance", comp.variance}, {"tensor", name}});
        }
        protos.push_back({{"task_id", p.task_id}, {"class_id", p.class_id}, {"components", comps}});
    }

    json manifest = {
        {"format", checkpoint_format},
        {"version", checkpoint_version},
        {"d", d},
        {"config", config},
        {"registry", {{"tasks", tasks}}},
        {"adapter", {{"lambda1", c.model.adapter.config.lambda1}, {"beta", c.model.adapter.config.beta}, {"blocks", blocks}}},
        {"text", {{"logit_scale", c.model.text.logit_scale}, {"entries", text}}},
        {"unseen_bank", {{"entries", unseen}}},
        {"prototypes", {{"lambda2", c.model.prototypes.lambda2}, {"classes", protos}}},
        {"tensors", tw.index()},
    };
    return {manifest.dump(2) + "\n", tw.take()};
}

inline Checkpoint decode_checkpoint(const EncodedCheckpoint& enc) {
    using json = nlohmann::ordered_json;
    json m;
    try {
        m = json::parse(enc.manifest);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::integrity, std::string("unreadable manifest: ") + e.what());
    }
    try {
        if (m.at("format").get<std::string>() != checkpoint_format) throw Error(ErrorKind::incompatible, "not a checkpoint manifest");
        const int version = m.at("version").get<int>();
        if (version != checkpoint_version)
            throw Error(ErrorKind::incompatible, "checkpoint version " + std::to_string(version) + ", expected " + std::to_string(checkpoint_version));
        const auto d = m.at("d").get<std::size_t>();
        detail::TensorReader tr(m.at("tensors"), enc.tensors);

        Checkpoint c;
        for (const auto& [k, v] : m.at("config").items()) c.config.emplace_back(k, v.get<std::string>());
        for (const auto& t : m.at("registry").at("tasks")) {
            const auto id = t.at("task_id").get<std::uint32_t>();
            c.model.registry.add_task(id, t.at("class_ids").get<std::vector<std::uint32_t>>(), t.at("names").get<std::vector<std::string>>());
            c.model.registry.set_status(id, task_status_from_string(t.at("status").get<std::string>()));
        }
        const auto& a = m.at("adapter");
        c.model.adapter.config = {a.at("lambda1").get<std::size_t>(), a.at("beta").get<double>()};
        for (const auto& b : a.at("blocks")) {
            const auto& t = tr.get(b.at("tensor").get<std::string>(), d);
            LabelMemoryBlock block{b.at("task_id").get<std::uint32_t>(), b.at("class_id").get<std::uint32_t>(), Matrix(t.rows, t.cols),
                                   b.at("frozen").get<bool>()};
            block.weights.data = t.values;
            c.model.adapter.blocks.push_back(std::move(block));
        }
        const auto& tx = m.at("text");
        c.model.text.logit_scale = tx.at("logit_scale").get<double>();
        for (const auto& e : tx.at("entries"))
            c.model.text.entries.push_back({e.at("task_id").get<std::uint32_t>(), e.at("class_id").get<std::uint32_t>(),
                                            tr.get(e.at("tensor").get<std::string>(), d).values, e.at("frozen").get<bool>()});
        for (const auto& e : m.at("unseen_bank").at("entries"))
            c.unseen.entries.push_back({e.at("task_id").get<std::uint32_t>(), e.at("class_id").get<std::uint32_t>(),
                                        tr.get(e.at("tensor").get<std::string>(), d).values, true});
        const auto& p = m.at("prototypes");
        c.model.prototypes.lambda2 = p.at("lambda2").get<std::size_t>();
        for (const auto& cls : p.at("classes")) {
            ClassPrototypes cp{cls.at("task_id").get<std::uint32_t>(), cls.at("class_id").get<std::uint32_t>(), {}};
            for (const auto& comp : cls.at("components"))
                cp.components.push_back({comp.at("weight").get<double>(), tr.get(comp.at("tensor").get<std::string>(), d).values,
                                         comp.at("variance").get<double>()});
            c.model.prototypes.classes.push_back(std::move(cp));
        }
        return c;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::integrity, std::string("malformed manifest: ") + e.what());
    }
}

inline void save_checkpoint(const Checkpoint& c, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::io, "cannot create " + dir.string() + ": " + ec.message());
    const auto enc = encode_checkpoint(c);
    detail::write_file(dir / "tensors.bin", enc.tensors);
    detail::write_text_file(dir / "manifest.json", enc.manifest);
}

inline Checkpoint load_checkpoint(const std::filesystem::path& dir) {
    const auto manifest = detail::read_file(dir / "manifest.json");
    return decode_checkpoint({std::string(manifest.begin(), manifest.end()), detail::read_file(dir / "tensors.bin")});
}

} // namespace lada
