#pragma once

#include <filesystem>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lada/checkpoint.hpp"
#include "lada/common.hpp"
#include "lada/inference.hpp"
#include "lada/metrics.hpp"
#include "lada/trainer.hpp"

namespace lada {

/// Everything a benchmark run depends on. Paths are kept as written; relative
/// ones resolve against `base_dir` (the directory of the config file).
struct RunConfig {
    TrainConfig train;
    InferenceConfig inference;
    std::string registry_file;
    std::vector<std::string> train_files;
    std::string test_file;
    std::string text_file;
    std::string unseen_text_file;
    std::string out_dir;
    bool save_checkpoints = true;

    std::filesystem::path base_dir;

    std::filesystem::path resolve(const std::string& p) const {
        const std::filesystem::path path(p);
        return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
    }

    void validate() const {
        train.validate();
        inference.validate();
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double out = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw Error(ErrorKind::parameter, key + ": '" + v + "' is not a number");
    }
}

inline unsigned long long parse_unsigned(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        if (!v.empty() && v.front() == '-') throw std::invalid_argument(v);
        const auto out = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw Error(ErrorKind::parameter, key + ": '" + v + "' is not a non-negative integer");
    }
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw Error(ErrorKind::parameter, key + ": '" + v + "' is not a boolean");
}

inline std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ','))
        if (auto t = trim(item); !t.empty()) out.push_back(t);
    return out;
}

} // namespace detail

/// Applies one `key = value` setting. Unknown keys are rejected.
inline void apply_setting(RunConfig& c, const std::string& key, const std::string& value) {
    using namespace detail;
    auto& t = c.train;
    if (key == "seed") t.seed = parse_unsigned(key, value);
    else if (key == "epochs") t.epochs = static_cast<int>(parse_unsigned(key, value));
    else if (key == "lr") t.lr = parse_double(key, value);
    else if (key == "weight_decay") t.weight_decay = parse_double(key, value);
    else if (key == "batch_size") t.batch_size = parse_unsigned(key, value);
    else if (key == "loss_mode") t.loss_mode = loss_mode_from_string(value);
    else if (key == "replay_mode") t.replay_mode = replay_mode_from_string(value);
    else if (key == "beta") t.beta = parse_double(key, value);
    else if (key == "lambda1") t.lambda1 = parse_unsigned(key, value);
    else if (key == "lambda2") t.lambda2 = parse_unsigned(key, value);
    else if (key == "logit_scale") t.logit_scale = parse_double(key, value);
    else if (key == "adam_beta1") t.adam_beta1 = parse_double(key, value);
    else if (key == "adam_beta2") t.adam_beta2 = parse_double(key, value);
    else if (key == "adam_eps") t.adam_eps = parse_double(key, value);
    else if (key == "var_floor") t.var_floor = parse_double(key, value);
    else if (key == "use_text") t.use_text = parse_bool(key, value);
    else if (key == "use_lada") t.use_lada = parse_bool(key, value);
    else if (key == "alpha") c.inference.alpha = parse_double(key, value);
    else if (key == "registry_file") c.registry_file = value;
    else if (key == "train_files") c.train_files = split_list(value);
    else if (key == "test_file") c.test_file = value;
    else if (key == "text_file") c.text_file = value;
    else if (key == "unseen_text_file") c.unseen_text_file = value;
    else if (key == "out_dir") c.out_dir = value;
    else if (key == "save_checkpoints") c.save_checkpoints = parse_bool(key, value);
    else throw Error(ErrorKind::parameter, "unknown config key '" + key + "'");
}

/// Parses "key = value" lines; '#' starts a comment.
inline RunConfig parse_run_config(const std::string& text, RunConfig c = {}) {
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw Error(ErrorKind::parameter, "line " + std::to_string(lineno) + ": expected key = value");
        apply_setting(c, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
    }
    return c;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
    const auto bytes = detail::read_file(path);
    RunConfig c;
    c.base_dir = path.parent_path();
    return parse_run_config(std::string(bytes.begin(), bytes.end()), c);
}

/// Every setting in a fixed order; also the checkpoint and summary echo.
inline ConfigEcho to_key_values(const RunConfig& c) {
    const auto& t = c.train;
    auto b = [](bool v) { return std::string(v ? "true" : "false"); };
    std::string files;
    for (const auto& f : c.train_files) files += (files.empty() ? "" : ",") + f;
    return {
        {"seed", std::to_string(t.seed)},
        {"epochs", std::to_string(t.epochs)},
        {"lr", format_double(t.lr)},
        {"weight_decay", format_double(t.weight_decay)},
        {"batch_size", std::to_string(t.batch_size)},
        {"loss_mode", to_string(t.loss_mode)},
        {"replay_mode", to_string(t.replay_mode)},
        {"beta", format_double(t.beta)},
        {"lambda1", std::to_string(t.lambda1)},
        {"lambda2", std::to_string(t.lambda2)},
        {"logit_scale", format_double(t.logit_scale)},
        {"adam_beta1", format_double(t.adam_beta1)},
        {"adam_beta2", format_double(t.adam_beta2)},
        {"adam_eps", format_double(t.adam_eps)},
        {"var_floor", format_double(t.var_floor)},
        {"use_text", b(t.use_text)},
        {"use_lada", b(t.use_lada)},
        {"alpha", format_double(c.inference.alpha)},
        {"registry_file", c.registry_file},
        {"train_files", files},
        {"test_file", c.test_file},
        {"text_file", c.text_file},
        {"unseen_text_file", c.unseen_text_file},
        {"out_dir", c.out_dir},
        {"save_checkpoints", b(c.save_checkpoints)},
    };
}

inline std::string to_config_text(const RunConfig& c) {
    std::string out;
    for (const auto& [k, v] : to_key_values(c)) out += k + " = " + v + "\n";
    return out;
}

} // namespace lada
