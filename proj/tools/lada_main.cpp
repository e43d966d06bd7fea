#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lada/lada.hpp"

namespace fs = std::filesystem;
using namespace lada;

namespace {

void apply_overrides(RunConfig& cfg, const std::vector<std::string>& sets) {
    for (const auto& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw Error(ErrorKind::parameter, "--set expects key=value, got '" + s + "'");
        apply_setting(cfg, detail::trim(s.substr(0, eq)), detail::trim(s.substr(eq + 1)));
    }
}

int cmd_gen_synthetic(const SyntheticParams& p, const fs::path& out) {
    const auto stream = gen_synthetic_stream(p);
    fs::create_directories(out);
    std::string train_files;
    for (std::size_t t = 0; t < stream.train.size(); ++t) {
        const auto name = "train_task_" + std::to_string(t) + ".lse";
        save_lse(stream.train[t], out / name);
        train_files += (train_files.empty() ? "" : ",") + name;
    }
    save_lse(stream.test, out / "test.lse");
    save_lse(stream.text, out / "text.lse");
    save_registry(stream.registry, out / "registry.json");
    detail::write_text_file(out / "benchmark.cfg", "registry_file = registry.json\ntrain_files = " + train_files +
                                                       "\ntest_file = test.lse\ntext_file = text.lse\nout_dir = run\n");
    std::cout << "wrote " << stream.train.size() << " tasks, " << stream.registry.class_count() << " classes, d=" << p.dimension << " to "
              << out.string() << "\n";
    return 0;
}

int cmd_run_benchmark(const fs::path& config, const std::string& out, const std::vector<std::string>& sets) {
    auto cfg = load_run_config(config);
    apply_overrides(cfg, sets);
    if (!out.empty()) cfg.out_dir = fs::absolute(out).string();
    if (cfg.out_dir.empty()) throw Error(ErrorKind::parameter, "no output directory (out_dir or --out)");
    const auto data = load_benchmark_data(cfg);
    const auto result = run_benchmark(cfg, data);
    std::cout << result.matrix.to_csv();
    std::cout << "transfer " << format_double(result.metrics.transfer.mean) << "  average " << format_double(result.metrics.average.mean)
              << "  last " << format_double(result.metrics.last.mean) << "\n";
    return 0;
}

int cmd_train(const fs::path& config, const std::string& resume, std::size_t tasks, const fs::path& out, const std::vector<std::string>& sets) {
    auto cfg = load_run_config(config);
    apply_overrides(cfg, sets);
    cfg.validate();
    const auto data = load_benchmark_data(cfg);
    ModelState model;
    if (!resume.empty()) {
        model = load_checkpoint(resume).model;
        if (model.registry.all_classes() != data.registry.all_classes())
            throw Error(ErrorKind::incompatible, "checkpoint registry differs from the configured registry");
    } else {
        model.registry = data.registry;
        for (const auto& t : data.registry.tasks()) model.registry.set_status(t.task_id, TaskStatus::unseen);
    }
    const auto reports = train_next_tasks(model, data, cfg.train, tasks);
    for (const auto& r : reports)
        std::cout << "task " << r.task_id << ": " << r.steps << " steps, final epoch loss "
                  << (r.epoch_losses.empty() ? std::string("n/a") : format_double(r.epoch_losses.back())) << "\n";
    save_checkpoint({model, current_unseen_bank(data, model.registry), to_key_values(cfg)}, out);
    std::cout << "checkpoint written to " << out.string() << "\n";
    return 0;
}

double config_alpha(const ConfigEcho& echo) {
    for (const auto& [k, v] : echo)
        if (k == "alpha") return detail::parse_double(k, v);
    return InferenceConfig{}.alpha;
}

int cmd_eval(const fs::path& ckpt_dir, const fs::path& test_file, std::optional<double> alpha, const std::string& out) {
    const auto ckpt = load_checkpoint(ckpt_dir);
    const auto test = normalize_set(load_lse(test_file));
    const auto d = detail::checkpoint_dimension(ckpt);
    if (test.dimension != d)
        throw Error(ErrorKind::shape, "test embeddings have d=" + std::to_string(test.dimension) + ", checkpoint has d=" + std::to_string(d));
    InferenceConfig inf{alpha ? *alpha : config_alpha(ckpt.config)};
    const auto report = batch_eval(test, ckpt.model.adapter, ckpt.model.text, ckpt.unseen, ckpt.model.registry, inf);
    const auto j = to_json(report);
    std::cout << j.dump(2) << "\n";
    if (!out.empty()) write_json(out, j);
    return 0;
}

int cmd_inspect(const fs::path& ckpt_dir) {
    const auto ckpt = load_checkpoint(ckpt_dir);
    const auto& m = ckpt.model;
    std::cout << "d = " << detail::checkpoint_dimension(ckpt) << "\n";
    std::cout << "adapter: " << m.adapter.blocks.size() << " blocks, " << m.adapter.parameter_count() << " parameters\n";
    std::cout << "tasks:\n";
    for (const auto& t : m.registry.tasks()) {
        std::size_t protos = 0;
        for (const auto& p : m.prototypes.classes)
            if (p.task_id == t.task_id) protos += p.components.size();
        std::cout << "  task " << t.task_id << "  " << to_string(t.status) << "  classes " << t.class_ids.size() << "  params "
                  << m.adapter.parameter_count(t.task_id) << "  prototypes " << protos << "\n";
    }
    std::cout << "unseen bank: " << ckpt.unseen.entries.size() << " classes\n";
    std::cout << "config:\n";
    for (const auto& [k, v] : ckpt.config) std::cout << "  " << k << " = " << v << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Continual learning in embedding space with label-specific memory blocks"};
    app.require_subcommand(1);

    SyntheticParams gen;
    std::string gen_out;
    auto* g = app.add_subcommand("gen-synthetic", "Write a synthetic task stream");
    g->add_option("--out", gen_out, "Output directory")->required();
    g->add_option("--seed", gen.seed, "Random seed");
    g->add_option("--tasks", gen.tasks, "Number of tasks")->check(CLI::PositiveNumber);
    g->add_option("--classes", gen.classes_per_task, "Classes per task")->check(CLI::PositiveNumber);
    g->add_option("--dim", gen.dimension, "Embedding dimension")->check(CLI::PositiveNumber);
    g->add_option("--train-per-class", gen.train_per_class, "Training samples per class")->check(CLI::PositiveNumber);
    g->add_option("--test-per-class", gen.test_per_class, "Test samples per class")->check(CLI::PositiveNumber);
    g->add_option("--separation", gen.separation, "Inverse noise scale (inf for noiseless)");
    g->add_option("--text-noise", gen.text_noise, "Noise on text embeddings");

    std::string config, out, resume, ckpt, test;
    std::vector<std::string> sets;
    std::size_t train_tasks = std::numeric_limits<std::size_t>::max();
    std::optional<double> alpha;

    auto* rb = app.add_subcommand("run-benchmark", "Learn every task in order and evaluate after each");
    rb->add_option("--config", config, "Run config file")->required()->check(CLI::ExistingFile);
    rb->add_option("--out", out, "Output directory (overrides out_dir)");
    rb->add_option("--set", sets, "Override a config value, key=value");

    auto* tr = app.add_subcommand("train", "Learn the next tasks and write a checkpoint");
    tr->add_option("--config", config, "Run config file")->required()->check(CLI::ExistingFile);
    tr->add_option("--out", out, "Checkpoint directory")->required();
    tr->add_option("--resume", resume, "Checkpoint to continue from")->check(CLI::ExistingDirectory);
    tr->add_option("--tasks", train_tasks, "Number of tasks to learn (default all remaining)")->check(CLI::PositiveNumber);
    tr->add_option("--set", sets, "Override a config value, key=value");

    auto* ev = app.add_subcommand("eval", "Evaluate a checkpoint on a test set");
    ev->add_option("--ckpt", ckpt, "Checkpoint directory")->required()->check(CLI::ExistingDirectory);
    ev->add_option("--test", test, "Test embeddings")->required()->check(CLI::ExistingFile);
    ev->add_option("--alpha", alpha, "Fusion weight of the LADA logits")->check(CLI::Range(0.0, 1.0));
    ev->add_option("--out", out, "Write the report JSON here");

    auto* in = app.add_subcommand("inspect", "Summarize a checkpoint");
    in->add_option("--ckpt", ckpt, "Checkpoint directory")->required()->check(CLI::ExistingDirectory);

    CLI11_PARSE(app, argc, argv);

    try {
        if (g->parsed()) return cmd_gen_synthetic(gen, gen_out);
        if (rb->parsed()) return cmd_run_benchmark(config, out, sets);
        if (tr->parsed()) return cmd_train(config, resume, train_tasks, out, sets);
        if (ev->parsed()) return cmd_eval(ckpt, test, alpha, out);
        if (in->parsed()) return cmd_inspect(ckpt);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
