#include <filesystem>
#include <fstream>

#include "test_support.hpp"

using namespace lada;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const fs::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << s;
}

Checkpoint trained_checkpoint() {
    SyntheticParams p;
    p.tasks = 3;
    p.classes_per_task = 3;
    p.dimension = 12;
    p.train_per_class = 10;
    const auto s = gen_synthetic_stream(p);
    RunConfig cfg;
    cfg.train.epochs = 2;
    cfg.train.lambda1 = 4;
    cfg.train.lambda2 = 2;
    cfg.inference.alpha = 0.25;
    ModelState m;
    m.registry = s.registry;
    train_task(m, s.train[0], s.text, 0, cfg.train);
    train_task(m, s.train[1], s.text, 1, cfg.train);
    return {m, make_unseen_bank(s.text, m.registry), to_key_values(cfg)};
}

void expect_same_model(const ModelState& a, const ModelState& b) {
    EXPECT_EQ(a.registry, b.registry);
    EXPECT_EQ(a.adapter, b.adapter);
    EXPECT_EQ(a.text, b.text);
    EXPECT_EQ(a.prototypes, b.prototypes);
}

} // namespace

TEST(Checkpoint, SaveLoadSaveIsByteIdentical) {
    const auto dir = oracle::temp_dir("ckpt_roundtrip");
    const auto c = trained_checkpoint();
    save_checkpoint(c, dir / "a");
    const auto loaded = load_checkpoint(dir / "a");
    save_checkpoint(loaded, dir / "b");
    EXPECT_EQ(slurp(dir / "a" / "manifest.json"), slurp(dir / "b" / "manifest.json"));
    EXPECT_EQ(slurp(dir / "a" / "tensors.bin"), slurp(dir / "b" / "tensors.bin"));
    expect_same_model(load_checkpoint(dir / "b").model, loaded.model);
    fs::remove_all(dir);
}

TEST(Checkpoint, ContentSurvivesToSinglePrecision) {
    const auto dir = oracle::temp_dir("ckpt_content");
    const auto c = trained_checkpoint();
    save_checkpoint(c, dir);
    const auto l = load_checkpoint(dir);
    EXPECT_EQ(l.model.registry, c.model.registry);
    ASSERT_EQ(l.model.adapter.blocks.size(), c.model.adapter.blocks.size());
    for (std::size_t j = 0; j < c.model.adapter.blocks.size(); ++j) {
        const auto& a = c.model.adapter.blocks[j];
        const auto& b = l.model.adapter.blocks[j];
        EXPECT_EQ(a.class_id, b.class_id);
        EXPECT_EQ(a.frozen, b.frozen);
        for (std::size_t i = 0; i < a.weights.data.size(); ++i)
            EXPECT_EQ(b.weights.data[i], static_cast<double>(static_cast<float>(a.weights.data[i])));
    }
    EXPECT_EQ(l.model.adapter.config, c.model.adapter.config);
    EXPECT_EQ(l.model.text.logit_scale, c.model.text.logit_scale);
    EXPECT_EQ(l.unseen.class_count(), 3u);
    EXPECT_EQ(l.model.prototypes.component_count(), c.model.prototypes.component_count());
    EXPECT_EQ(l.model.prototypes.classes[0].components[0].weight, c.model.prototypes.classes[0].components[0].weight);
    EXPECT_EQ(detail::checkpoint_dimension(l), 12u);
    fs::remove_all(dir);
}

TEST(Checkpoint, ConfigEchoedVerbatim) {
    const auto dir = oracle::temp_dir("ckpt_config");
    const auto c = trained_checkpoint();
    save_checkpoint(c, dir);
    const auto l = load_checkpoint(dir);
    EXPECT_EQ(l.config, c.config);
    bool found = false;
    for (const auto& [k, v] : l.config)
        if (k == "alpha") found = v == "0.25";
    EXPECT_TRUE(found);
    fs::remove_all(dir);
}

TEST(Checkpoint, VersionMismatchIsIncompatible) {
    const auto dir = oracle::temp_dir("ckpt_version");
    save_checkpoint(trained_checkpoint(), dir);
    auto manifest = slurp(dir / "manifest.json");
    const auto at = manifest.find("\"version\": 1");
    ASSERT_NE(at, std::string::npos);
    manifest.replace(at, 12, "\"version\": 2");
    spit(dir / "manifest.json", manifest);
    EXPECT_ERROR_KIND(load_checkpoint(dir), ErrorKind::incompatible);
    fs::remove_all(dir);
}

TEST(Checkpoint, CorruptionIsIntegrityError) {
    const auto dir = oracle::temp_dir("ckpt_corrupt");
    save_checkpoint(trained_checkpoint(), dir);
    const auto tensors = slurp(dir / "tensors.bin");
    spit(dir / "tensors.bin", tensors.substr(0, tensors.size() - 4));
    EXPECT_ERROR_KIND(load_checkpoint(dir), ErrorKind::integrity);
    spit(dir / "tensors.bin", tensors + "xxxx");
    EXPECT_ERROR_KIND(load_checkpoint(dir), ErrorKind::integrity);
    spit(dir / "tensors.bin", tensors);
    const auto manifest = slurp(dir / "manifest.json");
    spit(dir / "manifest.json", manifest.substr(0, manifest.size() / 2));
    EXPECT_ERROR_KIND(load_checkpoint(dir), ErrorKind::integrity);
    fs::remove_all(dir);
}

TEST(Checkpoint, MissingDirectoryIsIoError) {
    EXPECT_ERROR_KIND(load_checkpoint(fs::temp_directory_path() / "lada_no_such_checkpoint"), ErrorKind::io);
}

TEST(Checkpoint, EmptyModelRoundTrips) {
    const auto dir = oracle::temp_dir("ckpt_empty");
    Checkpoint c;
    c.model.registry.add_task(0, {0, 1});
    EmbeddingSet text{2, {{0, 0, {1.0, 0.0}}, {0, 1, {0.0, 1.0}}}, true};
    c.unseen = make_unseen_bank(text, c.model.registry);
    save_checkpoint(c, dir);
    const auto l = load_checkpoint(dir);
    EXPECT_TRUE(l.model.adapter.empty());
    EXPECT_EQ(l.unseen, c.unseen);
    EXPECT_EQ(detail::checkpoint_dimension(l), 2u);
    fs::remove_all(dir);
}
