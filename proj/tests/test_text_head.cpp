#include <random>

#include "test_support.hpp"

using namespace lada;

namespace {

struct Fixture {
    ClassRegistry registry;
    EmbeddingSet text{3, {}, false};
};

Fixture three_classes() {
    Fixture f;
    f.registry.add_task(0, {0, 1}, {"cat", "dog"});
    f.registry.add_task(1, {2}, {"fish"});
    f.text.records = {{0, 0, {2.0, 0.0, 0.0}}, {0, 1, {0.0, 0.5, 0.0}}, {1, 2, {1.0, 1.0, 1.0}}};
    return f;
}

} // namespace

TEST(TextHead, OneUnitVectorPerClass) {
    const auto f = three_classes();
    const auto clf = init_from_embeddings(f.text, f.registry);
    ASSERT_EQ(clf.class_count(), 3u);
    for (std::size_t j = 0; j < 3; ++j) {
        EXPECT_EQ(clf.entries[j].class_id, j);
        EXPECT_NEAR(squared_norm(clf.entries[j].vector), 1.0, 1e-12);
        EXPECT_FALSE(clf.entries[j].frozen);
    }
    EXPECT_EQ(clf.entries[0].vector, (Vec{1.0, 0.0, 0.0}));
    EXPECT_EQ(clf.entries[2].task_id, 1u);
}

TEST(TextHead, MissingClassNamed) {
    auto f = three_classes();
    f.text.records.pop_back();
    try {
        init_from_embeddings(f.text, f.registry);
        FAIL() << "expected an error";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::registry);
        EXPECT_NE(std::string(e.what()).find("fish"), std::string::npos);
    }
}

TEST(TextHead, BadScaleRejected) {
    const auto f = three_classes();
    EXPECT_ERROR_KIND(init_from_embeddings(f.text, f.registry, 0.0), ErrorKind::parameter);
}

TEST(TextLogits, UnitScaleSelfProduct) {
    TextClassifier clf;
    clf.logit_scale = 1.0;
    clf.entries.push_back({0, 0, {0.0, 1.0}, false});
    EXPECT_DOUBLE_EQ(text_logits(clf, Vec{0.0, 1.0})[0], 1.0);
}

TEST(TextLogits, DefaultScaleMultiplies) {
    TextClassifier clf;
    clf.entries.push_back({0, 0, {0.3, std::sqrt(1.0 - 0.09)}, false});
    EXPECT_NEAR(text_logits(clf, Vec{1.0, 0.0})[0], 30.0, 1e-12);
}

TEST(TextLogits, MatchesNaiveOracle) {
    std::mt19937_64 rng(5);
    TextClassifier clf;
    clf.logit_scale = 37.5;
    for (std::uint32_t c = 0; c < 6; ++c) clf.entries.push_back({0, c, oracle::random_unit(rng, 9), false});
    UnseenBank bank;
    for (std::uint32_t c = 6; c < 9; ++c) bank.entries.push_back({1, c, oracle::random_unit(rng, 9), true});
    const auto x = oracle::random_unit(rng, 9);
    const auto z = text_logits(clf, bank, x);
    ASSERT_EQ(z.size(), 9u);
    for (std::size_t j = 0; j < 9; ++j) {
        const auto& t = j < 6 ? clf.entries[j].vector : bank.entries[j - 6].vector;
        EXPECT_NEAR(z[j], static_cast<double>(37.5L * oracle::dot(x, t)), 1e-12);
    }
}

TEST(TextLogits, DimensionMismatch) {
    const auto f = three_classes();
    const auto clf = init_from_embeddings(f.text, f.registry);
    EXPECT_ERROR_KIND(text_logits(clf, Vec{1.0, 0.0}), ErrorKind::shape);
}

TEST(TextHead, AddTaskGrowsInRegistryOrder) {
    const auto f = three_classes();
    auto clf = add_task(TextClassifier{}, f.text, f.registry, 1);
    clf = add_task(clf, f.text, f.registry, 0);
    ASSERT_EQ(clf.class_count(), 3u);
    EXPECT_EQ(clf.entries[0].class_id, 2u);
    EXPECT_ERROR_KIND(add_task(clf, f.text, f.registry, 0), ErrorKind::registry);
}

TEST(TextHead, CompleteTaskIdempotent) {
    const auto f = three_classes();
    const auto clf = init_from_embeddings(f.text, f.registry);
    const auto once = complete_task(clf, 0);
    EXPECT_TRUE(once.entries[0].frozen && once.entries[1].frozen);
    EXPECT_FALSE(once.entries[2].frozen);
    EXPECT_EQ(complete_task(once, 0), once);
    EXPECT_ERROR_KIND(complete_task(clf, 7), ErrorKind::registry);
}

TEST(UnseenBank, HoldsOnlyUnseenTasks) {
    auto f = three_classes();
    f.registry.set_status(0, TaskStatus::learned);
    const auto bank = make_unseen_bank(f.text, f.registry);
    ASSERT_EQ(bank.class_count(), 1u);
    EXPECT_EQ(bank.entries[0].class_id, 2u);
    EXPECT_TRUE(bank.entries[0].frozen);
}

TEST(UnseenBank, ExtraClassesMustNotCollide) {
    const auto f = three_classes();
    EmbeddingSet extra{3, {{9, 40, {0.0, 0.0, 3.0}}}, false};
    const auto bank = make_unseen_bank(f.text, f.registry, &extra);
    EXPECT_EQ(bank.class_count(), 4u);
    EXPECT_EQ(bank.entries.back().vector, (Vec{0.0, 0.0, 1.0}));
    extra.records[0].class_id = 1;
    EXPECT_ERROR_KIND(make_unseen_bank(f.text, f.registry, &extra), ErrorKind::registry);
}
