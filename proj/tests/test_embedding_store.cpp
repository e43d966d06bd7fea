#include <cmath>
#include <filesystem>
#include <random>

#include "test_support.hpp"

using namespace lada;

namespace {

EmbeddingSet one_record() {
    EmbeddingSet s;
    s.dimension = 2;
    s.records.push_back({0, 0, {1.0, 0.0}});
    return s;
}

class LseFiles : public ::testing::Test {
protected:
    void SetUp() override { dir = oracle::temp_dir("lse"); }
    void TearDown() override { std::filesystem::remove_all(dir); }
    std::filesystem::path dir;
};

} // namespace

TEST_F(LseFiles, SingleRecordIsThirtyTwoBytesAndReadsBack) {
    save_lse(one_record(), dir / "a.lse");
    EXPECT_EQ(std::filesystem::file_size(dir / "a.lse"), 4u + 4u + 4u + 8u + (4u + 4u + 8u));
    const auto back = load_lse(dir / "a.lse");
    EXPECT_EQ(back.dimension, 2u);
    ASSERT_EQ(back.size(), 1u);
    EXPECT_EQ(back.records[0], one_record().records[0]);
}

TEST_F(LseFiles, HeaderLayoutIsLittleEndian) {
    const auto bytes = encode_lse(one_record());
    const std::vector<unsigned char> header(bytes.begin(), bytes.begin() + 20);
    const std::vector<unsigned char> expected = {'L', 'S', 'E', '1', 1, 0, 0, 0, 2, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0};
    EXPECT_EQ(header, expected);
}

TEST_F(LseFiles, RandomFilesRoundTripByteIdentical) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        EmbeddingSet s;
        s.dimension = 1 + static_cast<std::uint32_t>(rng() % 17);
        for (std::uint64_t n = 1 + rng() % 30; n > 0; --n) {
            EmbeddingRecord r{static_cast<std::uint32_t>(rng() % 9), static_cast<std::uint32_t>(rng() % 99), Vec(s.dimension)};
            for (auto& v : r.vector) v = g(rng);
            s.records.push_back(r);
        }
        const auto f = dir / "f.lse";
        const auto f2 = dir / "f2.lse";
        save_lse(s, f);
        save_lse(load_lse(f), f2);
        EXPECT_EQ(detail::read_file(f), detail::read_file(f2));
    }
}

TEST_F(LseFiles, BadMagicIsFormatError) {
    auto bytes = encode_lse(one_record());
    std::copy_n("XXXX", 4, bytes.begin());
    detail::write_file(dir / "bad.lse", bytes);
    EXPECT_ERROR_KIND(load_lse(dir / "bad.lse"), ErrorKind::format);
}

TEST_F(LseFiles, TruncatedAndTrailingBytesAreCorruption) {
    auto bytes = encode_lse(one_record());
    auto shorter = bytes;
    shorter.pop_back();
    EXPECT_ERROR_KIND(decode_lse(shorter), ErrorKind::corruption);
    auto longer = bytes;
    longer.push_back(0);
    EXPECT_ERROR_KIND(decode_lse(longer), ErrorKind::corruption);
    EXPECT_ERROR_KIND(decode_lse(std::vector<char>(bytes.begin(), bytes.begin() + 10)), ErrorKind::corruption);
}

TEST_F(LseFiles, ZeroCountHeaderIsEmptyInput) {
    auto bytes = encode_lse(one_record());
    bytes.resize(lse_header_bytes);
    std::fill(bytes.begin() + 12, bytes.end(), 0);
    EXPECT_ERROR_KIND(decode_lse(bytes), ErrorKind::empty_input);
}

TEST_F(LseFiles, MissingFileIsIoErrorWithPath) {
    try {
        load_lse(dir / "nope.lse");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::io);
        EXPECT_NE(std::string(e.what()).find("nope.lse"), std::string::npos);
    }
}

TEST(Lse, EmptySetCannotBeSaved) { EXPECT_ERROR_KIND(encode_lse(EmbeddingSet{2, {}, false}), ErrorKind::empty_input); }

TEST(Lse, RecordsKeepInputOrder) {
    EmbeddingSet s{1, {{0, 7, {1.0}}, {3, 2, {-2.0}}}, false};
    const auto back = decode_lse(encode_lse(s));
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back.records[0].class_id, 7u);
    EXPECT_EQ(back.records[1].class_id, 2u);
    EXPECT_EQ(back.records[1].task_id, 3u);
}

TEST(Normalize, ThreeFourFive) {
    const auto out = normalize_set({2, {{0, 0, {3.0, 4.0}}}, false});
    EXPECT_TRUE(out.normalized);
    EXPECT_DOUBLE_EQ(out.records[0].vector[0], 0.6);
    EXPECT_DOUBLE_EQ(out.records[0].vector[1], 0.8);
}

TEST(Normalize, UnitVectorUnchanged) {
    const auto out = normalize_set({3, {{0, 0, {0.0, 1.0, 0.0}}}, false});
    EXPECT_EQ(out.records[0].vector, (Vec{0.0, 1.0, 0.0}));
}

TEST(Normalize, RandomVectorsHaveUnitNorm) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-100.0, 100.0);
    EmbeddingSet s{16, {}, false};
    for (int i = 0; i < 200; ++i) {
        Vec v(16);
        for (auto& x : v) x = u(rng);
        s.records.push_back({0, 0, v});
    }
    for (const auto& r : normalize_set(s).records) EXPECT_NEAR(std::sqrt(static_cast<double>(oracle::dot(r.vector, r.vector))), 1.0, 1e-6);
}

TEST(Normalize, ZeroVectorNamesRecord) {
    try {
        normalize_set({2, {{0, 0, {1.0, 0.0}}, {0, 0, {0.0, 0.0}}}, false});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::degenerate_input);
        EXPECT_NE(std::string(e.what()).find("record 1"), std::string::npos) << e.what();
    }
}

TEST(Registry, JsonRoundTripAndLookups) {
    ClassRegistry r;
    r.add_task(0, {0, 1}, {"cat", "dog"});
    r.add_task(5, {9});
    const auto back = registry_from_json(registry_to_json(r));
    EXPECT_EQ(back.tasks(), r.tasks());
    EXPECT_EQ(back.name_of(1), "dog");
    EXPECT_EQ(back.task_of(9), 5u);
    EXPECT_EQ(back.position_of(5), 1u);
    EXPECT_EQ(back.class_count(), 3u);
}

TEST(Registry, DuplicatesRejected) {
    ClassRegistry r;
    r.add_task(0, {0, 1});
    EXPECT_ERROR_KIND(r.add_task(1, {1}), ErrorKind::registry);
    EXPECT_ERROR_KIND(r.add_task(0, {4}), ErrorKind::registry);
}

TEST(Registry, OnlyOneCurrentTask) {
    ClassRegistry r;
    r.add_task(0, {0});
    r.add_task(1, {1});
    r.set_status(0, TaskStatus::current);
    EXPECT_ERROR_KIND(r.set_status(1, TaskStatus::current), ErrorKind::state);
    EXPECT_EQ(r.current_task(), std::optional<std::uint32_t>(0));
    EXPECT_ERROR_KIND(r.set_status(7, TaskStatus::learned), ErrorKind::registry);
}

TEST(Registry, OrphanRecordsRejected) {
    ClassRegistry r;
    r.add_task(0, {0});
    EXPECT_NO_THROW(check_registered({1, {{0, 0, {1.0}}}, false}, r));
    EXPECT_ERROR_KIND(check_registered({1, {{0, 3, {1.0}}}, false}, r), ErrorKind::registry);
    EXPECT_ERROR_KIND(check_registered({1, {{2, 0, {1.0}}}, false}, r), ErrorKind::registry);
}

TEST(Synthetic, SameSeedIsBitIdentical) {
    SyntheticParams p;
    p.seed = 42;
    const auto a = gen_synthetic_stream(p);
    const auto b = gen_synthetic_stream(p);
    EXPECT_EQ(a.train, b.train);
    EXPECT_EQ(a.test, b.test);
    EXPECT_EQ(a.text, b.text);
    EXPECT_EQ(a.registry.tasks(), b.registry.tasks());
    p.seed = 43;
    EXPECT_NE(gen_synthetic_stream(p).test, a.test);
}

TEST(Synthetic, DefaultShape) {
    const auto s = gen_synthetic_stream({});
    EXPECT_EQ(s.registry.task_count(), 5u);
    EXPECT_EQ(s.registry.class_count(), 50u);
    EXPECT_EQ(s.test.dimension, 64u);
    EXPECT_EQ(s.train[0].size(), 10u * 32u);
    EXPECT_EQ(s.test.size(), 50u * 20u);
    EXPECT_EQ(s.text.size(), 50u);
}

TEST(Synthetic, InfiniteSeparationCollapsesToDirection) {
    SyntheticParams p;
    p.separation = std::numeric_limits<double>::infinity();
    p.text_noise = 0.0;
    const auto s = gen_synthetic_stream(p);
    for (const auto& set : s.train)
        for (const auto& r : set.records) EXPECT_EQ(r.vector, s.text.records[r.class_id].vector);
    for (const auto& r : s.test.records) EXPECT_EQ(r.vector, s.text.records[r.class_id].vector);
}

TEST(Synthetic, ZeroSeparationRejected) {
    SyntheticParams p;
    p.separation = 0.0;
    EXPECT_ERROR_KIND(gen_synthetic_stream(p), ErrorKind::parameter);
}

TEST(Synthetic, NearestCentroidOracleAboveNinetyNinePercent) {
    const auto s = gen_synthetic_stream({});
    EXPECT_GE(oracle::nearest_centroid_accuracy(s.train, s.test), 0.99);
}
