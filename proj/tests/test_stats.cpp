#include <algorithm>
#include <random>

#include "test_support.hpp"

using namespace lada;

namespace {

std::vector<Vec> random_points(std::uint64_t seed, std::size_t n, std::size_t d) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Vec> pts(n, Vec(d));
    for (auto& p : pts)
        for (auto& x : p) x = u(rng);
    return pts;
}

} // namespace

TEST(KMeans, KEqualsPointCount) {
    const std::vector<Vec> pts = {{0.0, 0.0}, {2.0, 0.0}};
    const auto r = kmeans(pts, 2, 0);
    EXPECT_EQ(r.inertia, 0.0);
    auto centers = r.centers;
    std::sort(centers.begin(), centers.end());
    EXPECT_EQ(centers, pts);
}

TEST(KMeans, SingleClusterIsTheMean) {
    const std::vector<Vec> pts = {{0.0}, {2.0}};
    const auto r = kmeans(pts, 1, 0);
    EXPECT_EQ(r.centers[0], Vec{1.0});
    EXPECT_DOUBLE_EQ(r.inertia, 2.0);
}

TEST(KMeans, SixPointsMatchExhaustiveOptimum) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto pts = random_points(seed, 6, 2);
        const auto r = kmeans(pts, 2, seed);
        EXPECT_NEAR(r.inertia, oracle::exhaustive_inertia(pts, 2), 1e-12) << "seed " << seed;
        // centers are the means of their assigned points
        for (std::size_t c = 0; c < 2; ++c) {
            Vec mean(2, 0.0);
            double n = 0.0;
            for (std::size_t i = 0; i < pts.size(); ++i)
                if (r.assignment[i] == c) {
                    mean[0] += pts[i][0];
                    mean[1] += pts[i][1];
                    n += 1.0;
                }
            ASSERT_GT(n, 0.0);
            EXPECT_NEAR(r.centers[c][0], mean[0] / n, 1e-9);
            EXPECT_NEAR(r.centers[c][1], mean[1] / n, 1e-9);
        }
    }
}

TEST(KMeans, InertiaTraceNonIncreasing) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto r = kmeans(random_points(seed, 200, 5), 7, seed);
        ASSERT_GE(r.inertia_trace.size(), 2u);
        for (std::size_t i = 1; i < r.inertia_trace.size(); ++i) EXPECT_LE(r.inertia_trace[i], r.inertia_trace[i - 1]);
        EXPECT_EQ(r.inertia_trace.back(), r.inertia);
    }
}

TEST(KMeans, DeterministicInSeed) {
    const auto pts = random_points(3, 50, 4);
    const auto a = kmeans(pts, 5, 11);
    const auto b = kmeans(pts, 5, 11);
    EXPECT_EQ(a.centers, b.centers);
    EXPECT_EQ(a.assignment, b.assignment);
}

TEST(KMeans, EveryClusterNonEmptyWithDuplicates) {
    std::vector<Vec> pts(6, Vec{1.0, 1.0});
    pts.push_back({5.0, 5.0});
    const auto r = kmeans(pts, 3, 0);
    std::vector<int> counts(3, 0);
    for (auto a : r.assignment) ++counts[a];
    for (int c : counts) EXPECT_GT(c, 0);
}

TEST(KMeans, BadKRejected) {
    const auto pts = random_points(0, 3, 2);
    EXPECT_ERROR_KIND(kmeans(pts, 4, 0), ErrorKind::parameter);
    EXPECT_ERROR_KIND(kmeans(pts, 0, 0), ErrorKind::parameter);
    EXPECT_ERROR_KIND(kmeans(std::vector<Vec>{}, 1, 0), ErrorKind::empty_input);
}

TEST(Gmm, SingleComponentIsMaximumLikelihood) {
    const auto pts = random_points(9, 40, 3);
    const auto m = gmm_fit_spherical(pts, 1, 0);
    ASSERT_EQ(m.components.size(), 1u);
    const auto& c = m.components[0];
    EXPECT_DOUBLE_EQ(c.weight, 1.0);
    Vec mean(3, 0.0);
    for (const auto& p : pts)
        for (std::size_t j = 0; j < 3; ++j) mean[j] += p[j] / 40.0;
    double sq = 0.0;
    for (const auto& p : pts)
        for (std::size_t j = 0; j < 3; ++j) sq += (p[j] - mean[j]) * (p[j] - mean[j]);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(c.mean[j], mean[j], 1e-12);
    EXPECT_NEAR(c.variance, sq / (40.0 * 3.0), 1e-12);
}

TEST(Gmm, SinglePointFloorsVariance) {
    const auto m = gmm_fit_spherical(std::vector<Vec>{{0.3, 0.4}}, 1, 0);
    EXPECT_EQ(m.components[0].variance, 1e-6);
    EXPECT_EQ(m.components[0].mean, (Vec{0.3, 0.4}));
}

TEST(Gmm, LikelihoodNonDecreasingAndWeightsSumToOne) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto m = gmm_fit_spherical(random_points(seed, 80, 3), 1 + seed % 4, seed);
        for (std::size_t i = 1; i < m.log_likelihood_trace.size(); ++i)
            EXPECT_GE(m.log_likelihood_trace[i], m.log_likelihood_trace[i - 1] - 1e-7);
        double total = 0.0;
        for (const auto& c : m.components) {
            total += c.weight;
            EXPECT_GE(c.variance, 1e-6);
        }
        EXPECT_NEAR(total, 1.0, 1e-9);
    }
}

TEST(Gmm, RecoversTwoSeparatedBlobs) {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g(0.0, 0.3);
    const Vec a = {-3.0, 1.0}, b = {4.0, -2.0};
    std::vector<Vec> pts;
    for (int i = 0; i < 50; ++i) pts.push_back({a[0] + g(rng), a[1] + g(rng)});
    for (int i = 0; i < 50; ++i) pts.push_back({b[0] + g(rng), b[1] + g(rng)});
    const auto m = gmm_fit_spherical(pts, 2, 1);
    for (const auto& center : {a, b}) {
        const auto& c = squared_distance(m.components[0].mean, center) < squared_distance(m.components[1].mean, center) ? m.components[0]
                                                                                                                          : m.components[1];
        EXPECT_NEAR(c.mean[0], center[0], 0.1);
        EXPECT_NEAR(c.mean[1], center[1], 0.1);
        EXPECT_NEAR(c.weight, 0.5, 0.1);
    }
}

TEST(Gmm, MixtureMeanEqualsSampleMean) {
    const auto pts = random_points(2, 64, 6);
    const auto m = gmm_fit_spherical(pts, 4, 3);
    for (std::size_t j = 0; j < 6; ++j) {
        double mix = 0.0, direct = 0.0;
        for (const auto& c : m.components) mix += c.weight * c.mean[j];
        for (const auto& p : pts) direct += p[j] / 64.0;
        EXPECT_NEAR(mix, direct, 1e-9);
    }
}
