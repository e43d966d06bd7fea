#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "lada/common.hpp"

namespace lada {

struct KMeansResult {
    std::vector<Vec> centers;
    std::vector<std::size_t> assignment;
    double inertia = 0.0;
    int iterations = 0;
    /// Inertia after every assignment step of the winning restart, then the
    /// inertia of the final centers.
    std::vector<double> inertia_trace;
};

struct KMeansOptions {
    int max_iter = 300;
    double tol = 1e-12;
    /// Independent k-means++ restarts; the lowest-inertia run is kept.
    int restarts = 10;
};

namespace detail {

inline void check_points(std::span<const Vec> points) {
    if (points.empty()) throw Error(ErrorKind::empty_input, "no points");
    const std::size_t d = points.front().size();
    if (d == 0) throw Error(ErrorKind::empty_input, "zero-dimensional points");
    for (const auto& p : points)
        if (p.size() != d) throw Error(ErrorKind::shape, "points of differing dimension");
}

inline std::vector<Vec> kmeanspp_seed(std::span<const Vec> points, std::size_t k, std::mt19937_64& rng) {
    const std::size_t n = points.size();
    std::vector<Vec> centers;
    centers.push_back(points[std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)]);
    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(points[i], centers[0]);
    while (centers.size() < k) {
        double total = 0.0;
        for (double v : d2) total += v;
        std::size_t pick = 0;
        if (total > 0.0) {
            double u = std::uniform_real_distribution<double>(0.0, total)(rng);
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                if (u < d2[i]) {
                    pick = i;
                    break;
                }
                u -= d2[i];
            }
            // u can outrun the tail through rounding; never pick a zero-weight point
            while (d2[pick] == 0.0 && pick > 0) --pick;
        }
        centers.push_back(points[pick]);
        for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], squared_distance(points[i], centers.back()));
    }
    return centers;
}

inline std::size_t nearest(std::span<const Vec> centers, const Vec& x, double* dist = nullptr) {
    std::size_t best = 0;
    double best_d = squared_distance(x, centers[0]);
    for (std::size_t c = 1; c < centers.size(); ++c) {
        const double dd = squared_distance(x, centers[c]);
        if (dd < best_d) {
            best_d = dd;
            best = c;
        }
    }
    if (dist) *dist = best_d;
    return best;
}

inline std::vector<Vec> cluster_means(std::span<const Vec> points, std::span<const std::size_t> assignment, std::size_t k) {
    const std::size_t d = points.front().size();
    std::vector<Vec> means(k, Vec(d, 0.0));
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        auto& m = means[assignment[i]];
        for (std::size_t j = 0; j < d; ++j) m[j] += points[i][j];
        ++counts[assignment[i]];
    }
    for (std::size_t c = 0; c < k; ++c)
        for (auto& x : means[c]) x /= static_cast<double>(counts[c]);
    return means;
}

inline KMeansResult lloyd(std::span<const Vec> points, std::vector<Vec> centers, const KMeansOptions& opt) {
    const std::size_t n = points.size();
    const std::size_t k = centers.size();
    KMeansResult r;
    r.assignment.assign(n, k); // k marks "unassigned" for the first change check
    double previous = std::numeric_limits<double>::infinity();
    for (int it = 0; it < opt.max_iter; ++it) {
        std::vector<std::size_t> assignment(n);
        std::vector<double> dist(n);
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            assignment[i] = nearest(centers, points[i], &dist[i]);
            ++counts[assignment[i]];
        }
        // Empty cluster repair: steal the point farthest from its center.
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] != 0) continue;
            std::size_t far = n;
            for (std::size_t i = 0; i < n; ++i)
                if (counts[assignment[i]] > 1 && (far == n || dist[i] > dist[far])) far = i;
            --counts[assignment[far]];
            assignment[far] = c;
            ++counts[c];
            dist[far] = 0.0;
            centers[c] = points[far];
        }
        double inertia = 0.0;
        for (double v : dist) inertia += v;
        r.inertia_trace.push_back(inertia);
        r.iterations = it + 1;
        const bool unchanged = assignment == r.assignment;
        r.assignment = std::move(assignment);
        centers = cluster_means(points, r.assignment, k);
        if (unchanged || previous - inertia < opt.tol) break;
        previous = inertia;
    }
    r.centers = std::move(centers);
    r.inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) r.inertia += squared_distance(points[i], r.centers[r.assignment[i]]);
    r.inertia_trace.push_back(r.inertia);
    return r;
}


/// One sweep of single-point transfers. Unlike a Lloyd step it accounts for
/// both means shifting, so it escapes some Lloyd fixed points.
/// Returns whether any point moved.
inline bool transfer_pass(std::span<const Vec> points, KMeansResult& r) {
    const std::size_t k = r.centers.size();
    std::vector<double> counts(k, 0.0);
    for (auto a : r.assignment) counts[a] += 1.0;
    bool moved = false;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& x = points[i];
        const std::size_t a = r.assignment[i];
        if (counts[a] <= 1.0) continue;
        const double removal = counts[a] / (counts[a] - 1.0) * squared_distance(x, r.centers[a]);
        std::size_t best = a;
        double best_gain = 1e-12 * removal;
        for (std::size_t b = 0; b < k; ++b) {
            if (b == a) continue;
            const double gain = removal - counts[b] / (counts[b] + 1.0) * squared_distance(x, r.centers[b]);
            if (gain > best_gain) {
                best_gain = gain;
                best = b;
            }
        }
        if (best == a) continue;
        auto& ca = r.centers[a];
        auto& cb = r.centers[best];
        for (std::size_t j = 0; j < x.size(); ++j) {
            ca[j] = (counts[a] * ca[j] - x[j]) / (counts[a] - 1.0);
            cb[j] = (counts[best] * cb[j] + x[j]) / (counts[best] + 1.0);
        }
        counts[a] -= 1.0;
        counts[best] += 1.0;
        r.assignment[i] = best;
        moved = true;
    }
    if (moved) {
        r.centers = cluster_means(points, r.assignment, k);
        r.inertia = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) r.inertia += squared_distance(points[i], r.centers[r.assignment[i]]);
        r.inertia_trace.push_back(r.inertia);
    }
    return moved;
}

} // namespace detail

/// Lloyd's algorithm with k-means++ seeding, refined by single-point transfers.
/// Deterministic in (points, k, seed).
inline KMeansResult kmeans(std::span<const Vec> points, std::size_t k, std::uint64_t seed, const KMeansOptions& opt = {}) {
    detail::check_points(points);
    if (k < 1 || k > points.size())
        throw Error(ErrorKind::parameter, "k=" + std::to_string(k) + " outside [1, " + std::to_string(points.size()) + "]");
    if (opt.max_iter < 1 || opt.restarts < 1) throw Error(ErrorKind::parameter, "max_iter and restarts must be >= 1");
    std::mt19937_64 rng(seed);
    KMeansResult best;
    for (int run = 0; run < opt.restarts; ++run) {
        auto r = detail::lloyd(points, detail::kmeanspp_seed(points, k, rng), opt);
        for (int round = 0; round < opt.max_iter && detail::transfer_pass(points, r); ++round) {
            auto next = detail::lloyd(points, r.centers, opt);
            next.inertia_trace.insert(next.inertia_trace.begin(), r.inertia_trace.begin(), r.inertia_trace.end());
            next.iterations += r.iterations;
            r = std::move(next);
        }
        if (run == 0 || r.inertia < best.inertia) best = std::move(r);
    }
    return best;
}

// ---------------------------------------------------------------------------
// Spherical Gaussian mixture
// ---------------------------------------------------------------------------

struct GmmComponent {
    double weight = 1.0;
    Vec mean;
    /// Per-coordinate variance; the covariance is variance * I.
    double variance = 0.0;

    bool operator==(const GmmComponent&) const = default;
};

struct GmmModel {
    std::vector<GmmComponent> components;
    std::vector<double> log_likelihood_trace;
};

struct GmmOptions {
    int max_iter = 200;
    double tol = 1e-8;
    double var_floor = 1e-6;
};

inline double log_normal_spherical(std::span<const double> x, std::span<const double> mean, double variance) {
    const double d = static_cast<double>(x.size());
    return -0.5 * d * std::log(2.0 * std::numbers::pi * variance) - squared_distance(x, mean) / (2.0 * variance);
}

/// EM for a mixture of spherical Gaussians, initialized from kmeans(points, k, seed).
/// The returned parameters always come from an M-step, so the weighted
/// component means reproduce the sample mean.
inline GmmModel gmm_fit_spherical(std::span<const Vec> points, std::size_t k, std::uint64_t seed, const GmmOptions& opt = {}) {
    detail::check_points(points);
    if (k < 1 || k > points.size())
        throw Error(ErrorKind::parameter, "k=" + std::to_string(k) + " outside [1, " + std::to_string(points.size()) + "]");
    if (!(opt.var_floor >= 0.0)) throw Error(ErrorKind::parameter, "variance floor must be non-negative");
    const std::size_t n = points.size();
    const std::size_t d = points.front().size();
    const double nd = static_cast<double>(n);

    const auto init = kmeans(points, k, seed);
    GmmModel model;
    model.components.resize(k);
    {
        std::vector<double> sse(k, 0.0), counts(k, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            sse[init.assignment[i]] += squared_distance(points[i], init.centers[init.assignment[i]]);
            counts[init.assignment[i]] += 1.0;
        }
        for (std::size_t c = 0; c < k; ++c)
            model.components[c] = {counts[c] / nd, init.centers[c], std::max(opt.var_floor, sse[c] / (counts[c] * static_cast<double>(d)))};
    }

    std::vector<Vec> resp(n, Vec(k));
    auto e_step = [&] {
        double ll = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            auto& r = resp[i];
            for (std::size_t c = 0; c < k; ++c) {
                const auto& comp = model.components[c];
                r[c] = std::log(comp.weight) + log_normal_spherical(points[i], comp.mean, comp.variance);
            }
            const double lse = log_sum_exp(r);
            if (!std::isfinite(lse)) throw Error(ErrorKind::convergence, "non-finite likelihood at point " + std::to_string(i));
            for (auto& v : r) v = std::exp(v - lse);
            ll += lse;
        }
        return ll;
    };
    auto m_step = [&] {
        for (std::size_t c = 0; c < k; ++c) {
            double mass = 0.0;
            Vec mean(d, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                mass += resp[i][c];
                for (std::size_t j = 0; j < d; ++j) mean[j] += resp[i][c] * points[i][j];
            }
            if (!(mass > std::numeric_limits<double>::min()))
                throw Error(ErrorKind::convergence, "component " + std::to_string(c) + " lost all responsibility");
            for (auto& x : mean) x /= mass;
            double sq = 0.0;
            for (std::size_t i = 0; i < n; ++i) sq += resp[i][c] * squared_distance(points[i], mean);
            model.components[c] = {mass / nd, std::move(mean), std::max(opt.var_floor, sq / (mass * static_cast<double>(d)))};
        }
        if (opt.var_floor == 0.0)
            for (const auto& comp : model.components)
                if (!(comp.variance > 0.0)) throw Error(ErrorKind::convergence, "zero variance with the floor disabled");
    };

    double previous = e_step();
    model.log_likelihood_trace.push_back(previous);
    for (int it = 0; it < std::max(1, opt.max_iter); ++it) {
        m_step();
        const double ll = e_step();
        model.log_likelihood_trace.push_back(ll);
        if (ll - previous < opt.tol) break;
        previous = ll;
    }
    return model;
}

} // namespace lada
