#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace lada {

using Vec = std::vector<double>;

enum class ErrorKind {
    format,
    corruption,
    empty_input,
    degenerate_input,
    parameter,
    registry,
    shape,
    convergence,
    numerical,
    contract,
    state,
    undefined_metric,
    incompatible,
    integrity,
    io,
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::format: return "format error";
    case ErrorKind::corruption: return "corruption error";
    case ErrorKind::empty_input: return "empty-input error";
    case ErrorKind::degenerate_input: return "degenerate-input error";
    case ErrorKind::parameter: return "parameter error";
    case ErrorKind::registry: return "registry error";
    case ErrorKind::shape: return "shape error";
    case ErrorKind::convergence: return "convergence error";
    case ErrorKind::numerical: return "numerical error";
    case ErrorKind::contract: return "contract error";
    case ErrorKind::state: return "state error";
    case ErrorKind::undefined_metric: return "undefined-metric error";
    case ErrorKind::incompatible: return "incompatibility error";
    case ErrorKind::integrity: return "integrity error";
    case ErrorKind::io: return "i/o error";
    }
    return "error";
}

/// Every failure raised by the library carries a machine-checkable kind.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}

    ErrorKind kind() const noexcept { return kind_; }
    /// The message without the kind prefix.
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorKind kind_;
    std::string detail_;
};

/// Dense row-major matrix of doubles.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    Vec data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
    std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }

    bool operator==(const Matrix&) const = default;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double squared_norm(std::span<const double> a) { return dot(a, a); }

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double t = a[i] - b[i];
        s += t * t;
    }
    return s;
}

/// Returns a / ||a||; throws degenerate_input on a zero vector.
inline Vec normalized(std::span<const double> a) {
    const double n = std::sqrt(squared_norm(a));
    if (!(n > 0.0) || !std::isfinite(n)) throw Error(ErrorKind::degenerate_input, "cannot normalize a zero or non-finite vector");
    Vec out(a.begin(), a.end());
    for (auto& x : out) x /= n;
    return out;
}

inline double log_sum_exp(std::span<const double> z) {
    if (z.empty()) return -INFINITY;
    const double m = *std::max_element(z.begin(), z.end());
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double v : z) s += std::exp(v - m);
    return m + std::log(s);
}

/// Index of the largest entry; ties go to the lowest index.
inline std::size_t argmax(std::span<const double> z) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < z.size(); ++i)
        if (z[i] > z[best]) best = i;
    return best;
}

/// splitmix64 finalizer; used to derive independent sub-seeds from a run seed.
inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

template <typename... Ts>
std::uint64_t derive_seed(std::uint64_t base, Ts... parts) {
    std::uint64_t h = mix_seed(base);
    ((h = mix_seed(h ^ static_cast<std::uint64_t>(parts))), ...);
    return h;
}

/// Worker cap from LADA_THREADS, else hardware concurrency.
inline unsigned worker_count() {
    if (const char* env = std::getenv("LADA_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [0, n). Callers write results into slot i only, so the
/// outcome never depends on the number of workers.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn, unsigned workers = worker_count()) {
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> failures(workers);
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers) fn(i);
            } catch (...) {
                failures[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& f : failures)
        if (f) std::rethrow_exception(f);
}

} // namespace lada
