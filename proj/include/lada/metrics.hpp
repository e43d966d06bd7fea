#pragma once

#include <charconv>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lada/common.hpp"

namespace lada {

/// Shortest decimal text that reads back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

/// a(k, j): accuracy on task k after training task j. Both indices are
/// 1-based positions in learning order. Columns are written whole, once,
/// in order.
class AccuracyMatrix {
public:
    explicit AccuracyMatrix(std::size_t tasks) : k_(tasks), cells_(tasks * tasks) {
        if (tasks == 0) throw Error(ErrorKind::parameter, "accuracy matrix needs at least one task");
    }

    std::size_t tasks() const noexcept { return k_; }
    std::size_t columns_written() const noexcept { return written_; }
    bool complete() const noexcept { return written_ == k_; }

    void set_column(std::size_t j, const std::vector<double>& accuracy) {
        if (j != written_ + 1) throw Error(ErrorKind::state, "column " + std::to_string(j) + " written out of order");
        if (accuracy.size() != k_) throw Error(ErrorKind::shape, "column needs one entry per task");
        for (double a : accuracy)
            if (!(a >= 0.0 && a <= 1.0)) throw Error(ErrorKind::parameter, "accuracy outside [0, 1]");
        for (std::size_t k = 1; k <= k_; ++k) cell(k, j) = accuracy[k - 1];
        ++written_;
    }

    std::optional<double> get(std::size_t k, std::size_t j) const {
        check(k, j);
        return cells_[(k - 1) * k_ + (j - 1)];
    }

    double at(std::size_t k, std::size_t j) const {
        auto v = get(k, j);
        if (!v) throw Error(ErrorKind::state, "entry (" + std::to_string(k) + ", " + std::to_string(j) + ") not written yet");
        return *v;
    }

    /// "task,after_1,...,after_K" then one row per task; absent cells are empty.
    std::string to_csv() const {
        std::string out = "task";
        for (std::size_t j = 1; j <= k_; ++j) out += ",after_" + std::to_string(j);
        out += "\n";
        for (std::size_t k = 1; k <= k_; ++k) {
            out += std::to_string(k);
            for (std::size_t j = 1; j <= k_; ++j) {
                out += ",";
                if (auto v = get(k, j)) out += format_double(*v);
            }
            out += "\n";
        }
        return out;
    }

private:
    void check(std::size_t k, std::size_t j) const {
        if (k < 1 || k > k_ || j < 1 || j > k_) throw Error(ErrorKind::parameter, "matrix index out of range");
    }
    std::optional<double>& cell(std::size_t k, std::size_t j) { return cells_[(k - 1) * k_ + (j - 1)]; }

    std::size_t k_;
    std::size_t written_ = 0;
    std::vector<std::optional<double>> cells_;
};

// Sums run in long double so that the mean of equal entries is exactly that entry.

/// Mean accuracy on task k over the steps before it was learned.
inline double transfer(const AccuracyMatrix& m, std::size_t k) {
    if (k < 2 || k > m.tasks()) throw Error(ErrorKind::undefined_metric, "transfer is defined for tasks 2..K, got " + std::to_string(k));
    long double s = 0.0L;
    for (std::size_t j = 1; j < k; ++j) s += m.at(k, j);
    return static_cast<double>(s / static_cast<long double>(k - 1));
}

inline double average(const AccuracyMatrix& m, std::size_t k) {
    if (!m.complete()) throw Error(ErrorKind::state, "average needs every column");
    long double s = 0.0L;
    for (std::size_t j = 1; j <= m.tasks(); ++j) s += m.at(k, j);
    return static_cast<double>(s / static_cast<long double>(m.tasks()));
}

inline double last(const AccuracyMatrix& m, std::size_t k) {
    if (!m.complete()) throw Error(ErrorKind::state, "last needs the final column");
    return m.at(k, m.tasks());
}

struct MetricSeries {
    std::vector<std::optional<double>> per_task;
    double mean = 0.0;
};

struct MetricsSummary {
    MetricSeries transfer, average, last;
};

namespace detail {
inline double mean_of(const std::vector<std::optional<double>>& v) {
    long double s = 0.0L;
    std::size_t n = 0;
    for (const auto& x : v)
        if (x) {
            s += *x;
            ++n;
        }
    return n ? static_cast<double>(s / static_cast<long double>(n)) : 0.0;
}
} // namespace detail

/// Per-task Transfer/Average/Last and their means; the Transfer mean covers
/// tasks 2..K only.
inline MetricsSummary summary(const AccuracyMatrix& m) {
    if (!m.complete()) throw Error(ErrorKind::state, "summary needs a complete matrix");
    MetricsSummary s;
    for (std::size_t k = 1; k <= m.tasks(); ++k) {
        s.transfer.per_task.push_back(k >= 2 ? std::optional<double>(transfer(m, k)) : std::nullopt);
        s.average.per_task.push_back(average(m, k));
        s.last.per_task.push_back(last(m, k));
    }
    s.transfer.mean = detail::mean_of(s.transfer.per_task);
    s.average.mean = detail::mean_of(s.average.per_task);
    s.last.mean = detail::mean_of(s.last.per_task);
    return s;
}

inline nlohmann::json to_json(const MetricSeries& s) {
    nlohmann::json per = nlohmann::json::array();
    for (const auto& v : s.per_task) per.push_back(v ? nlohmann::json(*v) : nlohmann::json(nullptr));
    return {{"per_task", per}, {"mean", s.mean}};
}

inline nlohmann::json to_json(const MetricsSummary& s) {
    return {{"transfer", to_json(s.transfer)}, {"average", to_json(s.average)}, {"last", to_json(s.last)}};
}

} // namespace lada
