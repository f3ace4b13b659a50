#pragma once

// Independent verifiers for the closed forms: Monte-Carlo estimators built
// only on sampling, and an exhaustive search over set partitions.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ucpc/clustering.hpp"
#include "ucpc/model.hpp"
#include "ucpc/rng.hpp"

namespace ucpc::oracle {

struct MCEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n_samples = 0;
};

using Metric = std::function<double(std::span<const double>, std::span<const double>)>;

inline double squared_euclidean(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double d = x[j] - y[j];
        s += d * d;
    }
    return s;
}

inline double euclidean(std::span<const double> x, std::span<const double> y) {
    return std::sqrt(squared_euclidean(x, y));
}

/// Streaming mean/variance (Welford) with Chan's pairwise merge.
class RunningStats {
public:
    void push(double x) {
        ++n_;
        const double d = x - mean_;
        mean_ += d / static_cast<double>(n_);
        m2_ += d * (x - mean_);
    }

    void merge(const RunningStats& o) {
        if (o.n_ == 0) return;
        if (n_ == 0) {
            *this = o;
            return;
        }
        const double n = static_cast<double>(n_ + o.n_);
        const double d = o.mean_ - mean_;
        mean_ += d * static_cast<double>(o.n_) / n;
        m2_ += o.m2_ + d * d * static_cast<double>(n_) * static_cast<double>(o.n_) / n;
        n_ += o.n_;
    }

    std::size_t count() const noexcept { return n_; }
    double mean() const noexcept { return mean_; }
    double variance() const noexcept { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }

    MCEstimate estimate() const {
        return {mean_, n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0, n_};
    }

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

namespace detail {

inline constexpr std::size_t kBlock = 4096;

inline void require_samples(std::size_t n) {
    if (n < 2) throw argument_error("oracle: at least 2 samples are required");
}

/// Runs `draw(rng)` n times in fixed-size blocks, block b seeded by (seed, b),
/// merging block statistics in block order.
template <class Draw>
MCEstimate blocked_estimate(std::size_t n, std::uint64_t seed, Draw&& draw) {
    require_samples(n);
    RunningStats total;
    for (std::size_t b = 0, done = 0; done < n; ++b) {
        const std::size_t len = std::min(kBlock, n - done);
        Rng rng = make_rng(seed, b);
        RunningStats block;
        for (std::size_t i = 0; i < len; ++i) block.push(draw(rng));
        total.merge(block);
        done += len;
    }
    return total.estimate();
}

} // namespace detail

/// MC estimate of ED_d(o, y) = E[d(X, y)], X ~ o.
inline MCEstimate mc_expected_dist(const UncertainObject& o, std::span<const double> y, std::size_t n_samples,
                                   std::uint64_t seed, const Metric& metric = squared_euclidean) {
    if (y.size() != o.dim()) throw argument_error("mc_expected_dist: dimension mismatch");
    Vector x(o.dim());
    return detail::blocked_estimate(n_samples, seed, [&](Rng& rng) {
        o.sample_into(rng, x);
        return metric(x, y);
    });
}

/// MC estimate of E[d(X, X')], X ~ a and X' ~ b drawn independently.
inline MCEstimate mc_expected_dist(const UncertainObject& a, const UncertainObject& b, std::size_t n_samples,
                                   std::uint64_t seed, const Metric& metric = squared_euclidean) {
    if (a.dim() != b.dim()) throw argument_error("mc_expected_dist: dimension mismatch");
    Vector x(a.dim()), y(b.dim());
    return detail::blocked_estimate(n_samples, seed, [&](Rng& rng) {
        a.sample_into(rng, x);
        b.sample_into(rng, y);
        return metric(x, y);
    });
}

/// One realization of the U-centroid: the coordinate-wise average of one
/// independent draw per member.
template <ObjectRange R>
void sample_ucentroid_realization_into(const R& cluster, Rng& rng, std::span<double> out,
                                       std::span<double> scratch) {
    std::fill(out.begin(), out.end(), 0.0);
    std::size_t n = 0;
    for (const auto& x : cluster) {
        ucpc::detail::deref(x).sample_into(rng, scratch);
        for (std::size_t j = 0; j < out.size(); ++j) out[j] += scratch[j];
        ++n;
    }
    if (n == 0) throw empty_cluster_error("sample_ucentroid_realization: empty cluster");
    for (double& v : out) v /= static_cast<double>(n);
}

template <ObjectRange R>
Vector sample_ucentroid_realization(const R& cluster, Rng& rng) {
    if (std::ranges::empty(cluster)) throw empty_cluster_error("sample_ucentroid_realization: empty cluster");
    const std::size_t m = ucpc::detail::deref(*std::ranges::begin(cluster)).dim();
    Vector out(m), scratch(m);
    sample_ucentroid_realization_into(cluster, rng, out, scratch);
    return out;
}

/// MC estimate of the total UCPC objective sum_C sum_{o in C} ÊD(o, C̄).
/// Each sample draws one realization per cluster and, independently, one
/// draw per object; by linearity the sample total is unbiased for the sum.
inline MCEstimate mc_objective(const Clustering& clustering, const Dataset& data, std::size_t n_samples,
                               std::uint64_t seed) {
    if (clustering.assignment.size() != data.size())
        throw argument_error("mc_objective: clustering does not match dataset");
    const std::size_t m = data.dim();
    std::vector<std::vector<const UncertainObject*>> groups(clustering.k);
    for (std::size_t i = 0; i < data.size(); ++i) groups[clustering.assignment[i]].push_back(&data[i]);
    Vector centre(m), scratch(m), x(m);
    return detail::blocked_estimate(n_samples, seed, [&](Rng& rng) {
        double total = 0.0;
        for (const auto& g : groups) {
            if (g.empty()) continue;
            sample_ucentroid_realization_into(g, rng, centre, scratch);
            for (const UncertainObject* o : g) {
                o->sample_into(rng, x);
                total += squared_euclidean(x, centre);
            }
        }
        return total;
    });
}

/// A fixed bank of draws from one object, reused across estimates.
struct ObjectSamples {
    std::size_t count = 0;
    std::size_t dim = 0;
    std::vector<double> values;  // count x dim, row-major
    Vector mean;

    std::span<const double> row(std::size_t s) const { return {values.data() + s * dim, dim}; }
};

inline ObjectSamples draw_samples(const UncertainObject& o, std::size_t count, std::uint64_t seed) {
    detail::require_samples(count);
    ObjectSamples bank{count, o.dim(), std::vector<double>(count * o.dim()), Vector(o.dim(), 0.0)};
    Rng rng = make_rng(seed);
    for (std::size_t s = 0; s < count; ++s) {
        std::span<double> r(bank.values.data() + s * bank.dim, bank.dim);
        o.sample_into(rng, r);
        for (std::size_t j = 0; j < bank.dim; ++j) bank.mean[j] += r[j];
    }
    for (double& v : bank.mean) v /= static_cast<double>(count);
    return bank;
}

/// Estimate of ED_d(o, y) from a pre-drawn sample bank.
inline MCEstimate mc_expected_dist(const ObjectSamples& bank, std::span<const double> y,
                                   const Metric& metric = squared_euclidean) {
    RunningStats st;
    for (std::size_t s = 0; s < bank.count; ++s) st.push(metric(bank.row(s), y));
    return st.estimate();
}

/// Squared-Euclidean fast path for the bank estimator (mean only).
inline double mean_sq_dist(const ObjectSamples& bank, std::span<const double> y) {
    double total = 0.0;
    for (std::size_t s = 0; s < bank.count; ++s) total += squared_euclidean(bank.row(s), y);
    return total / static_cast<double>(bank.count);
}

// ---------------------------------------------------------------------------
// Exhaustive search
// ---------------------------------------------------------------------------

inline constexpr std::size_t kMaxExhaustiveObjects = 12;

struct ExhaustiveResult {
    Clustering best;
    double objective = std::numeric_limits<double>::infinity();
    std::size_t partitions = 0;  // number of partitions into exactly k non-empty clusters visited
};

/// Global optimum of sum_C objective(C) over all partitions of `data` into
/// exactly k non-empty clusters. Partitions are enumerated once each as
/// restricted-growth strings.
template <ClusterObjective Obj = UcpcObjective>
ExhaustiveResult exhaustive_best_clustering(const Dataset& data, std::size_t k) {
    const std::size_t n = data.size();
    if (n > kMaxExhaustiveObjects)
        throw guard_error("exhaustive_best_clustering: " + std::to_string(n) + " objects exceeds the limit of " +
                          std::to_string(kMaxExhaustiveObjects));
    if (k < 1 || k > n) throw argument_error("exhaustive_best_clustering: k out of range");

    ExhaustiveResult result;
    std::vector<std::size_t> labels(n, 0);
    std::vector<ClusterStats> stats(k, ClusterStats(data.dim()));

    // depth: next object to label; used: number of labels opened so far.
    std::function<void(std::size_t, std::size_t)> recurse = [&](std::size_t depth, std::size_t used) {
        if (depth == n) {
            if (used != k) return;
            ++result.partitions;
            const double v = total_objective<Obj>(stats);
            if (v < result.objective) {
                result.objective = v;
                result.best.assignment = labels;
            }
            return;
        }
        // Remaining objects must be able to open the labels still missing.
        const std::size_t remaining = n - depth;
        const std::size_t limit = std::min(used + 1, k);
        for (std::size_t l = 0; l < limit; ++l) {
            const std::size_t now_used = l == used ? used + 1 : used;
            if (remaining - 1 < k - now_used) continue;
            labels[depth] = l;
            stats[l].add(data[depth].moments());
            recurse(depth + 1, now_used);
            stats[l].remove(data[depth].moments());
        }
    };
    recurse(0, 0);

    result.best.k = k;
    result.best.stats = build_stats(data, result.best.assignment, k);
    result.best.objective = total_objective<Obj>(result.best.stats);
    return result;
}

} // namespace ucpc::oracle
