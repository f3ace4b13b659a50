#pragma once

// Partitional clustering of uncertain objects: the UCPC relocation search,
// MMVar (same search, mixture-variance objective), UK-means and basic
// UK-means (Lloyd iterations on closed-form or sampled expected distances).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <future>
#include <limits>
#include <thread>
#include <vector>

#include "ucpc/clustering.hpp"
#include "ucpc/oracle.hpp"

namespace ucpc {

namespace detail {

using Clock = std::chrono::steady_clock;

inline double elapsed_ms(Clock::time_point since) {
    return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

inline std::size_t resolve_threads(std::size_t requested) {
    if (requested == 0) requested = std::max(1u, std::thread::hardware_concurrency());
    return requested;
}

/// Runs `single(restart_index, seed)` for every restart and keeps the lowest
/// objective, ties going to the lower restart index.
template <class Single>
Clustering best_of_restarts(const ClusterConfig& cfg, Single&& single) {
    const std::size_t threads = std::min(resolve_threads(cfg.threads), cfg.restarts);
    std::vector<Clustering> runs(cfg.restarts);
    auto run_one = [&](std::size_t r) {
        runs[r] = single(r, derive_seed(cfg.seed, r));
        runs[r].restart_index = r;
    };
    if (threads <= 1) {
        for (std::size_t r = 0; r < cfg.restarts; ++r) run_one(r);
    } else {
        for (std::size_t first = 0; first < cfg.restarts; first += threads) {
            std::vector<std::future<void>> batch;
            for (std::size_t r = first; r < std::min(cfg.restarts, first + threads); ++r)
                batch.push_back(std::async(std::launch::async, run_one, r));
            for (auto& f : batch) f.get();
        }
    }
    std::size_t best = 0;
    for (std::size_t r = 1; r < runs.size(); ++r)
        if (runs[r].objective < runs[best].objective) best = r;
    return std::move(runs[best]);
}

} // namespace detail

/// One run of the relocation local search from a random initial partition.
///
/// Each sweep visits objects in dataset order and moves each object to the
/// cluster giving the largest decrease of sum_C Obj(C), applying the move at
/// once. A move must beat min_relative_decrease * (1 + |V|), V being the total
/// at the start of the sweep; moves that would empty a cluster are skipped.
template <ClusterObjective Obj>
Clustering relocation_search(const Dataset& data, const ClusterConfig& cfg, std::uint64_t run_seed) {
    const auto t0 = detail::Clock::now();
    Clustering c = initial_partition(data, cfg.k, run_seed);
    const std::size_t k = c.k;
    std::vector<double> cached(k);
    for (std::size_t q = 0; q < k; ++q) cached[q] = Obj::value(c.stats[q]);
    double v = 0.0;
    for (double x : cached) v += x;
    c.trace.push_back(v);
    c.offline_ms = detail::elapsed_ms(t0);

    const auto t1 = detail::Clock::now();
    for (std::size_t sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
        const auto ts = detail::Clock::now();
        const double threshold = cfg.min_relative_decrease * (1.0 + std::abs(v));
        std::size_t moved = 0;
        for (std::size_t i = 0; i < data.size(); ++i) {
            const std::size_t from = c.assignment[i];
            if (c.stats[from].size <= 1) continue;
            const Moments& mo = data[i].moments();
            const double j_from = Obj::after(c.stats[from], mo, -1);
            const double d_from = j_from - cached[from];
            double best_delta = 0.0;
            double best_j = 0.0;
            std::size_t best = from;
            for (std::size_t q = 0; q < k; ++q) {
                if (q == from) continue;
                const double j_to = Obj::after(c.stats[q], mo, +1);
                const double delta = d_from + (j_to - cached[q]);
                if (delta < best_delta) {
                    best_delta = delta;
                    best_j = j_to;
                    best = q;
                }
            }
            if (best != from && best_delta < -threshold) {
                c.stats[from].remove(mo);
                c.stats[best].add(mo);
                cached[from] = j_from;
                cached[best] = best_j;
                c.assignment[i] = best;
                ++moved;
            }
        }
        v = 0.0;
        for (double x : cached) v += x;
        c.trace.push_back(v);
        c.sweep_ms.push_back(detail::elapsed_ms(ts));
        ++c.sweeps_used;
        if (moved == 0) break;
    }
    c.online_ms = detail::elapsed_ms(t1);

    c.stats = build_stats(data, c.assignment, k);
    c.objective = total_objective<Obj>(c.stats);
    return c;
}

/// UCPC: relocation search on J(C), best of cfg.restarts runs.
inline Clustering ucpc(const Dataset& data, const ClusterConfig& cfg) {
    cfg.validate(data.size());
    return detail::best_of_restarts(cfg, [&](std::size_t, std::uint64_t seed) {
        return relocation_search<UcpcObjective>(data, cfg, seed);
    });
}

/// MMVar: the same relocation search on J_MM(C) = J_UK(C) / |C|.
inline Clustering mmvar(const Dataset& data, const ClusterConfig& cfg) {
    cfg.validate(data.size());
    return detail::best_of_restarts(cfg, [&](std::size_t, std::uint64_t seed) {
        return relocation_search<MmvarObjective>(data, cfg, seed);
    });
}

namespace detail {

/// Lloyd iterations. `centroid_of(i)` gives the vector averaged into centroids
/// for object i; `cost(i, centroid)` the distance minimized by assignment.
template <class CentroidOf, class Cost>
void lloyd(const Dataset& data, const ClusterConfig& cfg, Clustering& c, CentroidOf&& centroid_of, Cost&& cost,
           std::vector<Vector>& centroids) {
    const std::size_t n = data.size();
    const std::size_t m = data.dim();
    const std::size_t k = c.k;

    auto recompute_centroids = [&] {
        std::vector<std::size_t> counts(k, 0);
        for (auto& cv : centroids) std::fill(cv.begin(), cv.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const Vector& x = centroid_of(i);
            auto& cv = centroids[c.assignment[i]];
            for (std::size_t j = 0; j < m; ++j) cv[j] += x[j];
            ++counts[c.assignment[i]];
        }
        for (std::size_t q = 0; q < k; ++q)
            if (counts[q] > 0)
                for (double& x : centroids[q]) x /= static_cast<double>(counts[q]);
    };

    centroids.assign(k, Vector(m, 0.0));
    recompute_centroids();
    std::vector<double> dist(n, 0.0);
    for (std::size_t sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
        const auto ts = Clock::now();
        std::size_t changed = 0;
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t cur = c.assignment[i];
            double best_d = cost(i, centroids[cur]);
            std::size_t best = cur;
            for (std::size_t q = 0; q < k; ++q) {
                if (q == cur) continue;
                const double d = cost(i, centroids[q]);
                if (d < best_d) {
                    best_d = d;
                    best = q;
                }
            }
            if (best != cur) {
                c.assignment[i] = best;
                ++changed;
            }
            dist[i] = best_d;
            ++counts[best];
        }
        // Reseed each empty cluster with the object farthest from its centroid.
        for (std::size_t q = 0; q < k; ++q) {
            if (counts[q] > 0) continue;
            std::size_t far = n;
            for (std::size_t i = 0; i < n; ++i)
                if (counts[c.assignment[i]] > 1 && (far == n || dist[i] > dist[far])) far = i;
            --counts[c.assignment[far]];
            c.assignment[far] = q;
            ++counts[q];
            dist[far] = 0.0;
            ++changed;
        }
        recompute_centroids();
        c.stats = build_stats(data, c.assignment, k);
        c.trace.push_back(total_objective<UkObjective>(c.stats));
        c.sweep_ms.push_back(elapsed_ms(ts));
        ++c.sweeps_used;
        if (changed == 0) break;
    }
}

} // namespace detail

/// UK-means: assign each object to the centroid minimizing ED(o, c), which
/// reduces to the nearest centroid to mu(o); centroids are averages of member
/// means. Objective: sum_C J_UK(C).
inline Clustering uk_means(const Dataset& data, const ClusterConfig& cfg) {
    cfg.validate(data.size());
    return detail::best_of_restarts(cfg, [&](std::size_t, std::uint64_t seed) {
        const auto t0 = detail::Clock::now();
        Clustering c = initial_partition(data, cfg.k, seed);
        c.trace.push_back(total_objective<UkObjective>(c.stats));
        c.offline_ms = detail::elapsed_ms(t0);
        const auto t1 = detail::Clock::now();
        std::vector<Vector> centroids;
        detail::lloyd(
            data, cfg, c, [&](std::size_t i) -> const Vector& { return data[i].moments().mu; },
            [&](std::size_t i, const Vector& y) { return oracle::squared_euclidean(data[i].moments().mu, y); },
            centroids);
        c.online_ms = detail::elapsed_ms(t1);
        c.objective = total_objective<UkObjective>(c.stats);
        return c;
    });
}

/// Basic UK-means: Lloyd iterations where ED(o, c) is estimated from
/// cfg.mc_samples draws per object (drawn once, reused every iteration) and
/// centroids average the per-object sample means. Objective: the summed
/// sampled expected distances to the final centroids.
inline Clustering buk_means(const Dataset& data, const ClusterConfig& cfg) {
    cfg.validate(data.size());
    if (cfg.mc_samples < 2) throw argument_error("buk_means: mc_samples must be at least 2");
    const auto t0 = detail::Clock::now();
    std::vector<oracle::ObjectSamples> banks;
    banks.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i)
        banks.push_back(oracle::draw_samples(data[i], cfg.mc_samples, derive_seed(cfg.seed ^ 0xb0c5ULL, i)));
    const double sampling_ms = detail::elapsed_ms(t0);

    return detail::best_of_restarts(cfg, [&](std::size_t, std::uint64_t seed) {
        const auto t1 = detail::Clock::now();
        Clustering c = initial_partition(data, cfg.k, seed);
        c.trace.push_back(total_objective<UkObjective>(c.stats));
        c.offline_ms = sampling_ms + detail::elapsed_ms(t1);
        const auto t2 = detail::Clock::now();
        std::vector<Vector> centroids;
        detail::lloyd(
            data, cfg, c, [&](std::size_t i) -> const Vector& { return banks[i].mean; },
            [&](std::size_t i, const Vector& y) { return oracle::mean_sq_dist(banks[i], y); }, centroids);
        c.online_ms = detail::elapsed_ms(t2);
        // Report the sampled objective and its standard error.
        double total = 0.0;
        double var = 0.0;
        for (std::size_t i = 0; i < data.size(); ++i) {
            const oracle::MCEstimate e = oracle::mc_expected_dist(banks[i], centroids[c.assignment[i]]);
            total += e.mean;
            var += e.std_error * e.std_error;
        }
        c.objective = total;
        c.objective_std_error = std::sqrt(var);
        return c;
    });
}

inline Clustering run_algorithm(Algorithm algo, const Dataset& data, const ClusterConfig& cfg) {
    switch (algo) {
    case Algorithm::ucpc: return ucpc(data, cfg);
    case Algorithm::ukmeans: return uk_means(data, cfg);
    case Algorithm::mmvar: return mmvar(data, cfg);
    case Algorithm::bukm: return buk_means(data, cfg);
    }
    throw argument_error("unknown algorithm");
}

/// Objective of `c` under the algorithm's own per-cluster criterion,
/// recomputed from scratch (closed form; basic UK-means is scored by J_UK).
inline double closed_form_objective(Algorithm algo, const Dataset& data, const Clustering& c) {
    const auto stats = build_stats(data, c.assignment, c.k);
    switch (algo) {
    case Algorithm::ucpc: return total_objective<UcpcObjective>(stats);
    case Algorithm::mmvar: return total_objective<MmvarObjective>(stats);
    case Algorithm::ukmeans:
    case Algorithm::bukm: return total_objective<UkObjective>(stats);
    }
    return 0.0;
}

} // namespace ucpc
