#pragma once

// Shared clustering types: run configuration, the Clustering result, the
// per-cluster objective policies and the random initial partition.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ucpc/model.hpp"
#include "ucpc/rng.hpp"
#include "ucpc/ucentroid.hpp"

namespace ucpc {

struct ClusterConfig {
    std::size_t k = 1;
    std::uint64_t seed = 0;
    std::size_t max_sweeps = 100;
    std::size_t restarts = 1;
    double min_relative_decrease = 1e-12;
    std::size_t mc_samples = 10000;  // basic UK-means only
    std::size_t threads = 1;         // restart-level parallelism; 0 = hardware

    void validate(std::size_t n) const {
        if (k < 1) throw argument_error("config: k must be at least 1");
        if (k > n)
            throw argument_error("config: k = " + std::to_string(k) + " exceeds dataset size " +
                                 std::to_string(n));
        if (max_sweeps < 1) throw argument_error("config: max_sweeps must be positive");
        if (restarts < 1) throw argument_error("config: restarts must be positive");
        if (mc_samples < 1) throw argument_error("config: mc_samples must be positive");
        if (!(min_relative_decrease >= 0.0) || !std::isfinite(min_relative_decrease))
            throw argument_error("config: min_relative_decrease must be a nonnegative number");
    }
};

struct Clustering {
    std::vector<std::size_t> assignment;  // object index -> cluster index in [0, k)
    std::size_t k = 0;
    std::vector<ClusterStats> stats;
    double objective = 0.0;
    std::size_t sweeps_used = 0;

    std::vector<double> trace;     // objective after the initial partition, then after each sweep
    std::vector<double> sweep_ms;  // wall time of each sweep
    std::size_t restart_index = 0;
    std::uint64_t seed_used = 0;
    double offline_ms = 0.0;  // initial partition and statistics
    double online_ms = 0.0;   // relocation / reassignment loop
    std::optional<double> objective_std_error;  // Monte-Carlo based runs only

    std::vector<std::vector<std::size_t>> members() const {
        std::vector<std::vector<std::size_t>> out(k);
        for (std::size_t i = 0; i < assignment.size(); ++i) out[assignment[i]].push_back(i);
        return out;
    }

    std::vector<std::size_t> sizes() const {
        std::vector<std::size_t> out(k, 0);
        for (std::size_t c : assignment) ++out[c];
        return out;
    }
};

enum class Algorithm { ucpc, ukmeans, mmvar, bukm };

inline std::string_view to_string(Algorithm a) {
    switch (a) {
    case Algorithm::ucpc: return "ucpc";
    case Algorithm::ukmeans: return "ukmeans";
    case Algorithm::mmvar: return "mmvar";
    case Algorithm::bukm: return "bukm";
    }
    return "?";
}

inline std::optional<Algorithm> parse_algorithm(std::string_view s) {
    if (s == "ucpc") return Algorithm::ucpc;
    if (s == "ukmeans") return Algorithm::ukmeans;
    if (s == "mmvar") return Algorithm::mmvar;
    if (s == "bukm") return Algorithm::bukm;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Per-cluster objectives over ClusterStats.
//
// after(st, mo, +1) is J(C ∪ {o}), after(st, mo, -1) is J(C \ {o}); both
// perform exactly the arithmetic value() would perform on the updated stats,
// so cached values and from-scratch values agree bit for bit.
// ---------------------------------------------------------------------------

/// J(C) = sum_o ÊD(o, U-centroid).
struct UcpcObjective {
    static constexpr std::string_view name = "ucpc";

    static double value(const ClusterStats& st) { return j_ucpc(st); }

    static double after(const ClusterStats& st, const Moments& mo, int sign) {
        const std::size_t n = sign > 0 ? st.size + 1 : st.size - 1;
        if (n == 0) return 0.0;
        const double inv = 1.0 / static_cast<double>(n);
        const double sg = static_cast<double>(sign);
        double total = 0.0;
        for (std::size_t j = 0; j < st.psi.size(); ++j) {
            const double psi = st.psi[j] + sg * mo.var[j];
            const double phi = st.phi[j] + sg * mo.mu2[j];
            const double s = st.s[j] + sg * mo.mu[j];
            total += psi * inv + phi - s * s * inv;
        }
        return total;
    }
};

/// J_MM(C) = J_UK(C) / |C|.
struct MmvarObjective {
    static constexpr std::string_view name = "mmvar";

    static double value(const ClusterStats& st) { return j_mm(st); }

    static double after(const ClusterStats& st, const Moments& mo, int sign) {
        const std::size_t n = sign > 0 ? st.size + 1 : st.size - 1;
        if (n == 0) return 0.0;
        const double inv = 1.0 / static_cast<double>(n);
        const double sg = static_cast<double>(sign);
        double total = 0.0;
        for (std::size_t j = 0; j < st.phi.size(); ++j) {
            const double phi = st.phi[j] + sg * mo.mu2[j];
            const double s = st.s[j] + sg * mo.mu[j];
            total += phi - s * s * inv;
        }
        return total / static_cast<double>(n);
    }
};

/// J_UK(C); used by the exhaustive oracle and to score UK-means runs.
struct UkObjective {
    static constexpr std::string_view name = "ukmeans";

    static double value(const ClusterStats& st) { return j_uk(st); }

    static double after(const ClusterStats& st, const Moments& mo, int sign) {
        const std::size_t n = sign > 0 ? st.size + 1 : st.size - 1;
        if (n == 0) return 0.0;
        const double inv = 1.0 / static_cast<double>(n);
        const double sg = static_cast<double>(sign);
        double total = 0.0;
        for (std::size_t j = 0; j < st.phi.size(); ++j) {
            const double phi = st.phi[j] + sg * mo.mu2[j];
            const double s = st.s[j] + sg * mo.mu[j];
            total += phi - s * s * inv;
        }
        return total;
    }
};

template <class T>
concept ClusterObjective = requires(const ClusterStats& st, const Moments& mo) {
    { T::value(st) } -> std::convertible_to<double>;
    { T::after(st, mo, 1) } -> std::convertible_to<double>;
};

/// Change of the total objective when the object with moments `mo` moves
/// from cluster `from` to cluster `to` (both given by their current stats).
template <ClusterObjective Obj>
double relocation_delta(const ClusterStats& from, const ClusterStats& to, const Moments& mo) {
    return (Obj::after(from, mo, -1) - Obj::value(from)) + (Obj::after(to, mo, +1) - Obj::value(to));
}

/// Per-cluster statistics for an assignment, built from scratch.
inline std::vector<ClusterStats> build_stats(const Dataset& data, const std::vector<std::size_t>& assignment,
                                             std::size_t k) {
    std::vector<ClusterStats> stats(k, ClusterStats(data.dim()));
    for (std::size_t i = 0; i < assignment.size(); ++i) stats[assignment[i]].add(data[i].moments());
    return stats;
}

template <ClusterObjective Obj>
double total_objective(const std::vector<ClusterStats>& stats) {
    double v = 0.0;
    for (const auto& st : stats) v += Obj::value(st);
    return v;
}

/// Uniformly random assignment, repaired so that no cluster is empty.
/// Deterministic given seed. The objective field holds the UCPC total.
inline Clustering initial_partition(const Dataset& data, std::size_t k, std::uint64_t seed) {
    const std::size_t n = data.size();
    if (k < 1 || k > n)
        throw argument_error("initial_partition: k = " + std::to_string(k) + " with " + std::to_string(n) +
                             " objects");
    Rng rng = make_rng(seed, 0x1417);
    Clustering c;
    c.k = k;
    c.seed_used = seed;
    c.assignment.resize(n);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
        c.assignment[i] = static_cast<std::size_t>(uniform_index(rng, k));
        ++counts[c.assignment[i]];
    }
    for (std::size_t target = 0; target < k; ++target) {
        while (counts[target] == 0) {
            const auto i = static_cast<std::size_t>(uniform_index(rng, n));
            const std::size_t from = c.assignment[i];
            if (counts[from] > 1) {
                --counts[from];
                ++counts[target];
                c.assignment[i] = target;
            }
        }
    }
    c.stats = build_stats(data, c.assignment, k);
    c.objective = total_objective<UcpcObjective>(c.stats);
    return c;
}

} // namespace ucpc
