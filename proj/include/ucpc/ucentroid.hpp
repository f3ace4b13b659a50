#pragma once

// U-centroid of a cluster and the sufficient statistics behind the UCPC
// objective J(C) = sum_o ÊD(o, C̄).

#include <algorithm>
#include <cstddef>
#include <string>

#include "ucpc/closedform.hpp"
#include "ucpc/model.hpp"

namespace ucpc {

/// Per-dimension sums over the members of a cluster:
///   psi_j = sum var_j(o),  phi_j = sum mu2_j(o),  s_j = sum mu_j(o).
/// The squared linear sum s_j^2 is derived on demand; keeping s signed makes
/// add/remove valid for negative coordinates too.
struct ClusterStats {
    std::size_t size = 0;
    Vector psi;
    Vector phi;
    Vector s;

    ClusterStats() = default;
    explicit ClusterStats(std::size_t m) : psi(m, 0.0), phi(m, 0.0), s(m, 0.0) {}

    std::size_t dim() const noexcept { return psi.size(); }

    /// In-place add, O(m).
    void add(const Moments& mo) {
        detail::require_same_dim(mo.dim(), dim(), "stats_add");
        ++size;
        for (std::size_t j = 0; j < psi.size(); ++j) {
            psi[j] += mo.var[j];
            phi[j] += mo.mu2[j];
            s[j] += mo.mu[j];
        }
    }

    /// In-place remove, O(m). The caller guarantees `mo` is a member's moments.
    void remove(const Moments& mo) {
        detail::require_same_dim(mo.dim(), dim(), "stats_remove");
        if (size == 0) throw underflow_error("stats_remove: cluster is empty");
        --size;
        if (size == 0) {
            std::fill(psi.begin(), psi.end(), 0.0);
            std::fill(phi.begin(), phi.end(), 0.0);
            std::fill(s.begin(), s.end(), 0.0);
            return;
        }
        for (std::size_t j = 0; j < psi.size(); ++j) {
            psi[j] -= mo.var[j];
            phi[j] -= mo.mu2[j];
            s[j] -= mo.mu[j];
        }
    }
};

template <ObjectRange R>
ClusterStats stats_build(const R& cluster, std::size_t m) {
    ClusterStats st(m);
    for (const auto& x : cluster) st.add(detail::deref(x).moments());
    return st;
}

/// Empty clusters get the zero statistics of the members' dimensionality
/// (m = 0 when the range is empty and no dimension is given).
template <ObjectRange R>
ClusterStats stats_build(const R& cluster) {
    if (std::ranges::empty(cluster)) return ClusterStats{};
    return stats_build(cluster, detail::deref(*std::ranges::begin(cluster)).dim());
}

inline ClusterStats stats_add(ClusterStats st, const UncertainObject& o) {
    st.add(o.moments());
    return st;
}

inline ClusterStats stats_remove(ClusterStats st, const UncertainObject& o) {
    st.remove(o.moments());
    return st;
}

/// J(C) = sum_j ( psi_j/|C| + phi_j - s_j^2/|C| ); 0 for the empty cluster.
inline double j_ucpc(const ClusterStats& st) {
    if (st.size == 0) return 0.0;
    const double inv = 1.0 / static_cast<double>(st.size);
    double total = 0.0;
    for (std::size_t j = 0; j < st.psi.size(); ++j)
        total += st.psi[j] * inv + st.phi[j] - st.s[j] * st.s[j] * inv;
    return total;
}

/// J_UK(C) from the same statistics: sum_j ( phi_j - s_j^2/|C| ).
inline double j_uk(const ClusterStats& st) {
    if (st.size == 0) return 0.0;
    const double inv = 1.0 / static_cast<double>(st.size);
    double total = 0.0;
    for (std::size_t j = 0; j < st.phi.size(); ++j) total += st.phi[j] - st.s[j] * st.s[j] * inv;
    return total;
}

/// J_MM(C) = J_UK(C) / |C|.
inline double j_mm(const ClusterStats& st) {
    if (st.size == 0) return 0.0;
    return j_uk(st) / static_cast<double>(st.size);
}

/// The U-centroid surrogate: averaged region, moments, and variance. Its pdf
/// is not materialized; realizations come from oracle::sample_ucentroid_realization.
struct UCentroid {
    Box region;
    Moments moments;
    double variance = 0.0;
};

/// Member-wise average of the box bounds.
template <ObjectRange R>
Box ucentroid_region(const R& cluster) {
    const std::size_t n = detail::require_nonempty(cluster, "ucentroid_region");
    const std::size_t m = detail::cluster_dim(cluster);
    Vector lo(m, 0.0), hi(m, 0.0);
    for (const auto& x : cluster) {
        const Box& b = detail::deref(x).region();
        for (std::size_t j = 0; j < m; ++j) {
            lo[j] += b.lo[j];
            hi[j] += b.hi[j];
        }
    }
    for (std::size_t j = 0; j < m; ++j) {
        lo[j] /= static_cast<double>(n);
        hi[j] /= static_cast<double>(n);
        hi[j] = std::max(hi[j], lo[j]);
    }
    return Box(std::move(lo), std::move(hi));
}

/// Moments of the U-centroid from member moments: the mean is the average of
/// member means, and the second moment is
///   |C|^-2 ( sum_i mu2(o_i) + 2 sum_{i < i'} mu(o_i) mu(o_i') ).
/// The variance follows as mu2 - mu^2 (clamped at 0).
template <ObjectRange R>
Moments ucentroid_moments(const R& cluster) {
    const std::size_t n = detail::require_nonempty(cluster, "ucentroid_moments");
    const std::size_t m = detail::cluster_dim(cluster);
    const double inv_n = 1.0 / static_cast<double>(n);
    Moments out;
    out.mu.assign(m, 0.0);
    out.mu2.assign(m, 0.0);
    out.var.assign(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        double sum_mu2 = 0.0;
        double cross = 0.0;   // sum_{i < i'} mu_i mu_i'
        double prefix = 0.0;  // sum_{i' < i} mu_i'
        for (const auto& x : cluster) {
            const Moments& mo = detail::deref(x).moments();
            sum_mu2 += mo.mu2[j];
            cross += mo.mu[j] * prefix;
            prefix += mo.mu[j];
        }
        out.mu[j] = prefix * inv_n;
        out.mu2[j] = inv_n * inv_n * (sum_mu2 + 2.0 * cross);
        out.var[j] = detail::clamp_variance(out.mu2[j] - out.mu[j] * out.mu[j]);
        out.total_var += out.var[j];
    }
    return out;
}

/// sigma^2(C̄) = |C|^-2 sum_i sigma^2(o_i).
template <ObjectRange R>
double ucentroid_variance(const R& cluster) {
    const std::size_t n = detail::require_nonempty(cluster, "ucentroid_variance");
    double s = 0.0;
    for (const auto& x : cluster) s += detail::deref(x).moments().total_var;
    return s / (static_cast<double>(n) * static_cast<double>(n));
}

template <ObjectRange R>
UCentroid ucentroid(const R& cluster) {
    return {ucentroid_region(cluster), ucentroid_moments(cluster), ucentroid_variance(cluster)};
}

} // namespace ucpc
