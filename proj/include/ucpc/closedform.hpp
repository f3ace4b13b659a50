#pragma once

// Closed-form expected squared Euclidean distances and the baseline cluster
// objectives (UK-means, MMVar and the all-pairs variant). Everything here
// consumes cached moments only; no pdf is integrated.

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>

#include "ucpc/model.hpp"

namespace ucpc {

namespace detail {

inline void require_same_dim(std::size_t a, std::size_t b, const char* what) {
    if (a != b) throw argument_error(std::string(what) + ": dimension mismatch");
}

template <ObjectRange R>
std::size_t require_nonempty(const R& cluster, const char* what) {
    const auto n = static_cast<std::size_t>(std::ranges::distance(cluster));
    if (n == 0) throw empty_cluster_error(std::string(what) + ": empty cluster");
    return n;
}

template <ObjectRange R>
std::size_t cluster_dim(const R& cluster) {
    const std::size_t m = deref(*std::ranges::begin(cluster)).dim();
    for (const auto& x : cluster) require_same_dim(deref(x).dim(), m, "cluster");
    return m;
}

} // namespace detail

/// ED(o, y) = sigma^2(o) + ||y - mu(o)||^2.
inline double expected_sq_dist_to_point(const UncertainObject& o, std::span<const double> y) {
    detail::require_same_dim(o.dim(), y.size(), "expected_sq_dist_to_point");
    const Moments& mo = o.moments();
    double d2 = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j) {
        const double d = y[j] - mo.mu[j];
        d2 += d * d;
    }
    return mo.total_var + d2;
}

/// Expected squared distance between independent draws of a and b.
/// Note ÊD(o, o) = 2 sigma^2(o), not 0.
inline double expected_sq_dist_between(const Moments& a, const Moments& b) {
    detail::require_same_dim(a.dim(), b.dim(), "expected_sq_dist_between");
    double s = 0.0;
    for (std::size_t j = 0; j < a.dim(); ++j) s += a.mu2[j] - 2.0 * a.mu[j] * b.mu[j] + b.mu2[j];
    return s;
}

inline double expected_sq_dist_between(const UncertainObject& a, const UncertainObject& b) {
    return expected_sq_dist_between(a.moments(), b.moments());
}

/// Mean of the members' expected values.
template <ObjectRange R>
Vector uk_centroid(const R& cluster) {
    const std::size_t n = detail::require_nonempty(cluster, "uk_centroid");
    const std::size_t m = detail::cluster_dim(cluster);
    Vector c(m, 0.0);
    for (const auto& x : cluster) {
        const auto& mu = detail::deref(x).moments().mu;
        for (std::size_t j = 0; j < m; ++j) c[j] += mu[j];
    }
    for (double& v : c) v /= static_cast<double>(n);
    return c;
}

/// UK-means compactness: sum_j ( sum_o mu2_j(o) - (sum_o mu_j(o))^2 / |C| ).
template <ObjectRange R>
double j_uk(const R& cluster) {
    const std::size_t n = detail::require_nonempty(cluster, "j_uk");
    const std::size_t m = detail::cluster_dim(cluster);
    double total = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        double phi = 0.0;
        double s = 0.0;
        for (const auto& x : cluster) {
            const Moments& mo = detail::deref(x).moments();
            phi += mo.mu2[j];
            s += mo.mu[j];
        }
        total += std::max(0.0, phi - s * s / static_cast<double>(n));
    }
    return total;
}

/// Moments of the MMVar mixture centroid; the mixture pdf itself is never built.
struct MixtureCentroid {
    Vector mu;
    Vector mu2;
    std::size_t size = 0;
};

template <ObjectRange R>
MixtureCentroid mixture_moments(const R& cluster) {
    const std::size_t n = detail::require_nonempty(cluster, "mixture_moments");
    const std::size_t m = detail::cluster_dim(cluster);
    MixtureCentroid c{Vector(m, 0.0), Vector(m, 0.0), n};
    for (const auto& x : cluster) {
        const Moments& mo = detail::deref(x).moments();
        for (std::size_t j = 0; j < m; ++j) {
            c.mu[j] += mo.mu[j];
            c.mu2[j] += mo.mu2[j];
        }
    }
    for (std::size_t j = 0; j < m; ++j) {
        c.mu[j] /= static_cast<double>(n);
        c.mu2[j] /= static_cast<double>(n);
    }
    return c;
}

/// MMVar compactness: total variance of the mixture centroid.
template <ObjectRange R>
double j_mm(const R& cluster) {
    const MixtureCentroid c = mixture_moments(cluster);
    double total = 0.0;
    for (std::size_t j = 0; j < c.mu.size(); ++j) total += std::max(0.0, c.mu2[j] - c.mu[j] * c.mu[j]);
    return total;
}

/// Sum over members of ÊD(o, mixture centroid).
template <ObjectRange R>
double j_hat(const R& cluster) {
    const MixtureCentroid c = mixture_moments(cluster);
    double total = 0.0;
    for (const auto& x : cluster) {
        const Moments& mo = detail::deref(x).moments();
        for (std::size_t j = 0; j < c.mu.size(); ++j)
            total += mo.mu2[j] - 2.0 * mo.mu[j] * c.mu[j] + c.mu2[j];
    }
    return total;
}

} // namespace ucpc
