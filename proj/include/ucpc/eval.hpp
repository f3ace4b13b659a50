#pragma once

// Cluster validity: F-measure against a reference classification, and the
// normalized intra/inter expected-distance criteria.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ucpc/closedform.hpp"
#include "ucpc/clustering.hpp"
#include "ucpc/model.hpp"

namespace ucpc {

/// F = (1/|D|) sum_u |class_u| max_v F_uv, with F_uv the harmonic mean of
/// precision |C_v ∩ class_u| / |C_v| and recall |C_v ∩ class_u| / |class_u|.
/// F_uv is 0 when the two sets do not intersect.
inline double f_measure(const std::vector<std::size_t>& assignment, std::size_t k, const Labels& reference) {
    if (assignment.size() != reference.size())
        throw argument_error("f_measure: assignment and reference differ in length");
    if (assignment.empty()) throw argument_error("f_measure: empty clustering");

    std::map<std::string, std::size_t> class_index;
    for (const auto& l : reference) class_index.emplace(l, class_index.size());
    const std::size_t classes = class_index.size();

    std::vector<std::size_t> cluster_size(k, 0), class_size(classes, 0);
    std::vector<std::size_t> overlap(classes * k, 0);
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        const std::size_t v = assignment[i];
        if (v >= k) throw argument_error("f_measure: cluster index out of range");
        const std::size_t u = class_index.at(reference[i]);
        ++cluster_size[v];
        ++class_size[u];
        ++overlap[u * k + v];
    }

    double total = 0.0;
    for (std::size_t u = 0; u < classes; ++u) {
        double best = 0.0;
        for (std::size_t v = 0; v < k; ++v) {
            const std::size_t both = overlap[u * k + v];
            if (both == 0) continue;
            const double p = static_cast<double>(both) / static_cast<double>(cluster_size[v]);
            const double r = static_cast<double>(both) / static_cast<double>(class_size[u]);
            best = std::max(best, 2.0 * p * r / (p + r));
        }
        total += static_cast<double>(class_size[u]) * best;
    }
    return total / static_cast<double>(assignment.size());
}

inline double f_measure(const Clustering& c, const Labels& reference) {
    return f_measure(c.assignment, c.k, reference);
}

struct InternalQuality {
    double intra = 0.0;
    double inter = 0.0;
    double q = 0.0;
    bool inter_defined = true;      // false when there are fewer than two clusters
    double normalizer = 0.0;        // dataset-wide max pairwise ÊD over distinct objects
};

/// Name of the normalization applied to intra/inter, recorded in reports.
inline constexpr const char* kQualityNormalization = "max-pairwise-expected-distance";

/// intra: mean over clusters of the mean pairwise ÊD inside the cluster
/// (singletons contribute 0); inter: mean over cluster pairs of the mean
/// cross-cluster ÊD. Both are divided by the largest pairwise ÊD between
/// distinct objects of the dataset, so they lie in [0, 1] and q in [-1, 1].
inline InternalQuality internal_quality(const std::vector<std::size_t>& assignment, std::size_t k,
                                        const Dataset& data) {
    if (assignment.size() != data.size())
        throw argument_error("internal_quality: assignment does not match dataset");
    const std::size_t n = data.size();

    std::vector<double> sum(k * k, 0.0);  // sum of ÊD over pairs, upper triangle by cluster
    std::vector<std::size_t> size(k, 0);
    for (std::size_t c : assignment) {
        if (c >= k) throw argument_error("internal_quality: cluster index out of range");
        ++size[c];
    }
    double max_ed = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            const double d = expected_sq_dist_between(data[a], data[b]);
            max_ed = std::max(max_ed, d);
            std::size_t ca = assignment[a], cb = assignment[b];
            if (ca > cb) std::swap(ca, cb);
            sum[ca * k + cb] += d;
        }
    }

    InternalQuality out;
    out.normalizer = max_ed;
    double intra = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        if (size[c] < 2) continue;
        const double pairs = 0.5 * static_cast<double>(size[c]) * static_cast<double>(size[c] - 1);
        intra += sum[c * k + c] / pairs;
    }
    intra /= static_cast<double>(k);

    double inter = 0.0;
    if (k < 2) {
        out.inter_defined = false;
    } else {
        for (std::size_t c = 0; c < k; ++c)
            for (std::size_t d = c + 1; d < k; ++d) {
                const double pairs = static_cast<double>(size[c]) * static_cast<double>(size[d]);
                if (pairs > 0.0) inter += sum[c * k + d] / pairs;
            }
        inter /= 0.5 * static_cast<double>(k) * static_cast<double>(k - 1);
    }

    if (max_ed > 0.0) {
        out.intra = std::clamp(intra / max_ed, 0.0, 1.0);
        out.inter = std::clamp(inter / max_ed, 0.0, 1.0);
    }
    out.q = out.inter - out.intra;
    return out;
}

inline InternalQuality internal_quality(const Clustering& c, const Dataset& data) {
    return internal_quality(c.assignment, c.k, data);
}

/// Θ = F(uncertain run) - F(perturbed run).
inline double theta(double f_uncertain, double f_perturbed) { return f_uncertain - f_perturbed; }

struct EvalReport {
    std::optional<double> f_measure;
    double intra = 0.0;
    double inter = 0.0;
    double quality_q = 0.0;
    bool inter_defined = true;
    std::optional<double> theta;
    double wall_time_ms = 0.0;
    std::string normalization = kQualityNormalization;
};

} // namespace ucpc
