#pragma once

// Synthetic uncertainty for deterministic data: every point w gets a pdf
// whose mean is exactly w. From those pdfs we build the perturbed dataset
// (one draw per point) and the uncertain dataset (pdfs truncated to the
// region holding `coverage` of their mass).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ucpc/model.hpp"
#include "ucpc/rng.hpp"

namespace ucpc {

enum class Family { uniform, normal, exponential };

inline std::string_view to_string(Family f) {
    switch (f) {
    case Family::uniform: return "uniform";
    case Family::normal: return "normal";
    case Family::exponential: return "exponential";
    }
    return "?";
}

inline std::optional<Family> parse_family(std::string_view s) {
    if (s == "uniform") return Family::uniform;
    if (s == "normal") return Family::normal;
    if (s == "exponential") return Family::exponential;
    return std::nullopt;
}

struct ParamRange {
    double lo = 0.0;
    double hi = 0.0;
};

struct GenConfig {
    Family family = Family::normal;
    ParamRange uniform_half_width{0.05, 0.25};
    ParamRange normal_stddev{0.02, 0.10};
    ParamRange exponential_scale{0.02, 0.10};  // 1 / rate
    bool relative_to_range = true;  // ranges are fractions of each dimension's data range
    double coverage = 0.95;
    std::uint64_t seed = 0;

    const ParamRange& active_range() const {
        switch (family) {
        case Family::uniform: return uniform_half_width;
        case Family::normal: return normal_stddev;
        case Family::exponential: return exponential_scale;
        }
        return normal_stddev;
    }

    void validate() const {
        const ParamRange& r = active_range();
        if (!(r.lo > 0.0) || !(r.hi >= r.lo) || !std::isfinite(r.hi))
            throw argument_error("gen: parameter range must be positive and finite with lo <= hi");
        if (!(coverage > 0.0 && coverage <= 1.0)) throw argument_error("gen: coverage must lie in (0, 1]");
    }
};

namespace detail {

inline void require_points(const std::vector<Vector>& points) {
    if (points.empty()) throw argument_error("gen: no points");
    const std::size_t m = points.front().size();
    if (m == 0) throw argument_error("gen: points have dimensionality 0");
    for (const auto& p : points)
        if (p.size() != m) throw argument_error("gen: points differ in dimensionality");
}

/// Per-dimension data range; constant dimensions fall back to 1.
inline Vector data_scale(const std::vector<Vector>& points) {
    const std::size_t m = points.front().size();
    Vector lo(points.front()), hi(points.front());
    for (const auto& p : points)
        for (std::size_t j = 0; j < m; ++j) {
            lo[j] = std::min(lo[j], p[j]);
            hi[j] = std::max(hi[j], p[j]);
        }
    Vector scale(m);
    for (std::size_t j = 0; j < m; ++j) scale[j] = hi[j] > lo[j] ? hi[j] - lo[j] : 1.0;
    return scale;
}

} // namespace detail

/// One parametric pdf per point, mean exactly the point. Parameters are drawn
/// uniformly from the family's range; point i uses the stream (seed, i).
inline std::vector<ParametricPdf> assign_pdfs(const std::vector<Vector>& points, const GenConfig& cfg) {
    detail::require_points(points);
    cfg.validate();
    const std::size_t m = points.front().size();
    const Vector scale = cfg.relative_to_range ? detail::data_scale(points) : Vector(m, 1.0);
    const ParamRange& range = cfg.active_range();

    std::vector<ParametricPdf> out;
    out.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        Rng rng = make_rng(cfg.seed, i);
        const Vector& w = points[i];
        Vector param(m);
        for (std::size_t j = 0; j < m; ++j) param[j] = uniform(rng, range.lo, range.hi) * scale[j];
        switch (cfg.family) {
        case Family::uniform: {
            Vector lo(m), hi(m);
            for (std::size_t j = 0; j < m; ++j) {
                lo[j] = w[j] - param[j];
                hi[j] = w[j] + param[j];
            }
            out.emplace_back(UniformParam{Box(std::move(lo), std::move(hi))});
            break;
        }
        case Family::normal:
            out.emplace_back(NormalParam{w, std::move(param)});
            break;
        case Family::exponential: {
            Vector origin(m), rate(m);
            for (std::size_t j = 0; j < m; ++j) {
                rate[j] = 1.0 / param[j];
                origin[j] = w[j] - param[j];
            }
            out.emplace_back(ExponentialParam{std::move(origin), std::move(rate)});
            break;
        }
        }
    }
    return out;
}

/// The perturbed dataset D': each point replaced by one draw from its pdf
/// (a mean-preserving perturbation, since every pdf has mean w).
inline std::vector<Vector> perturb(const std::vector<Vector>& points, const std::vector<ParametricPdf>& pdfs,
                                   std::uint64_t seed) {
    if (points.size() != pdfs.size()) throw argument_error("perturb: points and pdfs are not aligned");
    std::vector<Vector> out;
    out.reserve(pdfs.size());
    for (std::size_t i = 0; i < pdfs.size(); ++i) {
        if (dimension(pdfs[i]) != points[i].size())
            throw argument_error("perturb: point and pdf differ in dimensionality");
        Rng rng = make_rng(seed ^ 0x5eedULL, i);
        out.push_back(sample(pdfs[i], rng));
    }
    return out;
}

/// The uncertain dataset D'': each pdf truncated and renormalized to its
/// `coverage` mass region. Object ids default to the row index.
inline Dataset uncertainize(const std::vector<Vector>& points, const std::vector<ParametricPdf>& pdfs,
                            double coverage, std::optional<Labels> labels = std::nullopt,
                            std::optional<std::vector<std::string>> ids = std::nullopt) {
    if (points.size() != pdfs.size()) throw argument_error("uncertainize: points and pdfs are not aligned");
    if (ids && ids->size() != pdfs.size()) throw argument_error("uncertainize: ids are not aligned");
    std::vector<UncertainObject> objects;
    objects.reserve(pdfs.size());
    for (std::size_t i = 0; i < pdfs.size(); ++i) {
        if (dimension(pdfs[i]) != points[i].size())
            throw argument_error("uncertainize: point and pdf differ in dimensionality");
        std::string id = ids ? (*ids)[i] : std::to_string(i);
        objects.emplace_back(std::move(id), truncate(pdfs[i], mass_region(pdfs[i], coverage)));
    }
    return Dataset(std::move(objects), std::move(labels));
}

} // namespace ucpc
