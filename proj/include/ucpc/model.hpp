#pragma once

// Uncertain objects: box-shaped domain regions carrying a per-dimension
// independent pdf, with first and second moments cached at construction.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <ranges>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include <boost/math/special_functions/erf.hpp>

#include "ucpc/error.hpp"
#include "ucpc/rng.hpp"

namespace ucpc {

using Vector = std::vector<double>;

// ---------------------------------------------------------------------------
// Box
// ---------------------------------------------------------------------------

/// Axis-aligned box [lo_1, hi_1] x ... x [lo_m, hi_m].
struct Box {
    Vector lo;
    Vector hi;

    Box() = default;
    Box(Vector lo_, Vector hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
        if (lo.empty())
            throw argument_error("box: dimensionality must be at least 1");
        if (lo.size() != hi.size())
            throw argument_error("box: lo and hi differ in dimensionality");
        for (std::size_t j = 0; j < lo.size(); ++j) {
            if (!std::isfinite(lo[j]) || !std::isfinite(hi[j]))
                throw argument_error("box: bounds must be finite");
            if (lo[j] > hi[j])
                throw argument_error("box: lo > hi in dimension " + std::to_string(j));
        }
    }

    std::size_t dim() const noexcept { return lo.size(); }

    bool contains(std::span<const double> x) const noexcept {
        if (x.size() != lo.size()) return false;
        for (std::size_t j = 0; j < x.size(); ++j)
            if (!(x[j] >= lo[j] && x[j] <= hi[j])) return false;
        return true;
    }

    friend bool operator==(const Box&, const Box&) = default;
};

// ---------------------------------------------------------------------------
// Pdf specifications
// ---------------------------------------------------------------------------

struct UniformBox {
    Box box;
};

/// Per-dimension independent normal, renormalized over `box`.
struct TruncatedNormal {
    Vector mean;
    Vector stddev;
    Box box;
};

/// Per-dimension density proportional to rate * exp(-rate * (x - origin)),
/// x >= origin, renormalized over `box`. The box must satisfy lo >= origin.
struct TruncatedExponential {
    Vector origin;
    Vector rate;
    Box box;
};

/// Discrete sample-based pdf; its region is the tight bounding box.
struct Empirical {
    std::vector<Vector> points;
    Vector weights;
};

using PdfSpec = std::variant<UniformBox, TruncatedNormal, TruncatedExponential, Empirical>;

struct Moments {
    Vector mu;
    Vector mu2;
    Vector var;
    double total_var = 0.0;

    std::size_t dim() const noexcept { return mu.size(); }
};

namespace detail {

inline constexpr double kInvSqrt2 = 0.70710678118654752440;
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

inline std::atomic<std::size_t>& clamped_variance_counter() {
    static std::atomic<std::size_t> counter{0};
    return counter;
}

/// Clamp tiny negative variances produced by cancellation.
inline double clamp_variance(double v) {
    if (v < 0.0) {
        clamped_variance_counter().fetch_add(1, std::memory_order_relaxed);
        return 0.0;
    }
    return v;
}

inline double normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }

/// Standard normal inverse CDF, p in (0, 1).
inline double normal_quantile(double p) {
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

struct Moments1d {
    double mean;
    double var;
};

inline Moments1d uniform_moments(double lo, double hi) {
    const double w = hi - lo;
    return {0.5 * (lo + hi), w * w / 12.0};
}

/// Moments of N(mean, sd^2) restricted to [lo, hi].
inline Moments1d truncated_normal_moments(double mean, double sd, double lo, double hi) {
    if (lo == hi) return {lo, 0.0};
    double a = (lo - mean) / sd;
    double b = (hi - mean) / sd;
    // Work on the side of the mean where the CDF difference is accurate.
    const bool reflect = a > 0.0;
    if (reflect) {
        std::swap(a, b);
        a = -a;
        b = -b;
    }
    const double z = normal_cdf(b) - normal_cdf(a);
    if (!(z > 0.0) || !std::isfinite(z))
        throw degenerate_support_error("truncated normal: box carries no probability mass");
    const double pa = normal_pdf(a);
    const double pb = normal_pdf(b);
    double m = (pa - pb) / z;
    double v = 1.0 + (a * pa - b * pb) / z - m * m;
    if (reflect) m = -m;
    double out_mean = mean + sd * m;
    out_mean = std::clamp(out_mean, lo, hi);
    return {out_mean, clamp_variance(v) * sd * sd};
}

/// Moments of the exponential (origin, rate) restricted to [lo, hi], lo >= origin.
/// The result does not depend on origin once lo >= origin (memorylessness).
inline Moments1d truncated_exponential_moments(double rate, double lo, double hi) {
    if (lo == hi) return {lo, 0.0};
    const double w = hi - lo;
    const double x = rate * w;
    double h;  // (mean - lo) / w
    double g;  // var / w^2
    if (x < 1e-3) {
        const double x2 = x * x;
        h = 0.5 - x / 12.0 + x * x2 / 720.0;
        g = 1.0 / 12.0 - x2 / 240.0 + x2 * x2 / 6048.0;
    } else {
        const double t = std::expm1(x);
        h = 1.0 / x - 1.0 / t;
        g = 1.0 / (x * x) - (1.0 / t) * (1.0 + 1.0 / t);
    }
    return {std::clamp(lo + w * h, lo, hi), clamp_variance(g) * w * w};
}

[[noreturn]] inline void bad_pdf(const std::string& what) {
    throw argument_error("pdf: " + what);
}

inline void check_params(const Vector& p, const Box& box, const char* name, bool positive) {
    if (p.size() != box.dim()) bad_pdf(std::string(name) + " has wrong dimensionality");
    for (double v : p) {
        if (!std::isfinite(v)) bad_pdf(std::string(name) + " must be finite");
        if (positive && !(v > 0.0)) bad_pdf(std::string(name) + " must be positive");
    }
}

} // namespace detail

/// Number of variances clamped to zero since process start.
inline std::size_t clamped_variance_count() {
    return detail::clamped_variance_counter().load(std::memory_order_relaxed);
}

/// Throws argument_error if `pdf` violates its variant's invariants.
inline void validate(const PdfSpec& pdf) {
    std::visit(
        [](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, UniformBox>) {
                if (p.box.dim() == 0) detail::bad_pdf("uniform box is empty");
            } else if constexpr (std::is_same_v<T, TruncatedNormal>) {
                if (p.box.dim() == 0) detail::bad_pdf("normal box is empty");
                detail::check_params(p.mean, p.box, "normal mean", false);
                detail::check_params(p.stddev, p.box, "normal stddev", true);
            } else if constexpr (std::is_same_v<T, TruncatedExponential>) {
                if (p.box.dim() == 0) detail::bad_pdf("exponential box is empty");
                detail::check_params(p.origin, p.box, "exponential origin", false);
                detail::check_params(p.rate, p.box, "exponential rate", true);
                for (std::size_t j = 0; j < p.box.dim(); ++j)
                    if (p.box.lo[j] < p.origin[j])
                        detail::bad_pdf("exponential box extends below its origin");
            } else {
                if (p.points.empty()) detail::bad_pdf("empirical pdf has no points");
                if (p.points.size() != p.weights.size())
                    detail::bad_pdf("empirical points and weights differ in length");
                const std::size_t m = p.points.front().size();
                if (m == 0) detail::bad_pdf("empirical points have dimensionality 0");
                double total = 0.0;
                for (std::size_t i = 0; i < p.points.size(); ++i) {
                    if (p.points[i].size() != m)
                        detail::bad_pdf("empirical points differ in dimensionality");
                    for (double v : p.points[i])
                        if (!std::isfinite(v)) detail::bad_pdf("empirical point is not finite");
                    if (!(p.weights[i] >= 0.0) || !std::isfinite(p.weights[i]))
                        detail::bad_pdf("empirical weights must be nonnegative");
                    total += p.weights[i];
                }
                if (std::abs(total - 1.0) > 1e-12) detail::bad_pdf("empirical weights must sum to 1");
            }
        },
        pdf);
}

inline std::size_t dimension(const PdfSpec& pdf) {
    return std::visit(
        [](const auto& p) -> std::size_t {
            if constexpr (std::is_same_v<std::decay_t<decltype(p)>, Empirical>)
                return p.points.empty() ? 0 : p.points.front().size();
            else
                return p.box.dim();
        },
        pdf);
}

/// The region on which the pdf lives.
inline Box support_box(const PdfSpec& pdf) {
    return std::visit(
        [](const auto& p) -> Box {
            if constexpr (std::is_same_v<std::decay_t<decltype(p)>, Empirical>) {
                Vector lo = p.points.front();
                Vector hi = p.points.front();
                for (const auto& x : p.points)
                    for (std::size_t j = 0; j < x.size(); ++j) {
                        lo[j] = std::min(lo[j], x[j]);
                        hi[j] = std::max(hi[j], x[j]);
                    }
                return Box(std::move(lo), std::move(hi));
            } else {
                return p.box;
            }
        },
        pdf);
}

/// Analytic per-dimension moments. Truncated families use the exact
/// renormalized formulas; a dimension with lo == hi is a point mass.
inline Moments compute_moments(const PdfSpec& pdf) {
    validate(pdf);
    const std::size_t m = dimension(pdf);
    Moments out;
    out.mu.assign(m, 0.0);
    out.mu2.assign(m, 0.0);
    out.var.assign(m, 0.0);

    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Empirical>) {
                for (std::size_t i = 0; i < p.points.size(); ++i)
                    for (std::size_t j = 0; j < m; ++j) {
                        out.mu[j] += p.weights[i] * p.points[i][j];
                        out.mu2[j] += p.weights[i] * p.points[i][j] * p.points[i][j];
                    }
                for (std::size_t i = 0; i < p.points.size(); ++i)
                    for (std::size_t j = 0; j < m; ++j) {
                        const double d = p.points[i][j] - out.mu[j];
                        out.var[j] += p.weights[i] * d * d;
                    }
            } else {
                for (std::size_t j = 0; j < m; ++j) {
                    const double lo = p.box.lo[j];
                    const double hi = p.box.hi[j];
                    detail::Moments1d d;
                    if constexpr (std::is_same_v<T, UniformBox>)
                        d = detail::uniform_moments(lo, hi);
                    else if constexpr (std::is_same_v<T, TruncatedNormal>)
                        d = detail::truncated_normal_moments(p.mean[j], p.stddev[j], lo, hi);
                    else
                        d = detail::truncated_exponential_moments(p.rate[j], lo, hi);
                    out.mu[j] = d.mean;
                    out.var[j] = d.var;
                    out.mu2[j] = d.var + d.mean * d.mean;
                }
            }
        },
        pdf);

    for (double v : out.var) out.total_var += v;
    return out;
}

namespace detail {

inline constexpr int kMaxSampleAttempts = 64;

inline double sample_truncated_normal(double mean, double sd, double lo, double hi, Rng& rng) {
    if (lo == hi) return lo;
    double a = (lo - mean) / sd;
    double b = (hi - mean) / sd;
    const bool reflect = a > 0.0;
    if (reflect) {
        std::swap(a, b);
        a = -a;
        b = -b;
    }
    const double ca = normal_cdf(a);
    const double cb = normal_cdf(b);
    for (int attempt = 0; attempt < kMaxSampleAttempts; ++attempt) {
        const double p = ca + (cb - ca) * uniform01_open(rng);
        if (!(p > 0.0 && p < 1.0)) continue;
        double z = normal_quantile(p);
        if (!std::isfinite(z)) continue;
        if (reflect) z = -z;
        return std::clamp(mean + sd * z, lo, hi);
    }
    throw sampling_error("truncated normal: inverse-CDF sampling failed");
}

inline double sample_truncated_exponential(double rate, double lo, double hi, Rng& rng) {
    if (lo == hi) return lo;
    const double mass = -std::expm1(-rate * (hi - lo));
    for (int attempt = 0; attempt < kMaxSampleAttempts; ++attempt) {
        const double u = uniform01_open(rng);
        const double offset = -std::log1p(-u * mass) / rate;
        if (std::isfinite(offset)) return std::clamp(lo + offset, lo, hi);
    }
    throw sampling_error("truncated exponential: inverse-CDF sampling failed");
}

} // namespace detail

/// One draw from `pdf` written into `out` (size m). Draws always lie in the support box.
inline void sample_into(const PdfSpec& pdf, Rng& rng, std::span<double> out) {
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Empirical>) {
                double u = uniform01(rng);
                std::size_t pick = p.points.size() - 1;
                for (std::size_t i = 0; i < p.weights.size(); ++i) {
                    if (u < p.weights[i]) {
                        pick = i;
                        break;
                    }
                    u -= p.weights[i];
                }
                // skip zero-weight tail entries the fallback may land on
                while (pick > 0 && p.weights[pick] == 0.0) --pick;
                std::copy(p.points[pick].begin(), p.points[pick].end(), out.begin());
            } else {
                for (std::size_t j = 0; j < out.size(); ++j) {
                    const double lo = p.box.lo[j];
                    const double hi = p.box.hi[j];
                    if constexpr (std::is_same_v<T, UniformBox>)
                        out[j] = lo == hi ? lo : std::min(uniform(rng, lo, hi), hi);
                    else if constexpr (std::is_same_v<T, TruncatedNormal>)
                        out[j] = detail::sample_truncated_normal(p.mean[j], p.stddev[j], lo, hi, rng);
                    else
                        out[j] = detail::sample_truncated_exponential(p.rate[j], lo, hi, rng);
                }
            }
        },
        pdf);
}

inline Vector sample(const PdfSpec& pdf, Rng& rng) {
    Vector x(dimension(pdf));
    sample_into(pdf, rng, x);
    return x;
}

// ---------------------------------------------------------------------------
// Uncertain objects and datasets
// ---------------------------------------------------------------------------

/// An uncertain object (region, pdf). Immutable; moments are computed once.
class UncertainObject {
public:
    UncertainObject(std::string id, PdfSpec pdf)
        : id_(std::move(id)), pdf_(std::move(pdf)), moments_(compute_moments(pdf_)),
          region_(support_box(pdf_)) {}

    /// A deterministic point, i.e. a point mass.
    static UncertainObject point(std::string id, Vector x) {
        Box b(x, x);
        return UncertainObject(std::move(id), UniformBox{std::move(b)});
    }

    const std::string& id() const noexcept { return id_; }
    const PdfSpec& pdf() const noexcept { return pdf_; }
    const Moments& moments() const noexcept { return moments_; }
    const Box& region() const noexcept { return region_; }
    std::size_t dim() const noexcept { return moments_.mu.size(); }

    void sample_into(Rng& rng, std::span<double> out) const { ucpc::sample_into(pdf_, rng, out); }
    Vector sample(Rng& rng) const { return ucpc::sample(pdf_, rng); }

private:
    std::string id_;
    PdfSpec pdf_;
    Moments moments_;
    Box region_;
};

using Labels = std::vector<std::string>;

class Dataset {
public:
    Dataset() = default;
    explicit Dataset(std::vector<UncertainObject> objects, std::optional<Labels> labels = std::nullopt)
        : objects_(std::move(objects)), labels_(std::move(labels)) {
        if (!objects_.empty()) {
            const std::size_t m = objects_.front().dim();
            for (const auto& o : objects_)
                if (o.dim() != m) throw data_error("dataset: objects differ in dimensionality");
        }
        if (labels_ && labels_->size() != objects_.size())
            throw data_error("dataset: labels do not align with objects");
    }

    std::size_t size() const noexcept { return objects_.size(); }
    bool empty() const noexcept { return objects_.empty(); }
    std::size_t dim() const noexcept { return objects_.empty() ? 0 : objects_.front().dim(); }

    const UncertainObject& operator[](std::size_t i) const { return objects_[i]; }
    const std::vector<UncertainObject>& objects() const noexcept { return objects_; }
    const std::optional<Labels>& labels() const noexcept { return labels_; }

    auto begin() const noexcept { return objects_.begin(); }
    auto end() const noexcept { return objects_.end(); }

private:
    std::vector<UncertainObject> objects_;
    std::optional<Labels> labels_;
};

// ---------------------------------------------------------------------------
// Untruncated parametric pdfs (input to the uncertainty-generation protocol)
// ---------------------------------------------------------------------------

struct UniformParam {
    Box box;
};
struct NormalParam {
    Vector mean;
    Vector stddev;
};
struct ExponentialParam {
    Vector origin;
    Vector rate;
};

using ParametricPdf = std::variant<UniformParam, NormalParam, ExponentialParam>;

inline std::size_t dimension(const ParametricPdf& pdf) {
    return std::visit(
        [](const auto& p) -> std::size_t {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, UniformParam>) return p.box.dim();
            else if constexpr (std::is_same_v<T, NormalParam>) return p.mean.size();
            else return p.origin.size();
        },
        pdf);
}

inline Vector mean(const ParametricPdf& pdf) {
    return std::visit(
        [](const auto& p) -> Vector {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, UniformParam>) {
                Vector mu(p.box.dim());
                for (std::size_t j = 0; j < mu.size(); ++j) mu[j] = 0.5 * (p.box.lo[j] + p.box.hi[j]);
                return mu;
            } else if constexpr (std::is_same_v<T, NormalParam>) {
                return p.mean;
            } else {
                Vector mu(p.origin.size());
                for (std::size_t j = 0; j < mu.size(); ++j) mu[j] = p.origin[j] + 1.0 / p.rate[j];
                return mu;
            }
        },
        pdf);
}

/// Per-dimension interval holding `coverage` of the mass: the central interval
/// for normals, the lower interval [origin, q] for exponentials, and the box
/// itself for uniforms.
inline Box mass_region(const ParametricPdf& pdf, double coverage) {
    if (!(coverage > 0.0 && coverage <= 1.0))
        throw argument_error("mass_region: coverage must lie in (0, 1]");
    return std::visit(
        [coverage](const auto& p) -> Box {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, UniformParam>) {
                return p.box;
            } else {
                if (coverage == 1.0)
                    throw argument_error("mass_region: full coverage of an unbounded pdf");
                if constexpr (std::is_same_v<T, NormalParam>) {
                    const double z = detail::normal_quantile(0.5 + 0.5 * coverage);
                    Vector lo(p.mean.size()), hi(p.mean.size());
                    for (std::size_t j = 0; j < lo.size(); ++j) {
                        lo[j] = p.mean[j] - z * p.stddev[j];
                        hi[j] = p.mean[j] + z * p.stddev[j];
                    }
                    return Box(std::move(lo), std::move(hi));
                } else {
                    const double tail = -std::log1p(-coverage);
                    Vector lo(p.origin), hi(p.origin.size());
                    for (std::size_t j = 0; j < hi.size(); ++j) hi[j] = p.origin[j] + tail / p.rate[j];
                    return Box(std::move(lo), std::move(hi));
                }
            }
        },
        pdf);
}

/// One draw from an untruncated parametric pdf.
inline Vector sample(const ParametricPdf& pdf, Rng& rng) {
    return std::visit(
        [&rng](const auto& p) -> Vector {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, UniformParam>) {
                return sample(PdfSpec{UniformBox{p.box}}, rng);
            } else if constexpr (std::is_same_v<T, NormalParam>) {
                Vector x(p.mean.size());
                for (std::size_t j = 0; j < x.size(); ++j)
                    x[j] = p.mean[j] + p.stddev[j] * detail::normal_quantile(uniform01_open(rng));
                return x;
            } else {
                Vector x(p.origin.size());
                for (std::size_t j = 0; j < x.size(); ++j)
                    x[j] = p.origin[j] - std::log1p(-uniform01(rng)) / p.rate[j];
                return x;
            }
        },
        pdf);
}

/// The parametric pdf restricted (and renormalized) to `region`.
inline PdfSpec truncate(const ParametricPdf& pdf, Box region) {
    return std::visit(
        [&region](const auto& p) -> PdfSpec {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, UniformParam>)
                return UniformBox{std::move(region)};
            else if constexpr (std::is_same_v<T, NormalParam>)
                return TruncatedNormal{p.mean, p.stddev, std::move(region)};
            else
                return TruncatedExponential{p.origin, p.rate, std::move(region)};
        },
        pdf);
}

// ---------------------------------------------------------------------------
// Clusters as ranges of objects
// ---------------------------------------------------------------------------

namespace detail {
inline const UncertainObject& deref(const UncertainObject& o) noexcept { return o; }
inline const UncertainObject& deref(const UncertainObject* o) noexcept { return *o; }
inline const UncertainObject& deref(std::reference_wrapper<const UncertainObject> o) noexcept {
    return o.get();
}
} // namespace detail

/// A cluster: any forward range of objects, object pointers or references.
template <class R>
concept ObjectRange = std::ranges::forward_range<R> &&
    requires(std::ranges::range_reference_t<R> x) {
        { detail::deref(x) } -> std::same_as<const UncertainObject&>;
    };

} // namespace ucpc
