#pragma once

// Self-verification suites behind `ucpc verify`: algebraic identities between
// the closed forms on randomized clusters, and closed forms against the
// Monte-Carlo oracle.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "ucpc/closedform.hpp"
#include "ucpc/clustering.hpp"
#include "ucpc/oracle.hpp"
#include "ucpc/random_objects.hpp"
#include "ucpc/ucentroid.hpp"

namespace ucpc::verify {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct Options {
    std::size_t samples = 100000;
    std::uint64_t seed = 1;
    bool inject_fault = false;  // deliberately breaks one identity
};

namespace detail {

inline double rel_gap(double a, double b) { return std::abs(a - b) / (1.0 + std::abs(b)); }

inline std::vector<UncertainObject> random_cluster(Rng& rng, std::size_t max_m = 8, std::size_t max_size = 64) {
    const std::size_t m = 1 + uniform_index(rng, max_m);
    const std::size_t n = 1 + uniform_index(rng, max_size);
    return random_objects(rng, n, m);
}

inline CheckResult make(std::string name, bool ok, const std::ostringstream& detail) {
    return {std::move(name), ok, detail.str()};
}

inline Empirical two_point(double a, double b) { return Empirical{{{a}, {b}}, {0.5, 0.5}}; }

} // namespace detail

inline std::vector<CheckResult> identities(const Options& opt) {
    std::vector<CheckResult> out;
    Rng rng = make_rng(opt.seed, 0x1d);
    constexpr std::size_t kClusters = 200;
    constexpr double kTol = 1e-9;

    double worst_mm = 0.0, worst_hat = 0.0, worst_l1 = 0.0, worst_t3 = 0.0, worst_t2 = 0.0;
    for (std::size_t t = 0; t < kClusters; ++t) {
        const auto c = detail::random_cluster(rng);
        const double juk = j_uk(c);
        double jhat = j_hat(c);
        if (opt.inject_fault) jhat *= 1.0 + 1e-6;
        worst_mm = std::max(worst_mm, detail::rel_gap(j_mm(c), juk / static_cast<double>(c.size())));
        worst_hat = std::max(worst_hat, detail::rel_gap(jhat, 2.0 * juk));

        const Vector centre = uk_centroid(c);
        double summed = 0.0, var_sum = 0.0;
        for (const auto& o : c) {
            summed += expected_sq_dist_to_point(o, centre);
            var_sum += o.moments().total_var;
        }
        worst_l1 = std::max(worst_l1, std::abs(juk - summed) / (1.0 + std::abs(summed)));
        worst_t3 = std::max(worst_t3, detail::rel_gap(j_ucpc(stats_build(c)),
                                                      var_sum / static_cast<double>(c.size()) + juk));
        worst_t2 = std::max(worst_t2, detail::rel_gap(ucentroid_variance(c), ucentroid_moments(c).total_var));
    }
    auto add = [&](const char* name, double worst) {
        std::ostringstream d;
        d << "max relative gap " << worst << " over " << kClusters << " clusters (tolerance " << kTol << ")";
        out.push_back(detail::make(name, worst <= kTol, d));
    };
    add("mmvar-equals-uk-over-size", worst_mm);
    add("all-pairs-equals-twice-uk", worst_hat);
    add("uk-closed-form-equals-summed-distances", worst_l1);
    add("ucpc-objective-two-forms", worst_t3);
    add("ucentroid-variance-two-routes", worst_t2);

    {
        // Same J_UK, different summed variance; J separates them.
        const std::vector<UncertainObject> c1{UncertainObject("a", detail::two_point(0, 2)),
                                              UncertainObject("b", detail::two_point(0, 2))};
        const std::vector<UncertainObject> c2{UncertainObject::point("c", {0.0}), UncertainObject::point("d", {2.0})};
        const bool ok = j_uk(c1) == 2.0 && j_uk(c2) == 2.0 && j_ucpc(stats_build(c1)) == 3.0 &&
                        j_ucpc(stats_build(c2)) == 2.0;
        std::ostringstream d;
        d << "J_UK " << j_uk(c1) << " vs " << j_uk(c2) << ", J " << j_ucpc(stats_build(c1)) << " vs "
          << j_ucpc(stats_build(c2));
        out.push_back(detail::make("equal-uk-objective-witness", ok, d));
    }
    {
        const std::vector<UncertainObject> a{UncertainObject::point("a0", {0.0}), UncertainObject::point("a1", {10.0})};
        const std::vector<UncertainObject> b{UncertainObject("b0", detail::two_point(-1, 1)),
                                             UncertainObject("b1", detail::two_point(-1, 1))};
        const bool ok = ucentroid_variance(a) == 0.0 && ucentroid_variance(b) == 0.5 &&
                        j_ucpc(stats_build(a)) == 50.0 && j_ucpc(stats_build(b)) == 3.0;
        std::ostringstream d;
        d << "variance " << ucentroid_variance(a) << " vs " << ucentroid_variance(b) << ", J "
          << j_ucpc(stats_build(a)) << " vs " << j_ucpc(stats_build(b));
        out.push_back(detail::make("variance-vs-objective-ranking", ok, d));
    }
    {
        // Incremental statistics against rebuilds along a random walk.
        constexpr std::size_t kSteps = 10000;
        const auto pool = random_objects(rng, 40, 3);
        std::vector<bool> in(pool.size(), false);
        ClusterStats st(3);
        double worst = 0.0;
        for (std::size_t step = 1; step <= kSteps; ++step) {
            const std::size_t i = uniform_index(rng, pool.size());
            if (in[i]) st.remove(pool[i].moments());
            else st.add(pool[i].moments());
            in[i] = !in[i];
            if (step % 100 == 0) {
                std::vector<const UncertainObject*> members;
                for (std::size_t q = 0; q < pool.size(); ++q)
                    if (in[q]) members.push_back(&pool[q]);
                const double fresh = j_ucpc(stats_build(members, 3));
                worst = std::max(worst, std::abs(j_ucpc(st) - fresh) / (1.0 + std::abs(fresh)));
            }
        }
        std::ostringstream d;
        d << "max relative drift " << worst << " over " << kSteps << " add/remove steps (tolerance 1e-6)";
        out.push_back(detail::make("incremental-stats-drift", worst <= 1e-6, d));
    }
    return out;
}

inline std::vector<CheckResult> oracle_checks(const Options& opt) {
    std::vector<CheckResult> out;
    Rng rng = make_rng(opt.seed, 0x0c);
    const std::size_t n = std::max<std::size_t>(opt.samples, 2);
    const bool widened = n < 1000;
    const double band = widened ? 6.0 : 4.0;
    auto within = [&](const char* name, double closed, const oracle::MCEstimate& e) {
        const double gap = std::abs(e.mean - closed);
        const bool ok = e.std_error == 0.0 ? gap <= 1e-9 * (1.0 + std::abs(closed)) : gap <= band * e.std_error;
        std::ostringstream d;
        d << "closed " << closed << ", MC " << e.mean << " +/- " << e.std_error << " (" << n << " samples, band "
          << band << " SE" << (widened ? ", widened" : "") << ")";
        out.push_back(detail::make(name, ok, d));
    };

    const std::size_t m = 3;
    const auto o = random_object(rng, m, "o", RandomKind::normal);
    const auto p = random_object(rng, m, "p", RandomKind::exponential);
    Vector y(m);
    for (double& v : y) v = uniform(rng, -5.0, 5.0);
    within("point-distance-vs-mc", expected_sq_dist_to_point(o, y),
           oracle::mc_expected_dist(o, y, n, derive_seed(opt.seed, 1)));
    within("object-distance-vs-mc", expected_sq_dist_between(o, p),
           oracle::mc_expected_dist(o, p, n, derive_seed(opt.seed, 2)));

    const auto cluster = random_objects(rng, 5, m);
    const Moments cm = ucentroid_moments(cluster);
    {
        // Mean of the realizations, first coordinate; spread about the exact
        // mean for the variance.
        oracle::RunningStats first, spread;
        Rng r = make_rng(opt.seed, 3);
        for (std::size_t s = 0; s < n; ++s) {
            const Vector x = oracle::sample_ucentroid_realization(cluster, r);
            first.push(x[0]);
            double d2 = 0.0;
            for (std::size_t j = 0; j < m; ++j) d2 += (x[j] - cm.mu[j]) * (x[j] - cm.mu[j]);
            spread.push(d2);
        }
        within("ucentroid-mean-vs-mc", cm.mu[0], first.estimate());
        within("ucentroid-variance-vs-mc", ucentroid_variance(cluster), spread.estimate());
    }
    {
        Dataset data(random_objects(rng, 8, m));
        const Clustering c = initial_partition(data, 3, derive_seed(opt.seed, 4));
        within("ucpc-objective-vs-mc", total_objective<UcpcObjective>(c.stats),
               oracle::mc_objective(c, data, n, derive_seed(opt.seed, 5)));
    }
    return out;
}

} // namespace ucpc::verify
