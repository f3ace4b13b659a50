// External and internal validity criteria.

#include "catch_amalgamated.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <vector>

#include "support.hpp"
#include "ucpc/eval.hpp"
#include "ucpc/random_objects.hpp"

using namespace ucpc;
using Catch::Approx;

namespace {

// Direct transcription of the F-measure definition, used as the reference.
double f_reference(const std::vector<std::size_t>& a, const Labels& ref) {
    std::vector<std::string> classes(ref);
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    const std::size_t k = *std::max_element(a.begin(), a.end()) + 1;
    double total = 0.0;
    for (const auto& u : classes) {
        double cu = 0.0;
        for (const auto& l : ref) cu += l == u;
        double best = 0.0;
        for (std::size_t v = 0; v < k; ++v) {
            double cv = 0.0, both = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) {
                cv += a[i] == v;
                both += a[i] == v && ref[i] == u;
            }
            if (cv == 0.0) continue;
            const double p = both / cv, r = both / cu;
            if (p + r > 0.0) best = std::max(best, 2.0 * p * r / (p + r));
        }
        total += cu * best;
    }
    return total / static_cast<double>(a.size());
}

} // namespace

TEST_CASE("F-measure examples", "[eval][f]") {
    const Labels ref{"a", "a", "b", "b", "c"};
    REQUIRE(f_measure({0, 0, 1, 1, 2}, 3, ref) == 1.0);
    REQUIRE(f_measure({2, 2, 0, 0, 1}, 3, ref) == 1.0);

    const Labels halves{"x", "x", "x", "y", "y", "y"};
    REQUIRE(f_measure({0, 0, 0, 0, 0, 0}, 1, halves) == Approx(2.0 / 3.0).epsilon(1e-15));

    // Class "b" overlaps cluster 1 only.
    const Labels ref2{"a", "a", "b"};
    REQUIRE(f_measure({0, 0, 1}, 2, ref2) == 1.0);
    REQUIRE(f_measure({0, 0, 0}, 2, ref2) == Approx(f_reference({0, 0, 0}, ref2)).epsilon(1e-15));

    REQUIRE_THROWS_AS(f_measure({0, 1}, 2, ref), argument_error);
    REQUIRE_THROWS_AS(f_measure({0, 0, 1, 1, 3}, 3, ref), argument_error);
}

TEST_CASE("F-measure against the definition on random inputs", "[eval][f][property]") {
    Rng rng = make_rng(1);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 2 + uniform_index(rng, 60);
        const std::size_t k = 1 + uniform_index(rng, std::min<std::size_t>(n, 6));
        const std::size_t classes = 1 + uniform_index(rng, 5);
        std::vector<std::size_t> a(n);
        Labels ref(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = i < k ? i : uniform_index(rng, k);
            ref[i] = "c" + std::to_string(uniform_index(rng, classes));
        }
        const double f = f_measure(a, k, ref);
        REQUIRE(f == Approx(f_reference(a, ref)).epsilon(1e-12));
        REQUIRE(f >= 0.0);
        REQUIRE(f <= 1.0);

        // Relabel clusters and classes.
        std::vector<std::size_t> perm(k);
        std::iota(perm.begin(), perm.end(), 0);
        std::reverse(perm.begin(), perm.end());
        std::vector<std::size_t> a2(n);
        Labels ref2(n);
        for (std::size_t i = 0; i < n; ++i) {
            a2[i] = perm[a[i]];
            ref2[i] = "z" + ref[i];
        }
        REQUIRE(f_measure(a2, k, ref2) == Approx(f).epsilon(1e-12));
    }
}

TEST_CASE("F-measure of all-singleton clusterings", "[eval][f][property]") {
    Rng rng = make_rng(2);
    for (int t = 0; t < 20; ++t) {
        const std::size_t n = 2 + uniform_index(rng, 40);
        Labels ref(n);
        for (auto& l : ref) l = std::to_string(uniform_index(rng, 4));
        std::vector<std::size_t> a(n);
        std::iota(a.begin(), a.end(), 0);
        double expected = 0.0;
        std::map<std::string, double> sizes;
        for (const auto& l : ref) sizes[l] += 1.0;
        for (const auto& [label, cu] : sizes) expected += cu * 2.0 / (1.0 + cu);
        expected /= static_cast<double>(n);
        REQUIRE(f_measure(a, n, ref) == Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("internal quality examples", "[eval][quality]") {
    std::vector<UncertainObject> same;
    for (int i = 0; i < 6; ++i) same.push_back(fixtures::point1(std::to_string(i), 3.0));
    const auto z = internal_quality({0, 0, 1, 1, 2, 2}, 3, Dataset(same));
    REQUIRE(z.intra == 0.0);
    REQUIRE(z.inter == 0.0);
    REQUIRE(z.q == 0.0);

    const Dataset two(std::vector<UncertainObject>{fixtures::point1("a", 0), fixtures::point1("b", 0.1),
                                                   fixtures::point1("c", 10), fixtures::point1("d", 10.1)});
    const auto iq = internal_quality({0, 0, 1, 1}, 2, two);
    // Normalizer 10.1^2; intra (0.01 + 0.01)/2; inter (100 + 102.01 + 98.01 + 100)/4.
    REQUIRE(iq.normalizer == Approx(102.01).epsilon(1e-12));
    REQUIRE(iq.intra == Approx(0.01 / 102.01).epsilon(1e-9));
    REQUIRE(iq.inter == Approx(100.005 / 102.01).epsilon(1e-9));
    REQUIRE(iq.q == Approx(iq.inter - iq.intra).margin(1e-12));
    REQUIRE(iq.q > 0.97);

    Rng rng = make_rng(3);
    const Dataset d(random_objects(rng, 7, 2));
    const auto single = internal_quality({0, 1, 2, 3, 4, 5, 6}, 7, d);
    REQUIRE(single.intra == 0.0);
    REQUIRE(single.q == single.inter);

    const auto one = internal_quality({0, 0, 0, 0, 0, 0, 0}, 1, d);
    REQUIRE_FALSE(one.inter_defined);
    REQUIRE(one.inter == 0.0);
    REQUIRE_THROWS_AS(internal_quality({0, 1}, 2, d), argument_error);
}

TEST_CASE("internal quality ranges and permutation invariance", "[eval][quality][property]") {
    Rng rng = make_rng(4);
    for (int t = 0; t < 30; ++t) {
        const std::size_t n = 3 + uniform_index(rng, 30);
        const std::size_t k = 2 + uniform_index(rng, std::min<std::size_t>(n - 1, 5));
        auto objs = random_objects(rng, n, 1 + uniform_index(rng, 4));
        std::vector<std::size_t> a(n);
        for (std::size_t i = 0; i < n; ++i) a[i] = i < k ? i : uniform_index(rng, k);
        const auto iq = internal_quality(a, k, Dataset(objs));
        REQUIRE(iq.intra >= 0.0);
        REQUIRE(iq.intra <= 1.0);
        REQUIRE(iq.inter >= 0.0);
        REQUIRE(iq.inter <= 1.0);
        REQUIRE(iq.q >= -1.0);
        REQUIRE(iq.q <= 1.0);
        REQUIRE(std::abs(iq.q - (iq.inter - iq.intra)) <= 1e-12);

        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[uniform_index(rng, i + 1)]);
        std::vector<UncertainObject> shuffled;
        std::vector<std::size_t> a2;
        for (auto i : order) {
            shuffled.push_back(objs[i]);
            a2.push_back(a[i]);
        }
        const auto iq2 = internal_quality(a2, k, Dataset(shuffled));
        REQUIRE(iq2.intra == Approx(iq.intra).epsilon(1e-12));
        REQUIRE(iq2.inter == Approx(iq.inter).epsilon(1e-12));
    }
}

TEST_CASE("theta", "[eval]") {
    REQUIRE(theta(0.8, 0.6) == Approx(0.2).epsilon(1e-15));
    REQUIRE(theta(0.7, 0.7) == 0.0);
    REQUIRE(theta(0.0, 1.0) == -1.0);
}
