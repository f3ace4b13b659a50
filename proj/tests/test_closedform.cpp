// Expected distances and the baseline objectives.

#include "catch_amalgamated.hpp"

#include <vector>

#include "support.hpp"
#include "ucpc/closedform.hpp"
#include "ucpc/oracle.hpp"
#include "ucpc/random_objects.hpp"

using namespace ucpc;
using Catch::Approx;

TEST_CASE("expected distance to a point", "[closedform]") {
    const auto u = fixtures::uniform1("u", 0, 2);
    REQUIRE(expected_sq_dist_to_point(u, std::vector<double>{1.0}) == Approx(1.0 / 3.0).epsilon(1e-15));
    REQUIRE(expected_sq_dist_to_point(u, std::vector<double>{2.0}) == Approx(4.0 / 3.0).epsilon(1e-15));
    REQUIRE(expected_sq_dist_to_point(fixtures::point1("p", 5), std::vector<double>{7.0}) == 4.0);

    const auto e = oracle::mc_expected_dist(u, std::vector<double>{2.0}, 1000000, 3);
    REQUIRE(std::abs(e.mean - 4.0 / 3.0) <= 3.0 * e.std_error);
    REQUIRE_THROWS_AS(expected_sq_dist_to_point(u, std::vector<double>{1.0, 2.0}), argument_error);
}

TEST_CASE("expected distance between objects", "[closedform]") {
    const auto p = UncertainObject::point("p", {1.0, -2.0});
    REQUIRE(expected_sq_dist_between(p, p) == 0.0);
    const auto pair = fixtures::pair_u02_u13();
    REQUIRE(expected_sq_dist_between(pair[0], pair[1]) == Approx(5.0 / 3.0).epsilon(1e-14));
    // Two independent draws of the same object.
    REQUIRE(expected_sq_dist_between(pair[0], pair[0]) == Approx(2.0 / 3.0).epsilon(1e-14));

    const auto e = oracle::mc_expected_dist(pair[0], pair[1], 1000000, 4);
    REQUIRE(std::abs(e.mean - 5.0 / 3.0) <= 3.0 * e.std_error);
    REQUIRE_THROWS_AS(expected_sq_dist_between(pair[0], p), argument_error);
}

TEST_CASE("UK-means centroid", "[closedform]") {
    REQUIRE(uk_centroid(fixtures::pair_u02_u13()) == Vector{1.5});
    const auto o = UncertainObject::point("o", {3.0, 4.0});
    REQUIRE(uk_centroid(std::vector<UncertainObject>{o}) == Vector{3.0, 4.0});
    const std::vector<UncertainObject> sym{fixtures::uniform1("a", 1, 3), fixtures::uniform1("b", -3, -1)};
    REQUIRE(uk_centroid(sym) == Vector{0.0});
    REQUIRE_THROWS_AS(uk_centroid(std::vector<UncertainObject>{}), empty_cluster_error);
}

TEST_CASE("J_UK", "[closedform]") {
    const auto pair = fixtures::pair_u02_u13();
    REQUIRE(j_uk(pair) == Approx(7.0 / 6.0).epsilon(1e-14));
    const double summed = expected_sq_dist_to_point(pair[0], std::vector<double>{1.5}) +
                          expected_sq_dist_to_point(pair[1], std::vector<double>{1.5});
    REQUIRE(j_uk(pair) == Approx(summed).epsilon(1e-14));
    REQUIRE(j_uk(std::vector<UncertainObject>{pair[0]}) == Approx(1.0 / 3.0).epsilon(1e-14));
    REQUIRE(j_uk(std::vector<UncertainObject>{fixtures::point1("a", 4), fixtures::point1("b", 4)}) == 0.0);
    REQUIRE_THROWS_AS(j_uk(std::vector<UncertainObject>{}), empty_cluster_error);
}

TEST_CASE("mixture centroid moments", "[closedform]") {
    const auto mc = mixture_moments(fixtures::pair_u02_u13());
    REQUIRE(mc.size == 2);
    REQUIRE(mc.mu[0] == 1.5);
    REQUIRE(mc.mu2[0] == Approx(17.0 / 6.0).epsilon(1e-14));
    const auto one = fixtures::uniform1("u", 0, 2);
    const auto single = mixture_moments(std::vector<UncertainObject>{one});
    REQUIRE(single.mu == one.moments().mu);
    REQUIRE(single.mu2 == one.moments().mu2);
    const auto pm = mixture_moments(std::vector<UncertainObject>{fixtures::point1("a", 0), fixtures::point1("b", 2)});
    REQUIRE(pm.mu[0] == 1.0);
    REQUIRE(pm.mu2[0] == 2.0);
    REQUIRE_THROWS_AS(mixture_moments(std::vector<UncertainObject>{}), empty_cluster_error);
}

TEST_CASE("J_MM", "[closedform]") {
    REQUIRE(j_mm(fixtures::pair_u02_u13()) == Approx(7.0 / 12.0).epsilon(1e-14));
    const auto one = fixtures::uniform1("u", 0, 2);
    REQUIRE(j_mm(std::vector<UncertainObject>{one}) == Approx(1.0 / 3.0).epsilon(1e-14));
    REQUIRE(j_mm(std::vector<UncertainObject>{fixtures::point1("a", 0), fixtures::point1("b", 2)}) == 1.0);
    REQUIRE_THROWS_AS(j_mm(std::vector<UncertainObject>{}), empty_cluster_error);
}

TEST_CASE("J hat", "[closedform]") {
    REQUIRE(j_hat(fixtures::pair_u02_u13()) == Approx(7.0 / 3.0).epsilon(1e-14));
    const auto one = fixtures::uniform1("u", 0, 2);
    REQUIRE(j_hat(std::vector<UncertainObject>{one}) == Approx(2.0 / 3.0).epsilon(1e-14));
    REQUIRE(j_hat(std::vector<UncertainObject>{fixtures::point1("a", 4), fixtures::point1("b", 4)}) == 0.0);
    REQUIRE_THROWS_AS(j_hat(std::vector<UncertainObject>{}), empty_cluster_error);
}

TEST_CASE("objective identities on random clusters", "[closedform][property]") {
    Rng rng = make_rng(21);
    for (int t = 0; t < 200; ++t) {
        const std::size_t m = 1 + uniform_index(rng, 8);
        const auto c = random_objects(rng, 1 + uniform_index(rng, 64), m);
        const double juk = j_uk(c);
        const double n = static_cast<double>(c.size());
        REQUIRE(juk >= 0.0);
        REQUIRE(std::abs(j_mm(c) - juk / n) <= 1e-9 * (1.0 + std::abs(juk)));
        REQUIRE(std::abs(j_hat(c) - 2.0 * juk) <= 1e-9 * (1.0 + std::abs(juk)));
        if (t < 100) {
            const Vector centre = uk_centroid(c);
            double summed = 0.0;
            for (const auto& o : c) summed += expected_sq_dist_to_point(o, centre);
            REQUIRE(fixtures::rel_close(juk, summed, 1e-9));
        }
    }
}

TEST_CASE("equal J_UK with different variance", "[closedform]") {
    const std::vector<UncertainObject> c{fixtures::two_point("a", 0, 2), fixtures::two_point("b", 0, 2)};
    const std::vector<UncertainObject> c2{fixtures::point1("c", 0), fixtures::point1("d", 2)};
    REQUIRE(c[0].moments().mu[0] == 1.0);
    REQUIRE(c[0].moments().mu2[0] == 2.0);
    REQUIRE(j_uk(c) == 2.0);
    REQUIRE(j_uk(c2) == 2.0);
    REQUIRE(c[0].moments().total_var + c[1].moments().total_var == 2.0);
    REQUIRE(c2[0].moments().total_var + c2[1].moments().total_var == 0.0);
}

TEST_CASE("clusters may be given as pointers or references", "[closedform]") {
    const auto pair = fixtures::pair_u02_u13();
    const std::vector<const UncertainObject*> ptrs{&pair[0], &pair[1]};
    const std::vector<std::reference_wrapper<const UncertainObject>> refs{pair[0], pair[1]};
    REQUIRE(j_uk(ptrs) == j_uk(pair));
    REQUIRE(j_uk(refs) == j_uk(pair));
}
