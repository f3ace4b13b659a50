#pragma once

// Random uncertain objects of mixed pdf families, for property checks.

#include <cstddef>
#include <string>
#include <vector>

#include "ucpc/model.hpp"
#include "ucpc/rng.hpp"

namespace ucpc {

enum class RandomKind { uniform, normal, exponential, empirical, point, any };

/// A random object centred in [-spread, spread]^m. `any` picks the family at random.
inline UncertainObject random_object(Rng& rng, std::size_t m, std::string id, RandomKind kind = RandomKind::any,
                                     double spread = 10.0) {
    if (kind == RandomKind::any) kind = static_cast<RandomKind>(uniform_index(rng, 5));
    Vector centre(m);
    for (double& c : centre) c = uniform(rng, -spread, spread);

    switch (kind) {
    case RandomKind::uniform: {
        Vector lo(m), hi(m);
        for (std::size_t j = 0; j < m; ++j) {
            const double h = uniform(rng, 0.1, 2.0);
            lo[j] = centre[j] - h;
            hi[j] = centre[j] + h;
        }
        return UncertainObject(std::move(id), UniformBox{Box(std::move(lo), std::move(hi))});
    }
    case RandomKind::normal: {
        Vector sd(m), lo(m), hi(m);
        for (std::size_t j = 0; j < m; ++j) {
            sd[j] = uniform(rng, 0.2, 2.0);
            lo[j] = centre[j] - uniform(rng, 0.5, 3.0) * sd[j];
            hi[j] = centre[j] + uniform(rng, 0.5, 3.0) * sd[j];
        }
        return UncertainObject(std::move(id), TruncatedNormal{centre, std::move(sd), Box(std::move(lo), std::move(hi))});
    }
    case RandomKind::exponential: {
        Vector rate(m), lo(m), hi(m);
        for (std::size_t j = 0; j < m; ++j) {
            rate[j] = uniform(rng, 0.3, 3.0);
            lo[j] = centre[j] + uniform(rng, 0.0, 1.0);
            hi[j] = lo[j] + uniform(rng, 0.2, 4.0);
        }
        return UncertainObject(std::move(id),
                               TruncatedExponential{centre, std::move(rate), Box(std::move(lo), std::move(hi))});
    }
    case RandomKind::empirical: {
        const std::size_t count = 2 + uniform_index(rng, 5);
        Empirical e;
        double total = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
            Vector x(m);
            for (std::size_t j = 0; j < m; ++j) x[j] = centre[j] + uniform(rng, -1.5, 1.5);
            e.points.push_back(std::move(x));
            e.weights.push_back(uniform(rng, 0.1, 1.0));
            total += e.weights.back();
        }
        for (double& w : e.weights) w /= total;
        return UncertainObject(std::move(id), std::move(e));
    }
    case RandomKind::point:
    case RandomKind::any:
        break;
    }
    return UncertainObject::point(std::move(id), std::move(centre));
}

inline std::vector<UncertainObject> random_objects(Rng& rng, std::size_t n, std::size_t m,
                                                   RandomKind kind = RandomKind::any, double spread = 10.0) {
    std::vector<UncertainObject> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(random_object(rng, m, std::to_string(i), kind, spread));
    return out;
}

} // namespace ucpc
