#include "randfix/sampling.hpp"

#include <cmath>
#include <numbers>

namespace randfix {

std::uint64_t derive_subseed(std::uint64_t scenario_seed, std::string_view stage) {
    std::uint64_t h = 14695981039346656037ull ^ scenario_seed;
    for (char c : stage) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    // Avoid the degenerate all-zero state and keep streams distinct from the
    // raw scenario seed itself.
    return h ^ (scenario_seed << 1);
}

double Rng::uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
}

double Rng::normal01() {
    // Box-Muller; u1 is nudged away from zero so the log stays finite.
    double u1 = uniform01();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::uniform_index(std::uint64_t n) {
    return n == 0 ? 0 : engine_() % n;
}

Eigen::VectorXd sample_region(const Region& region, int dim, Rng& rng) {
    return std::visit(
        [&](const auto& r) -> Eigen::VectorXd {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, BallRegion>) {
                Eigen::VectorXd dir(dim);
                double len = 0.0;
                do {
                    for (int k = 0; k < dim; ++k) dir[k] = rng.normal01();
                    len = dir.norm();
                } while (len < 1e-300);
                const double radius =
                    r.radius * std::pow(rng.uniform01(), 1.0 / static_cast<double>(dim));
                return r.center + dir * (radius / len);
            } else if constexpr (std::is_same_v<T, BoxRegion>) {
                Eigen::VectorXd out(dim);
                for (int k = 0; k < dim; ++k) out[k] = rng.uniform(r.lo[k], r.hi[k]);
                return out;
            } else {
                return r.points[rng.uniform_index(r.points.size())];
            }
        },
        region);
}

FibrePoint sample_point(const FibreSet& set, Rng& rng) {
    FibrePoint out(set.atoms(), set.dim());
    for (int atom = 0; atom < set.atoms(); ++atom)
        out.block(atom) = sample_region(set.region(atom), set.dim(), rng);
    return out;
}

std::vector<FibrePoint> sample_points(const FibreSet& set, int count, Rng& rng) {
    std::vector<FibrePoint> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) out.push_back(sample_point(set, rng));
    return out;
}

AtomEvent sample_event(int atom_count, Rng& rng) {
    std::vector<int> members;
    for (int atom = 0; atom < atom_count; ++atom)
        if (rng.uniform01() < 0.5) members.push_back(atom);
    return AtomEvent(std::move(members));
}

std::vector<AtomEvent> sample_partition(int atom_count, Rng& rng) {
    const int groups = 1 + static_cast<int>(rng.uniform_index(atom_count));
    std::vector<std::vector<int>> buckets(groups);
    for (int atom = 0; atom < atom_count; ++atom)
        buckets[rng.uniform_index(groups)].push_back(atom);
    std::vector<AtomEvent> events;
    for (auto& b : buckets)
        if (!b.empty()) events.emplace_back(std::move(b));
    return events;
}

std::vector<FibrePoint> enumerate_sections(const FibreSet& set, std::size_t cap) {
    std::size_t total = 1;
    std::vector<const FiniteRegion*> finite(set.atoms());
    for (int atom = 0; atom < set.atoms(); ++atom) {
        const auto* r = std::get_if<FiniteRegion>(&set.region(atom));
        if (!r)
            throw PreconditionError("section enumeration needs finite regions at every atom");
        finite[atom] = r;
        total *= r->points.size();
        if (total > cap)
            throw PreconditionError("section enumeration would exceed " + std::to_string(cap) +
                                    " points");
    }

    std::vector<FibrePoint> out;
    out.reserve(total);
    std::vector<std::size_t> idx(set.atoms(), 0);
    for (std::size_t s = 0; s < total; ++s) {
        FibrePoint p(set.atoms(), set.dim());
        for (int atom = 0; atom < set.atoms(); ++atom)
            p.block(atom) = finite[atom]->points[idx[atom]];
        out.push_back(std::move(p));
        for (int atom = set.atoms() - 1; atom >= 0; --atom) {
            if (++idx[atom] < finite[atom]->points.size()) break;
            idx[atom] = 0;
        }
    }
    return out;
}

}  // namespace randfix
