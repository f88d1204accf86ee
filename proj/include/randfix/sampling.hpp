#ifndef RANDFIX_SAMPLING_HPP
#define RANDFIX_SAMPLING_HPP

// Deterministic sample generation. Every randomized check derives its own
// stream from the single scenario seed and a stage label, so re-running a
// stage in isolation reproduces exactly the samples its report mentions.

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "randfix/fibre.hpp"

namespace randfix {

// FNV-1a over the stage label, folded into the scenario seed.
std::uint64_t derive_subseed(std::uint64_t scenario_seed, std::string_view stage);

// Thin generator wrapper. The uniform and normal draws are implemented by
// hand (53-bit mantissa scaling, Box-Muller) so that streams do not depend
// on the standard library's distribution internals.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform01();                       // [0, 1)
    double uniform(double lo, double hi);     // [lo, hi)
    double normal01();
    std::uint64_t uniform_index(std::uint64_t n);  // {0, ..., n-1}

  private:
    std::mt19937_64 engine_;
};

// One point of the region: balls get a uniform draw via a normalized
// Gaussian direction and radius R * U^(1/d), boxes a uniform coordinate per
// axis, finite regions a uniform choice among their points.
Eigen::VectorXd sample_region(const Region& region, int dim, Rng& rng);

FibrePoint sample_point(const FibreSet& set, Rng& rng);
std::vector<FibrePoint> sample_points(const FibreSet& set, int count, Rng& rng);

// A uniformly chosen subset of atoms (possibly empty, possibly everything).
AtomEvent sample_event(int atom_count, Rng& rng);

// A random partition of the atom set into nonempty events.
std::vector<AtomEvent> sample_partition(int atom_count, Rng& rng);

// Every section of a fibre set whose regions are all finite, in a fixed
// odometer order. Throws PreconditionError when a region is not finite or
// the product exceeds `cap`.
std::vector<FibrePoint> enumerate_sections(const FibreSet& set, std::size_t cap = 65536);

}  // namespace randfix

#endif
