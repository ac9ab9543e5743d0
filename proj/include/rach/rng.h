#ifndef RACH_RNG_H
#define RACH_RNG_H

#include <cstdint>
#include <limits>

namespace rach {

/// What a stream is used for. Distinct purposes never share draws, so adding
/// draws to one stage cannot perturb another.
enum class StreamPurpose : std::uint64_t {
    Deployment = 1,
    Arrivals = 2,
    PreambleChoice = 3,
    Pdp = 4,
    Fading = 5,
    Harq = 6,
};

/// Counter-based generator: output i is a SplitMix64 finalizer applied to
/// key + i * golden-gamma. Streams are addressed by (root seed, replication,
/// purpose), so any replication can be generated independently of the others.
class RngStream
{
public:
    using result_type = std::uint64_t;

    explicit RngStream(std::uint64_t key)
        : key_(mix(key))
    {
    }

    RngStream(std::uint64_t root_seed, std::uint64_t replication, StreamPurpose purpose)
        : key_(mix(mix(mix(root_seed) ^ (replication + 0x632be59bd9b4e019ULL)) ^
                   static_cast<std::uint64_t>(purpose) * 0x9e3779b97f4a7c15ULL))
    {
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return mix(key_ + (++counter_) * kGamma); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform integer on [0, n), n > 0 (Lemire's multiply-shift with rejection).
    std::uint64_t below(std::uint64_t n);

    double exponential(double mean);
    double normal();
    std::uint64_t poisson(double mean);

    std::uint64_t draws() const { return counter_; }

private:
    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

    static constexpr std::uint64_t mix(std::uint64_t z)
    {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace rach

#endif
