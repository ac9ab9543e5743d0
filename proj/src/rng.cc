#include "rach/rng.h"

#include <cmath>
#include <numbers>
#include <random>

namespace rach {

__extension__ using u128 = unsigned __int128;

std::uint64_t RngStream::below(std::uint64_t n)
{
    u128 m = static_cast<u128>((*this)()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
        const std::uint64_t threshold = (0 - n) % n;
        while (low < threshold) {
            m = static_cast<u128>((*this)()) * n;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

double RngStream::exponential(double mean)
{
    // 1 - u lies in (0, 1], so the log is finite.
    return -mean * std::log(1.0 - uniform());
}

double RngStream::normal()
{
    // Box-Muller, one variate per call.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t RngStream::poisson(double mean)
{
    if (mean <= 0.0) {
        return 0;
    }
    if (mean < 500.0) {
        // Inversion by sequential search.
        const double u = uniform();
        double pmf = std::exp(-mean);
        double cdf = pmf;
        std::uint64_t k = 0;
        while (u >= cdf) {
            ++k;
            pmf *= mean / static_cast<double>(k);
            const double next = cdf + pmf;
            if (next == cdf) {
                break;
            }
            cdf = next;
        }
        return k;
    }
    std::poisson_distribution<std::uint64_t> dist(mean);
    return dist(*this);
}

} // namespace rach
