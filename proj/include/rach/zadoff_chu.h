#ifndef RACH_ZADOFF_CHU_H
#define RACH_ZADOFF_CHU_H

#include <complex>
#include <span>
#include <vector>

#include "rach/params.h"
#include "rach/rng.h"

namespace rach {

using cplx = std::complex<double>;

/// Root-r Zadoff-Chu sequence z_r[k] = exp(-j*pi*r*k*(k+1)/N).
class ZadoffChu
{
public:
    ZadoffChu(int length, int root);

    int length() const { return static_cast<int>(seq_.size()); }
    int root() const { return root_; }
    std::span<const cplx> sequence() const { return seq_; }

    /// Preamble i: the root sequence cyclically shifted by i * n_cs samples.
    std::vector<cplx> preamble(int index, int n_cs) const;

private:
    int root_;
    std::vector<cplx> seq_;
};

/// sum_k y[k] * conj(ref[(k + lag) mod N])
cplx correlate_at(std::span<const cplx> y, std::span<const cplx> ref, int lag);

/// Every lag of the cyclic correlation.
std::vector<cplx> cyclic_correlation(std::span<const cplx> y, std::span<const cplx> ref);

/// Draws PDP peaks by synthesizing the received preamble and correlating it
/// against the local reference at the device's true delay.
class WaveformPdp
{
public:
    static constexpr int kDefaultRoot = 129;
    static constexpr int kDefaultCyclicShift = 13;

    WaveformPdp(const LinkBudget& link, int root = kDefaultRoot, int n_cs = kDefaultCyclicShift);

    int preamble_count() const;

    /// |sum_k (sqrt(rho) h z_i[k+d] + n[k]) z_i[k+d]^*|^2 with h ~ CN(0,1),
    /// n[k] ~ CN(0, sigma^2) and d drawn within the cyclic-shift zone.
    double draw(int preamble_index, RngStream& rng);

    /// Deterministic hook: fixed channel coefficient and delay, optional noise.
    double peak(int preamble_index, cplx channel, int delay, RngStream* noise_rng);

private:
    LinkBudget link_;
    ZadoffChu zc_;
    int n_cs_;
    std::vector<std::vector<cplx>> preambles_;
    std::vector<cplx> rx_;
};

} // namespace rach

#endif
