#include "rach/zadoff_chu.h"

#include <cmath>
#include <numbers>
#include <numeric>

namespace rach {

ZadoffChu::ZadoffChu(int length, int root)
    : root_(root)
{
    if (length < 2) {
        throw ParamError("ZadoffChu: length must be >= 2");
    }
    if (root <= 0 || root >= length || std::gcd(root, length) != 1) {
        throw ParamError("ZadoffChu: root must lie in [1, N) and be coprime with N");
    }
    seq_.resize(static_cast<std::size_t>(length));
    const auto n = static_cast<long long>(length);
    for (long long k = 0; k < n; ++k) {
        // Reduce r*k*(k+1) mod 2N before scaling to keep the phase exact.
        const long long e = (static_cast<long long>(root) * k % (2 * n)) * (k + 1) % (2 * n);
        const double phase = -std::numbers::pi * static_cast<double>(e) / static_cast<double>(n);
        seq_[static_cast<std::size_t>(k)] = std::polar(1.0, phase);
    }
}

std::vector<cplx> ZadoffChu::preamble(int index, int n_cs) const
{
    const int n = length();
    std::vector<cplx> out(seq_.size());
    const int shift = static_cast<int>((static_cast<long long>(index) * n_cs) % n);
    for (int k = 0; k < n; ++k) {
        out[static_cast<std::size_t>(k)] = seq_[static_cast<std::size_t>((k + shift) % n)];
    }
    return out;
}

cplx correlate_at(std::span<const cplx> y, std::span<const cplx> ref, int lag)
{
    const std::size_t n = ref.size();
    const std::size_t l = static_cast<std::size_t>(((lag % static_cast<int>(n)) + static_cast<int>(n)) % static_cast<int>(n));
    cplx acc{0.0, 0.0};
    for (std::size_t k = 0; k < n; ++k) {
        acc += y[k] * std::conj(ref[(k + l) % n]);
    }
    return acc;
}

std::vector<cplx> cyclic_correlation(std::span<const cplx> y, std::span<const cplx> ref)
{
    std::vector<cplx> out(ref.size());
    for (std::size_t t = 0; t < ref.size(); ++t) {
        out[t] = correlate_at(y, ref, static_cast<int>(t));
    }
    return out;
}

WaveformPdp::WaveformPdp(const LinkBudget& link, int root, int n_cs)
    : link_(link),
      zc_(link.n_zc, root % link.n_zc == 0 ? 1 : root % link.n_zc),
      n_cs_(n_cs),
      rx_(static_cast<std::size_t>(link.n_zc))
{
    const int count = preamble_count();
    preambles_.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        preambles_.push_back(zc_.preamble(i, n_cs_));
    }
}

int WaveformPdp::preamble_count() const
{
    return std::max(1, link_.n_zc / n_cs_);
}

double WaveformPdp::peak(int preamble_index, cplx channel, int delay, RngStream* noise_rng)
{
    const auto& ref = preambles_[static_cast<std::size_t>(preamble_index % preamble_count())];
    const std::size_t n = ref.size();
    const cplx gain = std::sqrt(link_.rho_mw) * channel;
    const double noise_sd = std::sqrt(link_.noise_mw / 2.0);
    for (std::size_t k = 0; k < n; ++k) {
        rx_[k] = gain * ref[(k + static_cast<std::size_t>(delay)) % n];
        if (noise_rng != nullptr && link_.noise_mw > 0.0) {
            const double re = noise_rng->normal();
            const double im = noise_rng->normal();
            rx_[k] += cplx(noise_sd * re, noise_sd * im);
        }
    }
    return std::norm(correlate_at(rx_, ref, delay));
}

double WaveformPdp::draw(int preamble_index, RngStream& rng)
{
    const double re = rng.normal();
    const double im = rng.normal();
    const cplx h(re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0);
    const int delay = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_cs_)));
    return peak(preamble_index, h, delay, &rng);
}

} // namespace rach
