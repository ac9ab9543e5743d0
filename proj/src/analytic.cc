#include "rach/analytic.h"

#include <algorithm>
#include <cmath>

namespace rach {

TrafficState TrafficState::make(int slot, double mu_new, double mu_cum)
{
    return TrafficState{slot, mu_new, mu_cum, -std::expm1(-mu_new - mu_cum)};
}

double interferer_pmf(int n, double lambda_dp, double t_nonempty)
{
    if (n < 0) {
        throw ParamError("interferer_pmf: negative interferer count");
    }
    const double mean = lambda_dp * t_nonempty;
    if (mean <= 0.0) {
        return n == 0 ? 1.0 : 0.0;
    }
    const double nd = static_cast<double>(n);
    return std::exp(-mean + nd * std::log(mean) - std::lgamma(nd + 1.0));
}

int truncation_cap(double mean)
{
    const double m = std::max(mean, 0.0);
    return std::max(64, static_cast<int>(std::ceil(m + 12.0 * std::sqrt(m))));
}

double preamble_detection_cond(int n, const LinkBudget& link)
{
    // Per-device miss probability 1 - exp(-lambda_th / mean_peak).
    const double miss = -std::expm1(-link.detection_threshold_mw / link.pdp_peak_mean_mw());
    if (miss <= 0.0) {
        return 1.0;
    }
    return -std::expm1(static_cast<double>(n + 1) * std::log(miss));
}

double preamble_detection_cond(int n, const SystemParams& p)
{
    return preamble_detection_cond(n, LinkBudget::from(p));
}

double pusch_decoding_cond(int n, const LinkBudget& link, ReceiverModel rx)
{
    const double noise_term = link.sinr_threshold * link.noise_mw / link.rho_mw;
    if (rx == ReceiverModel::Basic) {
        return n == 0 ? std::exp(-noise_term) : 0.0;
    }
    // 1 - (1 - e^{-x})^{n+1}, the closed form of the alternating binomial sum.
    const double outage = -std::expm1(-noise_term);
    const double numerator =
        outage <= 0.0 ? 1.0 : -std::expm1(static_cast<double>(n + 1) * std::log(outage));
    const double laplace = std::exp(-static_cast<double>(n) * std::log1p(link.sinr_threshold));
    return numerator * laplace / static_cast<double>(n + 1);
}

double pusch_decoding_cond(int n, const SystemParams& p, ReceiverModel rx)
{
    return pusch_decoding_cond(n, LinkBudget::from(p), rx);
}

double preamble_detection_overall(const TrafficState& t, const SystemParams& p)
{
    const auto link = LinkBudget::from(p);
    return expect_over_interferers(p.lambda_dp * t.t_nonempty,
                                   [&](int n) { return preamble_detection_cond(n, link); });
}

double pusch_decoding_overall(const TrafficState& t, const SystemParams& p, ReceiverModel rx)
{
    const auto link = LinkBudget::from(p);
    return expect_over_interferers(p.lambda_dp * t.t_nonempty, [&](int n) {
        return preamble_detection_cond(n, link) * pusch_decoding_cond(n, link, rx);
    });
}

double data_success(const SystemParams& p)
{
    return 1.0 - std::pow(p.bler, p.harq_max);
}

FallbackProbs fallback_probs(const TrafficState& t, const SystemParams& p, ReceiverModel rx)
{
    const auto link = LinkBudget::from(p);
    const double mean = p.lambda_dp * t.t_nonempty;
    FallbackProbs out;
    out.p_fb = expect_over_interferers(mean, [&](int n) {
        const double q = pusch_decoding_cond(n, link, rx);
        return preamble_detection_cond(n, link) * (1.0 - (n + 1) * q);
    });
    out.p_fb_pus = expect_over_interferers(mean, [&](int n) {
        const double q = pusch_decoding_cond(n, link, rx);
        return preamble_detection_cond(n, link) * (1.0 - (n + 1) * q) * q;
    });
    return out;
}

double overall_success(SchemeKind scheme, const TrafficState& t, const SystemParams& p,
                       ReceiverModel rx)
{
    const auto link = LinkBudget::from(p);
    const double data = data_success(p);
    return expect_over_interferers(p.lambda_dp * t.t_nonempty, [&](int n) {
        const double pre = preamble_detection_cond(n, link);
        const double pus = pusch_decoding_cond(n, link, rx);
        const double fallback = pre * (1.0 - (n + 1) * pus) * pus * data;
        switch (scheme) {
        case SchemeKind::FourStep: return pre * pus * data;
        case SchemeKind::FourStepSDT: return pre * pus;
        case SchemeKind::TwoStep: return pre * pus * data + fallback;
        case SchemeKind::TwoStepSDT: return pre * pus + fallback;
        }
        return 0.0;
    });
}

TrafficState queue_step(const TrafficState& prev, double p_overall_prev, double mu_new_next)
{
    const double mu_cum =
        std::max(0.0, prev.mu_new + prev.mu_cum - p_overall_prev * prev.t_nonempty);
    return TrafficState::make(prev.slot + 1, mu_new_next, mu_cum);
}

double throughput_bps(const TrafficState& t, double p_overall, const SystemParams& p)
{
    return t.t_nonempty * p_overall * p.packet_size_bits / (p.t_rach_us * 1e-6);
}

} // namespace rach
