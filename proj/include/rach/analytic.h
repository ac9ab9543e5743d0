#ifndef RACH_ANALYTIC_H
#define RACH_ANALYTIC_H

#include <optional>
#include <vector>

#include "rach/numeric.h"
#include "rach/params.h"
#include "rach/scheme.h"

namespace rach {

/// Per-slot queue state of a typical device under the Poisson approximation.
struct TrafficState
{
    int slot = 1;
    double mu_new = 0.0;      ///< new-packet intensity this slot
    double mu_cum = 0.0;      ///< accumulated-packet intensity this slot
    double t_nonempty = 0.0;  ///< 1 - exp(-mu_new - mu_cum)

    static TrafficState make(int slot, double mu_new, double mu_cum);
    static TrafficState initial(double mu_new) { return make(1, mu_new, 0.0); }
};

/// Everything both engines report for one slot of one scheme.
struct SlotAnalytics
{
    SchemeKind scheme = SchemeKind::FourStep;
    ReceiverModel receiver = ReceiverModel::Advanced;
    TrafficState traffic;
    double p_pre = 0.0;
    double p_pus = 0.0;
    double p_fb = 0.0;
    double p_fb_pus = 0.0;
    double p_overall = 0.0;
    double throughput_bps = 0.0;
    double energy_uj = 0.0;
    /// Cumulative energy per delivered packet over slots 1..m; empty while
    /// no delivery is expected yet.
    std::optional<double> energy_per_packet_uj;
};

/// P[N = n] for N ~ Poisson(lambda_dp * t_nonempty), evaluated in log space.
double interferer_pmf(int n, double lambda_dp, double t_nonempty);

/// Largest n the interferer sums may visit for a Poisson mean.
int truncation_cap(double mean);

/// Sum over n of P[N = n] * term(n), truncated once the remaining Poisson
/// tail is below 1e-12 (or at truncation_cap).
template <class Term>
double expect_over_interferers(double mean, Term&& term)
{
    const int cap = truncation_cap(mean);
    CompensatedSum acc;
    CompensatedSum mass;
    for (int n = 0; n <= cap; ++n) {
        const double w = interferer_pmf(n, mean, 1.0);
        if (w > 0.0) {
            acc.add(w * term(n));
        }
        mass.add(w);
        if (1.0 - mass.value() < 1e-12) {
            break;
        }
    }
    return acc.value();
}

/// Probability that at least one of n+1 colliding PDP peaks clears the threshold.
double preamble_detection_cond(int n, const LinkBudget& link);
double preamble_detection_cond(int n, const SystemParams& p);

/// Capture probability of the typical device among n+1 PUSCH transmissions,
/// given its preamble was detected. Advanced receivers use the closed form
/// [1 - (1 - e^{-g s/r})^{n+1}] / [(n+1)(1+g)^n]; the basic receiver decodes
/// singletons only.
double pusch_decoding_cond(int n, const LinkBudget& link, ReceiverModel rx);
double pusch_decoding_cond(int n, const SystemParams& p, ReceiverModel rx);

double preamble_detection_overall(const TrafficState& t, const SystemParams& p);
double pusch_decoding_overall(const TrafficState& t, const SystemParams& p, ReceiverModel rx);

/// 1 - B^K.
double data_success(const SystemParams& p);

struct FallbackProbs
{
    double p_fb = 0.0;      ///< detected, but no MsgA PUSCH decoded in the group
    double p_fb_pus = 0.0;  ///< ... and the typical device wins the fallback Msg3
};

FallbackProbs fallback_probs(const TrafficState& t, const SystemParams& p, ReceiverModel rx);

double overall_success(SchemeKind scheme, const TrafficState& t, const SystemParams& p,
                       ReceiverModel rx);

/// Advances the accumulated-packet intensity by one RACH period. The
/// intensity is clamped at zero when departures exceed the remaining load.
TrafficState queue_step(const TrafficState& prev, double p_overall_prev, double mu_new_next);

/// T * P * S / T_RACH.
double throughput_bps(const TrafficState& t, double p_overall, const SystemParams& p);

/// Slots 1..slots of the queue recursion with every SlotAnalytics field set.
std::vector<SlotAnalytics> evolve(SchemeKind scheme, ReceiverModel rx, const SystemParams& p,
                                  int slots);

} // namespace rach

#endif
