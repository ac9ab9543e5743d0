#include <vector>

#include "rach/analytic.h"
#include "rach/energy.h"

namespace rach {

std::vector<SlotAnalytics> evolve(SchemeKind scheme, ReceiverModel rx, const SystemParams& p,
                                  int slots)
{
    if (slots < 1) {
        throw ParamError("evolve: slots must be >= 1");
    }
    validate(p);

    std::vector<SlotAnalytics> out;
    out.reserve(static_cast<std::size_t>(slots));
    std::vector<EnergyHistoryEntry> history;

    TrafficState traffic = TrafficState::initial(p.mu_new);
    for (int m = 1; m <= slots; ++m) {
        if (m > 1) {
            traffic = queue_step(out.back().traffic, out.back().p_overall, p.mu_new);
        }
        SlotAnalytics s;
        s.scheme = scheme;
        s.receiver = rx;
        s.traffic = traffic;
        s.p_pre = preamble_detection_overall(traffic, p);
        s.p_pus = pusch_decoding_overall(traffic, p, rx);
        if (is_two_step(scheme)) {
            const auto fb = fallback_probs(traffic, p, rx);
            s.p_fb = fb.p_fb;
            s.p_fb_pus = fb.p_fb_pus;
        }
        s.p_overall = overall_success(scheme, traffic, p, rx);
        s.throughput_bps = throughput_bps(traffic, s.p_overall, p);
        s.energy_uj = scheme_energy(scheme, traffic, p, rx);

        history.push_back({s.energy_uj, traffic.t_nonempty, s.p_overall});
        try {
            s.energy_per_packet_uj = energy_per_packet(history);
        } catch (const UndefinedMetric&) {
            s.energy_per_packet_uj.reset();
        }
        out.push_back(s);
    }
    return out;
}

} // namespace rach
