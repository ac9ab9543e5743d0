#include "rach/energy.h"

#include <cmath>

namespace rach {

namespace {

constexpr double kUj = 1e-3;  // mW * us -> uJ

// One slot spent monitoring PDCCH for T_d and sleeping for the remainder.
double monitor_slot(const SystemParams& p)
{
    return p.p_r_mw * p.t_d_us + p.p_s_mw * (p.t_s_us - p.t_d_us);
}

} // namespace

double data_energy_k(const SystemParams& p, int k)
{
    const double mon = monitor_slot(p);
    const double round = mon + p.p_s_mw * p.t_k2_us + p.p_t_mw * p.t_s_us +
                         p.n_dci * mon + p.p_r_mw * p.t_s_us;
    return (k * round + p.p_s_mw * p.t_pucch_us + p.p_t_mw * p.t_s_us) * kUj;
}

double data_harq_energy(const SystemParams& p)
{
    const int K = p.harq_max;
    const double B = p.bler;
    CompensatedSum acc;
    for (int k = 1; k < K; ++k) {
        acc.add((1.0 - B) * std::pow(B, k - 1) * data_energy_k(p, k));
    }
    acc.add(std::pow(B, K - 1) * data_energy_k(p, K));
    return acc.value();
}

MessageEnergies message_energies(const SystemParams& p)
{
    const double mon = monitor_slot(p);
    const double half_rar = (p.n_rar / 2.0 - 1.0) * mon;
    const double half_crt = (p.n_crt / 2.0 - 1.0) * mon;

    MessageEnergies e{};
    e.e_p = (p.p_t_mw * p.t_p_us + p.p_s_mw * (p.t_s_us - p.t_p_us)) * kUj;
    e.e_msg2s = (half_rar + p.p_r_mw * p.t_s_us + p.p_s_mw * (p.t_k2_us + p.t_delta_us)) * kUj;
    e.e_msg3 = p.p_t_mw * p.t_s_us * kUj;
    e.e_msg4s = (half_crt + p.p_r_mw * p.t_s_us + p.p_s_mw * p.t_pucch_us + p.p_t_mw * p.t_s_us) * kUj;
    e.e_msg2f = p.n_rar * mon * kUj;
    e.e_msg4f = p.n_crt * mon * kUj;
    e.e_data = p.p_t_mw * p.t_s_us * kUj;
    e.e_data_harq = data_harq_energy(p);
    e.e_msga = (p.p_t_mw * p.t_p_us + p.p_s_mw * (p.t_s_us - p.t_p_us) + p.p_t_mw * p.t_s_us) * kUj;
    e.e_msgbs = (half_rar + p.p_r_mw * p.t_s_us + p.p_s_mw * p.t_pucch_us + p.p_t_mw * p.t_s_us) * kUj;
    e.e_msgbf = p.n_rar * mon * kUj;
    e.e_msgbfb = (half_rar + p.p_r_mw * p.t_s_us + p.p_s_mw * (p.t_k2_us + p.t_delta_us)) * kUj;
    return e;
}

double EnergyMixture::total_weight() const
{
    CompensatedSum s;
    for (const auto& b : active()) {
        s.add(b.weight);
    }
    return s.value();
}

double EnergyMixture::expected_uj() const
{
    CompensatedSum s;
    for (const auto& b : active()) {
        s.add(b.weight * b.energy_uj);
    }
    return t_nonempty * s.value();
}

EnergyMixture energy_mixture(SchemeKind scheme, const TrafficState& t, const SystemParams& p,
                             ReceiverModel rx)
{
    const auto link = LinkBudget::from(p);
    const auto e = message_energies(p);
    const double mean = p.lambda_dp * t.t_nonempty;
    const double sdt_data = carries_data(scheme) ? e.e_data : 0.0;

    auto sum = [&](auto&& term) {
        return expect_over_interferers(mean, [&](int n) {
            return term(n, preamble_detection_cond(n, link), pusch_decoding_cond(n, link, rx));
        });
    };

    EnergyMixture m;
    m.t_nonempty = t.t_nonempty;

    if (!is_two_step(scheme)) {
        const double detected = sum([](int, double pre, double) { return pre; });
        const double lost = sum([](int, double pre, double pus) { return pre * (1.0 - pus); });
        const double won = sum([](int, double pre, double pus) { return pre * pus; });
        const double harq = carries_data(scheme) ? 0.0 : e.e_data_harq;
        m.count = 3;
        m.branches[0] = {"undetected", 1.0 - detected, e.e_p + e.e_msg2f};
        m.branches[1] = {"pusch_failed", lost, e.e_p + e.e_msg2s + e.e_msg3 + sdt_data + e.e_msg4f};
        m.branches[2] = {"success", won,
                         e.e_p + e.e_msg2s + e.e_msg3 + sdt_data + e.e_msg4s + harq};
        return m;
    }

    const double msga = e.e_msga + sdt_data;
    const double first_harq = carries_data(scheme) ? 0.0 : e.e_data_harq;
    const double won = sum([](int, double pre, double pus) { return pre * pus; });
    // Weight printed with n, not n+1: it also absorbs MsgA capture losers.
    const double not_failed =
        sum([](int n, double pre, double pus) { return pre * (1.0 - n * pus); });
    const double fb_won = sum([](int n, double pre, double pus) {
        return pre * (1.0 - (n + 1) * pus) * pus;
    });
    const double fb_lost = sum([](int n, double pre, double pus) {
        return pre * (1.0 - (n + 1) * pus) * (1.0 - pus);
    });
    const double fb_path = msga + e.e_msgbfb + e.e_msg3;
    m.count = 4;
    m.branches[0] = {"msga_success", won, msga + e.e_msgbs + first_harq};
    m.branches[1] = {"msgb_missed", 1.0 - not_failed, msga + e.e_msgbf};
    m.branches[2] = {"fallback_success", fb_won, fb_path + e.e_msg4s + e.e_data_harq};
    m.branches[3] = {"fallback_failed", fb_lost, fb_path + e.e_msg4f};
    return m;
}

double scheme_energy(SchemeKind scheme, const TrafficState& t, const SystemParams& p,
                     ReceiverModel rx)
{
    return energy_mixture(scheme, t, p, rx).expected_uj();
}

double energy_per_packet(std::span<const EnergyHistoryEntry> history)
{
    if (history.empty()) {
        throw UndefinedMetric("energy_per_packet: empty history");
    }
    CompensatedSum energy;
    CompensatedSum delivered;
    for (const auto& h : history) {
        energy.add(h.energy_uj);
        delivered.add(h.t_nonempty * h.p_overall);
    }
    if (!(delivered.value() > 0.0)) {
        throw UndefinedMetric("energy_per_packet: no expected deliveries");
    }
    return energy.value() / delivered.value();
}

} // namespace rach
