#include "rach/timeline.h"

#include "rach/numeric.h"

namespace rach {

Timeline& Timeline::then(RadioState state, double duration_us)
{
    intervals_.push_back({state, duration_us});
    return *this;
}

Timeline& Timeline::then(const Timeline& other, double times)
{
    // Fractional repetition covers half windows of odd length.
    for (const auto& iv : other.intervals_) {
        intervals_.push_back({iv.state, iv.duration_us * times});
    }
    return *this;
}

double Timeline::duration_us() const
{
    CompensatedSum s;
    for (const auto& iv : intervals_) {
        s.add(iv.duration_us);
    }
    return s.value();
}

double Timeline::energy_uj(const SystemParams& p) const
{
    CompensatedSum s;
    for (const auto& iv : intervals_) {
        double power = p.p_s_mw;
        if (iv.state == RadioState::Receive) {
            power = p.p_r_mw;
        } else if (iv.state == RadioState::Transmit) {
            power = p.p_t_mw;
        }
        s.add(power * iv.duration_us);
    }
    return s.value() * 1e-3;
}

namespace timeline {

Timeline preamble_slot(const SystemParams& p)
{
    return Timeline{}
        .then(RadioState::Transmit, p.t_p_us)
        .then(RadioState::Sleep, p.t_s_us - p.t_p_us);
}

Timeline pdcch_monitor_slot(const SystemParams& p)
{
    return Timeline{}
        .then(RadioState::Receive, p.t_d_us)
        .then(RadioState::Sleep, p.t_s_us - p.t_d_us);
}

Timeline response_received(const SystemParams& p, int window_slots)
{
    return Timeline{}
        .then(pdcch_monitor_slot(p), window_slots / 2.0 - 1.0)
        .then(RadioState::Receive, p.t_s_us);
}

Timeline rar_success(const SystemParams& p)
{
    return response_received(p, p.n_rar).then(RadioState::Sleep, p.t_k2_us + p.t_delta_us);
}

Timeline rar_failure(const SystemParams& p)
{
    return Timeline{}.then(pdcch_monitor_slot(p), p.n_rar);
}

Timeline msg3(const SystemParams& p)
{
    return Timeline{}.then(RadioState::Transmit, p.t_s_us);
}

Timeline msg4_success(const SystemParams& p)
{
    return response_received(p, p.n_crt)
        .then(RadioState::Sleep, p.t_pucch_us)
        .then(RadioState::Transmit, p.t_s_us);
}

Timeline msg4_failure(const SystemParams& p)
{
    return Timeline{}.then(pdcch_monitor_slot(p), p.n_crt);
}

Timeline msga(const SystemParams& p)
{
    return preamble_slot(p).then(RadioState::Transmit, p.t_s_us);
}

Timeline msgb_success(const SystemParams& p)
{
    return response_received(p, p.n_rar)
        .then(RadioState::Sleep, p.t_pucch_us)
        .then(RadioState::Transmit, p.t_s_us);
}

Timeline msgb_fallback(const SystemParams& p)
{
    return rar_success(p);
}

Timeline data_slot(const SystemParams& p)
{
    return Timeline{}.then(RadioState::Transmit, p.t_s_us);
}

Timeline data_harq(const SystemParams& p, int rounds)
{
    // DCI slot, K2 gap, data, N_DCI slots until the NDI, then its reception.
    Timeline round;
    round.then(pdcch_monitor_slot(p))
        .then(RadioState::Sleep, p.t_k2_us)
        .then(RadioState::Transmit, p.t_s_us)
        .then(pdcch_monitor_slot(p), p.n_dci)
        .then(RadioState::Receive, p.t_s_us);
    return Timeline{}
        .then(round, rounds)
        .then(RadioState::Sleep, p.t_pucch_us)
        .then(RadioState::Transmit, p.t_s_us);
}

} // namespace timeline

OutcomeEnergyTable OutcomeEnergyTable::from(const SystemParams& p)
{
    OutcomeEnergyTable t;
    t.preamble = timeline::preamble_slot(p).energy_uj(p);
    t.rar_success = timeline::rar_success(p).energy_uj(p);
    t.rar_failure = timeline::rar_failure(p).energy_uj(p);
    t.msg3 = timeline::msg3(p).energy_uj(p);
    t.msg4_success = timeline::msg4_success(p).energy_uj(p);
    t.msg4_failure = timeline::msg4_failure(p).energy_uj(p);
    t.data_slot = timeline::data_slot(p).energy_uj(p);
    t.msga = timeline::msga(p).energy_uj(p);
    t.msgb_success = timeline::msgb_success(p).energy_uj(p);
    t.msgb_failure = timeline::rar_failure(p).energy_uj(p);
    t.msgb_fallback = timeline::msgb_fallback(p).energy_uj(p);
    for (int k = 1; k <= p.harq_max; ++k) {
        t.data_harq.push_back(timeline::data_harq(p, k).energy_uj(p));
    }
    return t;
}

} // namespace rach
