#ifndef RACH_TIMELINE_H
#define RACH_TIMELINE_H

#include <vector>

#include "rach/params.h"

namespace rach {

enum class RadioState { Sleep, Receive, Transmit };

/// A device-side radio schedule: consecutive (state, duration) intervals.
/// The simulator charges energy by integrating power over these schedules.
class Timeline
{
public:
    struct Interval
    {
        RadioState state;
        double duration_us;
    };

    Timeline& then(RadioState state, double duration_us);
    Timeline& then(const Timeline& other, double times = 1.0);

    double duration_us() const;
    double energy_uj(const SystemParams& p) const;
    const std::vector<Interval>& intervals() const { return intervals_; }

private:
    std::vector<Interval> intervals_;
};

/// Schedules of the individual RA messages, built from slot-level timing.
namespace timeline {

Timeline preamble_slot(const SystemParams& p);
Timeline pdcch_monitor_slot(const SystemParams& p);
Timeline response_received(const SystemParams& p, int window_slots);  // half-window wait + reception
Timeline rar_success(const SystemParams& p);
Timeline rar_failure(const SystemParams& p);
Timeline msg3(const SystemParams& p);
Timeline msg4_success(const SystemParams& p);
Timeline msg4_failure(const SystemParams& p);
Timeline msga(const SystemParams& p);
Timeline msgb_success(const SystemParams& p);
Timeline msgb_fallback(const SystemParams& p);
Timeline data_slot(const SystemParams& p);
/// k HARQ rounds followed by the ACK.
Timeline data_harq(const SystemParams& p, int rounds);

} // namespace timeline

/// Per-outcome energies the simulator charges, derived from timelines.
struct OutcomeEnergyTable
{
    double preamble = 0.0;
    double rar_success = 0.0;
    double rar_failure = 0.0;
    double msg3 = 0.0;
    double msg4_success = 0.0;
    double msg4_failure = 0.0;
    double data_slot = 0.0;
    double msga = 0.0;
    double msgb_success = 0.0;
    double msgb_failure = 0.0;
    double msgb_fallback = 0.0;
    std::vector<double> data_harq;  ///< index k-1: HARQ finished after k rounds

    static OutcomeEnergyTable from(const SystemParams& p);
};

} // namespace rach

#endif
