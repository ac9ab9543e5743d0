#ifndef RACH_ENERGY_H
#define RACH_ENERGY_H

#include <array>
#include <span>
#include <stdexcept>
#include <string_view>

#include "rach/analytic.h"

namespace rach {

/// Energy of each protocol message, in uJ. Powers are taken in mW and
/// durations in us, so every product is scaled by 1e-3.
struct MessageEnergies
{
    double e_p;          ///< preamble slot
    double e_msg2s;      ///< RAR received at half window, then wait for Msg3
    double e_msg2f;      ///< full RAR window without a response
    double e_msg3;
    double e_msg4s;      ///< Msg4 at half CRT, then ACK
    double e_msg4f;      ///< full CRT without Msg4
    double e_data;       ///< one PUSCH slot of data
    double e_data_harq;  ///< expected data energy over up to K HARQ rounds
    double e_msga;       ///< preamble slot + PUSCH slot
    double e_msgbs;
    double e_msgbf;
    double e_msgbfb;     ///< fallback MsgB carrying a Msg3 grant
};

MessageEnergies message_energies(const SystemParams& p);

/// Energy when data HARQ completes after exactly k transmissions.
double data_energy_k(const SystemParams& p, int k);

/// sum_{k<K} (1-B) B^{k-1} E^k + B^{K-1} E^K
double data_harq_energy(const SystemParams& p);

struct EnergyBranch
{
    std::string_view label;
    double weight = 0.0;
    double energy_uj = 0.0;
};

/// Outcome branches of one RACH attempt for a non-empty device: three for
/// the 4-step variants, four for the 2-step variants.
struct EnergyMixture
{
    std::array<EnergyBranch, 4> branches{};
    int count = 0;
    double t_nonempty = 0.0;

    std::span<const EnergyBranch> active() const { return {branches.data(), static_cast<std::size_t>(count)}; }
    double total_weight() const;
    /// T * sum(weight * energy)
    double expected_uj() const;
};

EnergyMixture energy_mixture(SchemeKind scheme, const TrafficState& t, const SystemParams& p,
                             ReceiverModel rx);

/// Average energy E^m of a typical device in one RACH attempt, uJ.
double scheme_energy(SchemeKind scheme, const TrafficState& t, const SystemParams& p,
                     ReceiverModel rx);

class UndefinedMetric : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

struct EnergyHistoryEntry
{
    double energy_uj;
    double t_nonempty;
    double p_overall;
};

/// sum_t E^t / sum_t T^t P^t. Throws UndefinedMetric when nothing is delivered.
double energy_per_packet(std::span<const EnergyHistoryEntry> history);

} // namespace rach

#endif
