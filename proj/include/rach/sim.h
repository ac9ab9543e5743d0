#ifndef RACH_SIM_H
#define RACH_SIM_H

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "rach/params.h"
#include "rach/rng.h"
#include "rach/scheme.h"
#include "rach/timeline.h"

namespace rach {

class WaveformPdp;

enum class PdpMode { Distributional, Waveform };

struct DeviceState
{
    std::uint32_t id = 0;
    std::uint64_t queue_len = 0;
    double x_km = 0.0;  ///< position in the cell disc; unused under ideal power control
    double y_km = 0.0;
    double energy_uj = 0.0;
    // Transients of the current attempt; -1 / 0 when the buffer is empty.
    int preamble = -1;
    double pdp_peak_mw = 0.0;
    double gain = 0.0;           ///< |h|^2 of Msg3 / MsgA PUSCH
    double fallback_gain = 0.0;  ///< |h|^2 of the fallback Msg3
};

using Population = std::vector<DeviceState>;

struct SimConfig
{
    int replications = 1;
    std::uint64_t seed = 1;
    ReceiverModel receiver = ReceiverModel::Advanced;
    SchemeKind scheme = SchemeKind::FourStep;
    int slots = 10;
    PdpMode pdp_mode = PdpMode::Distributional;
    SystemParams params;
    int threads = 1;  ///< 0 = hardware concurrency; never changes the results
};

void validate(const SimConfig& cfg);

/// How a device's attempt ended. 4-step variants use the first three.
enum class Outcome : std::uint8_t {
    Undetected,
    PuschLost,            ///< detected, not the captured device (4-step)
    Captured,             ///< won Msg3 / MsgA capture
    LostToOtherCapture,   ///< 2-step: another device of the group was captured
    FallbackWon,
    FallbackLost,
};
inline constexpr std::size_t kOutcomeCount = 6;

/// Counters of one slot; additive across replications.
struct SlotTally
{
    std::uint64_t population = 0;
    std::uint64_t active_devices = 0;
    std::uint64_t arrivals = 0;
    std::uint64_t deliveries = 0;
    std::uint64_t occupied_preambles = 0;
    std::uint64_t preamble_detected_groups = 0;
    std::uint64_t pusch_successes = 0;     ///< groups with a first-stage capture
    std::uint64_t fallbacks = 0;           ///< groups sent to fallback
    std::uint64_t fallback_devices = 0;
    std::uint64_t fallback_successes = 0;
    std::uint64_t harq_failures = 0;
    std::uint64_t residual_queue = 0;      ///< packets left after the slot
    std::array<std::uint64_t, kOutcomeCount> outcomes{};
    double energy_uj = 0.0;

    SlotTally& operator+=(const SlotTally& o);
    std::uint64_t outcome(Outcome o) const { return outcomes[static_cast<std::size_t>(o)]; }
};

/// Independent streams of one replication.
struct ReplicationStreams
{
    ReplicationStreams(std::uint64_t seed, std::uint64_t replication);

    RngStream deployment;
    RngStream arrivals;
    RngStream preamble;
    RngStream pdp;
    RngStream fading;
    RngStream harq;
};

/// PDP peak source: exponential draws, or synthesized ZC correlation.
class PdpSampler
{
public:
    PdpSampler(PdpMode mode, const LinkBudget& link);
    ~PdpSampler();
    PdpSampler(PdpSampler&&) noexcept;
    PdpSampler& operator=(PdpSampler&&) noexcept;

    double draw(int preamble_index, RngStream& rng);

private:
    PdpMode mode_;
    double mean_mw_;
    std::unique_ptr<WaveformPdp> waveform_;
};

/// Poisson(lambda_dp * xi) devices, uniform on the cell disc, empty queues.
Population deploy(const SimConfig& cfg, RngStream& rng);

/// Adds Poisson(mu_new) packets to every queue; returns the total added.
std::uint64_t arrivals(Population& pop, const SystemParams& p, RngStream& rng);

double draw_pdp_peak(PdpMode mode, const SystemParams& p, RngStream& rng);

/// Draws one peak per group member into `peaks`; the group is detected when
/// the largest peak exceeds the threshold.
bool resolve_preamble_group(std::span<double> peaks, int preamble_index, PdpSampler& sampler,
                            const LinkBudget& link, RngStream& rng);

/// Draws a fresh unit-mean exponential gain per member into `gains` and
/// returns the decoded member, if any. Ties go to the lowest index.
std::optional<std::size_t> resolve_pusch(std::span<double> gains, ReceiverModel rx,
                                         const LinkBudget& link, RngStream& rng);

struct HarqResult
{
    bool delivered = false;
    int rounds = 0;
};

/// Up to K independent transmissions, each failing with probability B.
HarqResult run_data_harq(const SystemParams& p, RngStream& rng);

/// Per-replication slot executor: fixed scheme, receiver and parameters.
class SlotEngine
{
public:
    SlotEngine(SchemeKind scheme, ReceiverModel rx, const SystemParams& p,
               PdpMode pdp_mode = PdpMode::Distributional);

    /// One RACH period: arrivals, preamble choice, detection, contention
    /// resolution (with fallback for 2-step), data HARQ, energy accounting.
    SlotTally step_slot(Population& pop, ReplicationStreams& streams);

    /// Energy charged to a device whose attempt ended in `o`;
    /// `harq_rounds` is 0 when no data HARQ ran.
    double outcome_energy(Outcome o, int harq_rounds) const;

    const OutcomeEnergyTable& energies() const { return table_; }

private:
    void charge(DeviceState& d, SlotTally& tally, Outcome o, int harq_rounds) const;
    void deliver(DeviceState& d, SlotTally& tally) const;
    void settle_winner(DeviceState& d, SlotTally& tally, Outcome o, bool data_in_contention,
                       ReplicationStreams& streams) const;

    SchemeKind scheme_;
    ReceiverModel rx_;
    SystemParams params_;
    LinkBudget link_;
    OutcomeEnergyTable table_;
    PdpSampler sampler_;
    std::vector<std::vector<std::uint32_t>> buckets_;
    std::vector<double> scratch_;
};

struct ReplicationResult
{
    std::vector<SlotTally> slots;
    std::uint64_t arrivals = 0;
    std::uint64_t deliveries = 0;
    std::uint64_t residual_queue = 0;
    Population final_population;
};

ReplicationResult run_replication(const SimConfig& cfg, std::uint64_t replication);

/// Point estimate with a 95% normal-approximation half-width.
struct Estimate
{
    double value = 0.0;
    std::optional<double> ci95;
};

struct SlotEstimate
{
    int slot = 0;
    SlotTally totals;
    std::optional<Estimate> success;            ///< deliveries / active devices
    std::optional<Estimate> energy_per_packet;  ///< cumulative energy / cumulative deliveries
    std::optional<Estimate> throughput_bps;     ///< deliveries * S / (devices * T_RACH)
    std::optional<double> fallback_rate;        ///< fallback devices / active devices
    std::optional<double> energy_per_device_uj; ///< slot energy / devices, the E^m estimate
};

struct SimResult
{
    SimConfig config;
    std::vector<SlotEstimate> slots;
};

/// Replications run in fixed-size blocks; blocks may run in parallel but are
/// reduced in order, so results are bit-identical for any thread count.
/// When `raw_dump` is set, one JSON object per slot per replication is
/// written to it, in replication order.
SimResult run(const SimConfig& cfg, std::ostream* raw_dump = nullptr);

} // namespace rach

#endif
