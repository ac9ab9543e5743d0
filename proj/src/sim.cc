#include "rach/sim.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "rach/zadoff_chu.h"

namespace rach {

void
validate(const SimConfig& cfg)
{
    if (cfg.replications < 1)
        throw std::invalid_argument("replications must be >= 1");
    if (cfg.slots < 1)
        throw std::invalid_argument("slots must be >= 1");
    if (cfg.threads < 0)
        throw std::invalid_argument("threads must be >= 0");
    validate(cfg.params);
}

SlotTally&
SlotTally::operator+=(const SlotTally& o)
{
    population += o.population;
    active_devices += o.active_devices;
    arrivals += o.arrivals;
    deliveries += o.deliveries;
    occupied_preambles += o.occupied_preambles;
    preamble_detected_groups += o.preamble_detected_groups;
    pusch_successes += o.pusch_successes;
    fallbacks += o.fallbacks;
    fallback_devices += o.fallback_devices;
    fallback_successes += o.fallback_successes;
    harq_failures += o.harq_failures;
    residual_queue += o.residual_queue;
    for (std::size_t i = 0; i < kOutcomeCount; ++i)
        outcomes[i] += o.outcomes[i];
    energy_uj += o.energy_uj;
    return *this;
}

ReplicationStreams::ReplicationStreams(std::uint64_t seed, std::uint64_t replication)
    : deployment(seed, replication, StreamPurpose::Deployment),
      arrivals(seed, replication, StreamPurpose::Arrivals),
      preamble(seed, replication, StreamPurpose::PreambleChoice),
      pdp(seed, replication, StreamPurpose::Pdp),
      fading(seed, replication, StreamPurpose::Fading),
      harq(seed, replication, StreamPurpose::Harq)
{
}

PdpSampler::PdpSampler(PdpMode mode, const LinkBudget& link)
    : mode_(mode), mean_mw_(link.pdp_peak_mean_mw())
{
    if (mode_ == PdpMode::Waveform)
        waveform_ = std::make_unique<WaveformPdp>(link);
}

PdpSampler::~PdpSampler() = default;
PdpSampler::PdpSampler(PdpSampler&&) noexcept = default;
PdpSampler& PdpSampler::operator=(PdpSampler&&) noexcept = default;

double
PdpSampler::draw(int preamble_index, RngStream& rng)
{
    if (mode_ == PdpMode::Distributional)
        return rng.exponential(mean_mw_);
    return waveform_->draw(preamble_index % waveform_->preamble_count(), rng);
}

Population
deploy(const SimConfig& cfg, RngStream& rng)
{
    const auto& p = cfg.params;
    const std::uint64_t n = rng.poisson(p.lambda_dp * p.xi);
    const double radius = std::sqrt(p.cell_area_km2 / std::numbers::pi);
    Population pop(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        auto& d = pop[i];
        d.id = static_cast<std::uint32_t>(i);
        const double r = radius * std::sqrt(rng.uniform());
        const double phi = 2.0 * std::numbers::pi * rng.uniform();
        d.x_km = r * std::cos(phi);
        d.y_km = r * std::sin(phi);
    }
    return pop;
}

std::uint64_t
arrivals(Population& pop, const SystemParams& p, RngStream& rng)
{
    std::uint64_t total = 0;
    for (auto& d : pop) {
        const std::uint64_t a = rng.poisson(p.mu_new);
        d.queue_len += a;
        total += a;
    }
    return total;
}

double
draw_pdp_peak(PdpMode mode, const SystemParams& p, RngStream& rng)
{
    PdpSampler sampler(mode, LinkBudget::from(p));
    return sampler.draw(0, rng);
}

bool
resolve_preamble_group(std::span<double> peaks, int preamble_index, PdpSampler& sampler,
                       const LinkBudget& link, RngStream& rng)
{
    double best = 0.0;
    for (auto& v : peaks) {
        v = sampler.draw(preamble_index, rng);
        best = std::max(best, v);
    }
    return !peaks.empty() && best > link.detection_threshold_mw;
}

std::optional<std::size_t>
resolve_pusch(std::span<double> gains, ReceiverModel rx, const LinkBudget& link, RngStream& rng)
{
    if (gains.empty())
        return std::nullopt;
    double total = 0.0;
    std::size_t best = 0;
    for (std::size_t i = 0; i < gains.size(); ++i) {
        gains[i] = rng.exponential(1.0);
        total += gains[i];
        if (gains[i] > gains[best])
            best = i;
    }
    if (rx == ReceiverModel::Basic && gains.size() != 1)
        return std::nullopt;
    const double signal = link.rho_mw * gains[best];
    const double interference = link.rho_mw * (total - gains[best]);
    const double sinr = signal / (interference + link.noise_mw);
    if (sinr > link.sinr_threshold)
        return best;
    return std::nullopt;
}

HarqResult
run_data_harq(const SystemParams& p, RngStream& rng)
{
    HarqResult r;
    while (r.rounds < p.harq_max) {
        ++r.rounds;
        if (rng.uniform() >= p.bler) {
            r.delivered = true;
            break;
        }
    }
    return r;
}

SlotEngine::SlotEngine(SchemeKind scheme, ReceiverModel rx, const SystemParams& p, PdpMode pdp_mode)
    : scheme_(scheme),
      rx_(rx),
      params_(p),
      link_(LinkBudget::from(p)),
      table_(OutcomeEnergyTable::from(p)),
      sampler_(pdp_mode, link_),
      buckets_(static_cast<std::size_t>(p.xi))
{
}

double
SlotEngine::outcome_energy(Outcome o, int harq_rounds) const
{
    const bool sdt = carries_data(scheme_);
    const double harq = harq_rounds > 0 ? table_.data_harq.at(harq_rounds - 1) : 0.0;
    const double sdt_data = sdt ? table_.data_slot : 0.0;

    if (!is_two_step(scheme_)) {
        switch (o) {
        case Outcome::Undetected:
            return table_.preamble + table_.rar_failure;
        case Outcome::PuschLost:
            return table_.preamble + table_.rar_success + table_.msg3 + sdt_data + table_.msg4_failure;
        case Outcome::Captured:
            return table_.preamble + table_.rar_success + table_.msg3 + sdt_data +
                   table_.msg4_success + harq;
        default:
            throw std::logic_error("outcome not reachable in 4-step access");
        }
    }

    const double msga = table_.msga + sdt_data;
    switch (o) {
    case Outcome::Undetected:
    case Outcome::LostToOtherCapture:
        return msga + table_.msgb_failure;
    case Outcome::Captured:
        return msga + table_.msgb_success + harq;
    case Outcome::FallbackWon:
        return msga + table_.msgb_fallback + table_.msg3 + table_.msg4_success + harq;
    case Outcome::FallbackLost:
        return msga + table_.msgb_fallback + table_.msg3 + table_.msg4_failure;
    default:
        throw std::logic_error("outcome not reachable in 2-step access");
    }
}

void
SlotEngine::charge(DeviceState& d, SlotTally& tally, Outcome o, int harq_rounds) const
{
    const double e = outcome_energy(o, harq_rounds);
    d.energy_uj += e;
    tally.energy_uj += e;
    ++tally.outcomes[static_cast<std::size_t>(o)];
}

void
SlotEngine::deliver(DeviceState& d, SlotTally& tally) const
{
    --d.queue_len;
    ++tally.deliveries;
}

void
SlotEngine::settle_winner(DeviceState& d, SlotTally& tally, Outcome o, bool data_in_contention,
                          ReplicationStreams& streams) const
{
    if (data_in_contention) {
        charge(d, tally, o, 0);
        deliver(d, tally);
        return;
    }
    const HarqResult h = run_data_harq(params_, streams.harq);
    charge(d, tally, o, h.rounds);
    if (h.delivered)
        deliver(d, tally);
    else
        ++tally.harq_failures;
}

SlotTally
SlotEngine::step_slot(Population& pop, ReplicationStreams& streams)
{
    SlotTally tally;
    tally.population = pop.size();
    tally.arrivals = arrivals(pop, params_, streams.arrivals);

    for (auto& b : buckets_)
        b.clear();
    for (auto& d : pop) {
        d.pdp_peak_mw = 0.0;
        d.gain = 0.0;
        d.fallback_gain = 0.0;
        if (d.queue_len == 0) {
            d.preamble = -1;
            continue;
        }
        ++tally.active_devices;
        d.preamble = static_cast<int>(streams.preamble.below(buckets_.size()));
        buckets_[static_cast<std::size_t>(d.preamble)].push_back(d.id);
    }

    const bool two_step = is_two_step(scheme_);
    const bool sdt = carries_data(scheme_);

    for (std::size_t pre = 0; pre < buckets_.size(); ++pre) {
        const auto& group = buckets_[pre];
        if (group.empty())
            continue;
        ++tally.occupied_preambles;
        const std::size_t g = group.size();
        scratch_.resize(g);
        std::span<double> buf(scratch_.data(), g);

        const bool detected =
            resolve_preamble_group(buf, static_cast<int>(pre), sampler_, link_, streams.pdp);
        for (std::size_t i = 0; i < g; ++i)
            pop[group[i]].pdp_peak_mw = buf[i];
        if (!detected) {
            for (auto id : group)
                charge(pop[id], tally, Outcome::Undetected, 0);
            continue;
        }
        ++tally.preamble_detected_groups;

        const auto winner = resolve_pusch(buf, rx_, link_, streams.fading);
        for (std::size_t i = 0; i < g; ++i)
            pop[group[i]].gain = buf[i];

        if (winner) {
            ++tally.pusch_successes;
            for (std::size_t i = 0; i < g; ++i) {
                if (i == *winner)
                    continue;
                charge(pop[group[i]], tally, two_step ? Outcome::LostToOtherCapture : Outcome::PuschLost, 0);
            }
            settle_winner(pop[group[*winner]], tally, Outcome::Captured, sdt, streams);
            continue;
        }

        if (!two_step) {
            for (auto id : group)
                charge(pop[id], tally, Outcome::PuschLost, 0);
            continue;
        }

        // Fallback: Msg3 of every member contends again with fresh fading.
        ++tally.fallbacks;
        tally.fallback_devices += g;
        const auto fb_winner = resolve_pusch(buf, rx_, link_, streams.fading);
        for (std::size_t i = 0; i < g; ++i)
            pop[group[i]].fallback_gain = buf[i];
        for (std::size_t i = 0; i < g; ++i) {
            if (fb_winner && i == *fb_winner)
                continue;
            charge(pop[group[i]], tally, Outcome::FallbackLost, 0);
        }
        if (fb_winner) {
            ++tally.fallback_successes;
            settle_winner(pop[group[*fb_winner]], tally, Outcome::FallbackWon, false, streams);
        }
    }

    for (const auto& d : pop)
        tally.residual_queue += d.queue_len;
    return tally;
}

ReplicationResult
run_replication(const SimConfig& cfg, std::uint64_t replication)
{
    ReplicationStreams streams(cfg.seed, replication);
    ReplicationResult out;
    Population pop = deploy(cfg, streams.deployment);
    SlotEngine engine(cfg.scheme, cfg.receiver, cfg.params, cfg.pdp_mode);
    out.slots.reserve(static_cast<std::size_t>(cfg.slots));
    for (int m = 0; m < cfg.slots; ++m) {
        out.slots.push_back(engine.step_slot(pop, streams));
        out.arrivals += out.slots.back().arrivals;
        out.deliveries += out.slots.back().deliveries;
    }
    out.residual_queue = out.slots.empty() ? 0 : out.slots.back().residual_queue;
    out.final_population = std::move(pop);
    return out;
}

namespace {

constexpr int kBlockSize = 16;
constexpr double kZ95 = 1.959963984540054;

// Per-replication pairs (x_i, y_i) for a ratio estimate sum(y)/sum(x).
struct RatioAccumulator
{
    double n = 0, sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;

    void add(double x, double y)
    {
        n += 1;
        sx += x;
        sy += y;
        sxx += x * x;
        syy += y * y;
        sxy += x * y;
    }

    RatioAccumulator& operator+=(const RatioAccumulator& o)
    {
        n += o.n;
        sx += o.sx;
        sy += o.sy;
        sxx += o.sxx;
        syy += o.syy;
        sxy += o.sxy;
        return *this;
    }

    // Delta method on the ratio of means.
    std::optional<double> half_width() const
    {
        if (n < 2 || sx <= 0)
            return std::nullopt;
        const double r = sy / sx;
        const double xbar = sx / n;
        const double ss = syy - 2 * r * sxy + r * r * sxx;  // sum (y_i - r x_i)^2
        const double var = std::max(0.0, ss / (n - 1)) / (n * xbar * xbar);
        return kZ95 * std::sqrt(var);
    }
};

struct SlotAccumulators
{
    SlotTally totals;
    RatioAccumulator success;     // x = active, y = deliveries
    RatioAccumulator energy;      // x = cumulative deliveries, y = cumulative energy
    RatioAccumulator throughput;  // x = devices, y = deliveries

    SlotAccumulators& operator+=(const SlotAccumulators& o)
    {
        totals += o.totals;
        success += o.success;
        energy += o.energy;
        throughput += o.throughput;
        return *this;
    }
};

struct BlockResult
{
    std::vector<SlotAccumulators> slots;
    std::string raw;
};

void
dump_slot(std::ostringstream& os, std::uint64_t rep, int slot, const SlotTally& t)
{
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "{\"replication\":%llu,\"slot\":%d,\"population\":%llu,\"active\":%llu,"
                  "\"arrivals\":%llu,\"deliveries\":%llu,\"occupied_preambles\":%llu,"
                  "\"detected_groups\":%llu,\"pusch_successes\":%llu,\"fallbacks\":%llu,"
                  "\"fallback_devices\":%llu,\"fallback_successes\":%llu,\"harq_failures\":%llu,"
                  "\"residual_queue\":%llu,\"energy_uj\":%.17g}\n",
                  static_cast<unsigned long long>(rep), slot,
                  static_cast<unsigned long long>(t.population),
                  static_cast<unsigned long long>(t.active_devices),
                  static_cast<unsigned long long>(t.arrivals),
                  static_cast<unsigned long long>(t.deliveries),
                  static_cast<unsigned long long>(t.occupied_preambles),
                  static_cast<unsigned long long>(t.preamble_detected_groups),
                  static_cast<unsigned long long>(t.pusch_successes),
                  static_cast<unsigned long long>(t.fallbacks),
                  static_cast<unsigned long long>(t.fallback_devices),
                  static_cast<unsigned long long>(t.fallback_successes),
                  static_cast<unsigned long long>(t.harq_failures),
                  static_cast<unsigned long long>(t.residual_queue), t.energy_uj);
    os << buf;
}

BlockResult
run_block(const SimConfig& cfg, int block, bool want_raw)
{
    BlockResult out;
    out.slots.resize(static_cast<std::size_t>(cfg.slots));
    std::ostringstream raw;
    const int first = block * kBlockSize;
    const int last = std::min(cfg.replications, first + kBlockSize);
    for (int rep = first; rep < last; ++rep) {
        const auto r = run_replication(cfg, static_cast<std::uint64_t>(rep));
        double cum_deliv = 0.0, cum_energy = 0.0;
        for (int m = 0; m < cfg.slots; ++m) {
            const auto& t = r.slots[static_cast<std::size_t>(m)];
            auto& acc = out.slots[static_cast<std::size_t>(m)];
            acc.totals += t;
            cum_deliv += static_cast<double>(t.deliveries);
            cum_energy += t.energy_uj;
            acc.success.add(static_cast<double>(t.active_devices), static_cast<double>(t.deliveries));
            acc.energy.add(cum_deliv, cum_energy);
            acc.throughput.add(static_cast<double>(t.population), static_cast<double>(t.deliveries));
            if (want_raw)
                dump_slot(raw, static_cast<std::uint64_t>(rep), m + 1, t);
        }
    }
    out.raw = raw.str();
    return out;
}

} // namespace

SimResult
run(const SimConfig& cfg, std::ostream* raw_dump)
{
    validate(cfg);
    const int blocks = (cfg.replications + kBlockSize - 1) / kBlockSize;
    int threads = cfg.threads == 0 ? static_cast<int>(std::thread::hardware_concurrency()) : cfg.threads;
    threads = std::clamp(threads, 1, blocks);

    std::vector<BlockResult> results(static_cast<std::size_t>(blocks));
    const bool want_raw = raw_dump != nullptr;
    if (threads == 1) {
        for (int b = 0; b < blocks; ++b)
            results[static_cast<std::size_t>(b)] = run_block(cfg, b, want_raw);
    } else {
        std::atomic<int> next{0};
        std::exception_ptr error;
        std::mutex error_mutex;
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (int b = next++; b < blocks; b = next++) {
                    try {
                        results[static_cast<std::size_t>(b)] = run_block(cfg, b, want_raw);
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (!error)
                            error = std::current_exception();
                    }
                }
            });
        }
        for (auto& th : pool)
            th.join();
        if (error)
            std::rethrow_exception(error);
    }

    std::vector<SlotAccumulators> acc(static_cast<std::size_t>(cfg.slots));
    for (auto& b : results) {
        for (std::size_t m = 0; m < acc.size(); ++m)
            acc[m] += b.slots[m];
        if (raw_dump)
            *raw_dump << b.raw;
    }

    SimResult res;
    res.config = cfg;
    const auto& p = cfg.params;
    const double bits_per_slot = p.packet_size_bits / p.t_rach_us * 1e6;
    double cum_deliv = 0.0, cum_energy = 0.0;
    for (int m = 0; m < cfg.slots; ++m) {
        const auto& a = acc[static_cast<std::size_t>(m)];
        const auto& t = a.totals;
        SlotEstimate e;
        e.slot = m + 1;
        e.totals = t;
        cum_deliv += static_cast<double>(t.deliveries);
        cum_energy += t.energy_uj;

        if (t.active_devices > 0) {
            const double ph = static_cast<double>(t.deliveries) / static_cast<double>(t.active_devices);
            auto hw = a.success.half_width();
            if (!hw)
                hw = kZ95 * std::sqrt(ph * (1 - ph) / static_cast<double>(t.active_devices));
            e.success = Estimate{ph, hw};
            e.fallback_rate =
                static_cast<double>(t.fallback_devices) / static_cast<double>(t.active_devices);
        }
        if (cum_deliv > 0)
            e.energy_per_packet = Estimate{cum_energy / cum_deliv, a.energy.half_width()};
        if (t.population > 0) {
            const double n = static_cast<double>(t.population);
            const auto hw = a.throughput.half_width();
            e.throughput_bps = Estimate{static_cast<double>(t.deliveries) / n * bits_per_slot,
                                        hw ? std::optional<double>(*hw * bits_per_slot) : std::nullopt};
            e.energy_per_device_uj = t.energy_uj / n;
        }
        res.slots.push_back(e);
    }
    return res;
}

} // namespace rach
