// Acceptance suite: one PASS/FAIL line per criterion, details indented above it.

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.h"
#include "rach/analytic.h"
#include "rach/energy.h"
#include "rach/experiment.h"
#include "rach/sim.h"
#include "rach/zadoff_chu.h"

using namespace rach;

namespace {

// Pinned tolerances and budgets.
constexpr double kAgreementTol = 0.02;
constexpr std::uint64_t kMinActiveSamples = 100000;
constexpr int kAgreementReps = 4000;
constexpr int kPdpDraws = 10000;
constexpr double kKsAlpha = 0.01;
constexpr double kPeakRelTol = 1e-9;
constexpr double kCaptureTol = 0.05;
constexpr std::uint64_t kCaptureTrials = 1000000;
constexpr int kOrderingReps = 400;
constexpr double kWeightTol = 1e-9;
constexpr double kStableTol = 0.01;
constexpr int kCongestionReps = 2000;
constexpr double kFlowTol = 0.10;
constexpr int kFlowReps = 300;
constexpr int kConservationReps = 100;
constexpr std::uint64_t kSeed = 20240601;

struct Verdict
{
    bool pass;
    std::string summary;
};

std::string
fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));

std::string
fmt(const char* f, ...)
{
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

void
detail(const std::string& s)
{
    std::printf("    %s\n", s.c_str());
}

const char*
name(SchemeKind s)
{
    switch (s) {
    case SchemeKind::FourStep: return "4step";
    case SchemeKind::FourStepSDT: return "4stepSDT";
    case SchemeKind::TwoStep: return "2step";
    case SchemeKind::TwoStepSDT: return "2stepSDT";
    }
    return "?";
}

const char*
name(ReceiverModel r)
{
    return r == ReceiverModel::Advanced ? "advanced" : "basic";
}

SimConfig
sim_config(SchemeKind s, ReceiverModel r, double lambda, int reps, int slots)
{
    SimConfig c;
    c.scheme = s;
    c.receiver = r;
    c.params.lambda_dp = lambda;
    c.replications = reps;
    c.slots = slots;
    c.seed = kSeed;
    return c;
}

// Shared by criteria 1 and 6.
std::vector<SimResult> g_agreement_runs;

Verdict
criterion_1()
{
    const auto p = default_params();
    int failed = 0;
    double worst = 0.0;
    std::uint64_t min_samples = ~0ULL;
    for (auto s : kAllSchemes) {
        const auto an = evolve(s, ReceiverModel::Advanced, p, 10);
        g_agreement_runs.push_back(run(sim_config(s, ReceiverModel::Advanced, 5.0, kAgreementReps, 10)));
        const auto& sim = g_agreement_runs.back();
        std::string row = fmt("%-9s", name(s));
        for (int m = 0; m < 10; ++m) {
            const auto& e = sim.slots[m];
            const double gap = e.success->value - an[m].p_overall;
            min_samples = std::min(min_samples, e.totals.active_devices);
            worst = std::max(worst, std::fabs(gap));
            const bool ok = std::fabs(gap) <= kAgreementTol;
            failed += !ok;
            row += fmt(" %+.4f%s", gap, ok ? "" : "*");
        }
        detail(row);
    }
    detail(fmt("sim - analytic per slot 1..10 (* = beyond %.2f); min active samples per cell %llu", kAgreementTol,
               static_cast<unsigned long long>(min_samples)));
    const bool enough = min_samples >= kMinActiveSamples;
    return {failed == 0 && enough,
            fmt("analytic-simulation agreement, lambda_dp=5, advanced: %d/40 cells beyond %.2f, max |gap| %.4f, "
                ">=%llu samples per cell: %s",
                failed, kAgreementTol, worst, static_cast<unsigned long long>(kMinActiveSamples),
                enough ? "yes" : "no")};
}

Verdict
criterion_2()
{
    const auto link = LinkBudget::from(default_params());
    WaveformPdp w(link);
    RngStream rng(kSeed, 0, StreamPurpose::Pdp);
    std::vector<double> peaks;
    peaks.reserve(kPdpDraws);
    for (int i = 0; i < kPdpDraws; ++i)
        peaks.push_back(w.draw(i % w.preamble_count(), rng));

    std::mt19937_64 gen(kSeed);
    std::exponential_distribution<double> ref(1.0 / link.pdp_peak_mean_mw());
    std::vector<double> reference;
    for (int i = 0; i < kPdpDraws; ++i)
        reference.push_back(ref(gen));
    const auto ks = oracle::ks_two_sample(peaks, reference);

    double mean = 0.0;
    for (double v : peaks)
        mean += v / kPdpDraws;

    const double ideal = link.rho_mw * link.n_zc * static_cast<double>(link.n_zc);
    double worst_rel = 0.0;
    for (int index : {0, 17, 63})
        for (int delay : {0, 6, 12})
            worst_rel = std::max(worst_rel, std::fabs(w.peak(index, cplx(1.0, 0.0), delay, nullptr) / ideal - 1.0));

    detail(fmt("waveform mean %.5e mW vs Exp mean %.5e mW; KS D=%.4f p=%.4f", mean, link.pdp_peak_mean_mw(),
               ks.statistic, ks.p_value));
    detail(fmt("noiseless unit-gain peak vs rho*N^2: max relative error %.2e", worst_rel));
    const bool pass = ks.p_value > kKsAlpha && worst_rel <= kPeakRelTol;
    return {pass, fmt("waveform PDP peaks: KS p=%.4f (need > %.2f), ideal peak rel. error %.1e (need <= %.0e)",
                      ks.p_value, kKsAlpha, worst_rel, kPeakRelTol)};
}

Verdict
criterion_3()
{
    const auto p = default_params();
    const auto link = LinkBudget::from(p);
    bool pass = true;
    std::string gaps;
    for (int n = 0; n <= 3; ++n) {
        const double closed = pusch_decoding_cond(n, p, ReceiverModel::Advanced);
        const double bf = oracle::brute_force_capture(n, link.sinr_threshold, link.noise_mw / link.rho_mw,
                                                      kCaptureTrials, kSeed + n);
        const double gap = bf - closed;
        const bool ok = std::fabs(gap) <= kCaptureTol;
        pass = pass && ok;
        detail(fmt("n=%d: closed form %.6f, brute force %.6f (%llu trials), gap %+.4f %s", n, closed, bf,
                   static_cast<unsigned long long>(kCaptureTrials), gap, ok ? "ok" : "beyond tolerance"));
        gaps += fmt(" %+.4f", gap);
    }
    return {pass, fmt("capture formula vs brute force, n=0..3, tol %.2f: gaps%s", kCaptureTol, gaps.c_str())};
}

Verdict
criterion_4()
{
    auto p = default_params();
    int success_fail = 0, success_checks = 0, energy_fail = 0, energy_checks = 0;
    std::vector<std::string> energy_notes;

    auto ge = [](double a, double b, double slack) { return a >= b - slack; };

    for (auto rx : kAllReceivers) {
        for (int l = 1; l <= 10; ++l) {
            p.lambda_dp = l;
            double pa[4], ea[4], ps[4], cs[4], es[4], ces[4];
            for (std::size_t i = 0; i < 4; ++i) {
                const auto an = evolve(kAllSchemes[i], rx, p, 10);
                pa[i] = an[9].p_overall;
                ea[i] = an[9].energy_per_packet_uj.value_or(NAN);
                const auto sim = run(sim_config(kAllSchemes[i], rx, l, kOrderingReps, 10));
                const auto& e = sim.slots[9];
                ps[i] = e.success ? e.success->value : NAN;
                cs[i] = e.success && e.success->ci95 ? *e.success->ci95 : 0.0;
                es[i] = e.energy_per_packet ? e.energy_per_packet->value : NAN;
                ces[i] = e.energy_per_packet && e.energy_per_packet->ci95 ? *e.energy_per_packet->ci95 : 0.0;
            }
            // Indices: 0 4step, 1 4stepSDT, 2 2step, 3 2stepSDT.
            const std::pair<int, int> success_pairs[] = {{3, 1}, {1, 0}, {3, 2}, {2, 0}};
            for (auto [hi, lo] : success_pairs) {
                success_checks += 2;
                if (!ge(pa[hi], pa[lo], 0.0))
                    ++success_fail;
                if (!ge(ps[hi], ps[lo], std::hypot(cs[hi], cs[lo])))
                    ++success_fail;
            }
            const std::pair<int, int> energy_pairs[] = {{0, 1}, {1, 2}, {2, 3}};
            for (auto [hi, lo] : energy_pairs) {
                energy_checks += 2;
                const bool a_ok = ea[hi] > ea[lo];
                const bool s_ok = es[hi] > es[lo] - std::hypot(ces[hi], ces[lo]);
                energy_fail += !a_ok + !s_ok;
                if (!a_ok || !s_ok)
                    energy_notes.push_back(fmt("%s lambda=%d: E_%s %s E_%s (analytic %.1f vs %.1f, sim %.1f vs %.1f)",
                                               name(rx), l, name(kAllSchemes[hi]), "<=", name(kAllSchemes[lo]),
                                               ea[hi], ea[lo], es[hi], es[lo]));
            }
        }
    }
    detail(fmt("success ordering violations: %d of %d (analytic exact, simulation within combined CI)",
               success_fail, success_checks));
    detail(fmt("energy-per-packet ordering violations: %d of %d", energy_fail, energy_checks));
    for (std::size_t i = 0; i < energy_notes.size() && i < 12; ++i)
        detail("  " + energy_notes[i]);
    if (energy_notes.size() > 12)
        detail(fmt("  ... %zu more", energy_notes.size() - 12));
    return {success_fail == 0 && energy_fail == 0,
            fmt("scheme orderings at slot 10, lambda_dp 1..10, both receivers and engines: success %d/%d "
                "violations, energy %d/%d violations",
                success_fail, success_checks, energy_fail, energy_checks)};
}

Verdict
criterion_5()
{
    auto p = default_params();
    double worst = 0.0;
    int cells = 0;
    for (auto rx : kAllReceivers)
        for (int l = 1; l <= 10; ++l) {
            p.lambda_dp = l;
            for (auto s : kAllSchemes)
                for (const auto& slot : evolve(s, rx, p, 10)) {
                    const auto m = energy_mixture(s, slot.traffic, p, rx);
                    worst = std::max(worst, std::fabs(m.total_weight() - 1.0));
                    ++cells;
                }
        }
    return {worst <= kWeightTol,
            fmt("energy mixture weights: max |sum - 1| = %.2e over %d cells (tol %.0e)", worst, cells, kWeightTol)};
}

Verdict
criterion_6()
{
    const auto p = default_params();
    bool pass = true;
    for (std::size_t i = 0; i < 4; ++i) {
        const auto s = kAllSchemes[i];
        const auto an = evolve(s, ReceiverModel::Advanced, p, 10);
        const double da = std::fabs(an[9].p_overall - an[8].p_overall);
        const auto& sim = g_agreement_runs.at(i);
        const double ds = std::fabs(sim.slots[9].success->value - sim.slots[8].success->value);
        const bool ok = da < kStableTol && ds < kStableTol;
        pass = pass && ok;
        detail(fmt("advanced %-9s |P10 - P9| analytic %.5f, simulation %.5f %s", name(s), da, ds, ok ? "" : "FAIL"));
    }
    for (auto s : kAllSchemes) {
        const auto an = evolve(s, ReceiverModel::Basic, p, 10);
        const auto sim = run(sim_config(s, ReceiverModel::Basic, 5.0, kCongestionReps, 10));
        bool a_ok = true, s_ok = true;
        for (int m = 2; m < 10; ++m) {
            a_ok = a_ok && an[m].p_overall < an[m - 1].p_overall;
            s_ok = s_ok && sim.slots[m].success->value < sim.slots[m - 1].success->value;
        }
        pass = pass && a_ok && s_ok;
        detail(fmt("basic    %-9s P^m strictly decreasing on m=2..10: analytic %s, simulation %s (P^10 %.4f / %.4f)",
                   name(s), a_ok ? "yes" : "no", s_ok ? "yes" : "no", an[9].p_overall, sim.slots[9].success->value));
    }
    return {pass, "stability (advanced) and congestion (basic) shapes at lambda_dp=5"};
}

Verdict
criterion_7()
{
    const auto p = default_params();
    const double rate_target = p.mu_new;
    const double r_target = p.mu_new * p.packet_size_bits / (p.t_rach_us * 1e-6);
    bool pass = true;
    double worst = 0.0;
    for (auto s : kAllSchemes) {
        std::string row = fmt("%-9s", name(s));
        for (int l = 1; l <= 5; ++l) {
            const auto sim = run(sim_config(s, ReceiverModel::Advanced, l, kFlowReps, 30));
            double deliveries = 0.0, devices = 0.0;
            for (int m = 20; m < 30; ++m) {
                deliveries += static_cast<double>(sim.slots[m].totals.deliveries);
                devices += static_cast<double>(sim.slots[m].totals.population);
            }
            const double rate = deliveries / devices;
            const double rel = rate / rate_target - 1.0;
            worst = std::max(worst, std::fabs(rel));
            const bool ok = std::fabs(rel) <= kFlowTol;
            pass = pass && ok;
            row += fmt("  l=%d %.4f (R=%.1f)%s", l, rate, rate * p.packet_size_bits / (p.t_rach_us * 1e-6),
                       ok ? "" : "*");
        }
        detail(row);
    }
    return {pass, fmt("flow balance, slots 21-30, lambda_dp 1..5: delivered/device/slot within %.0f%% of %.2f "
                      "(R target %.1f bit/s), worst deviation %.2f%%",
                      kFlowTol * 100, rate_target, r_target, worst * 100)};
}

Verdict
criterion_8()
{
    std::uint64_t violations = 0, checked = 0;
    for (auto s : kAllSchemes)
        for (auto rx : kAllReceivers) {
            const auto c = sim_config(s, rx, 5.0, kConservationReps, 10);
            for (int r = 0; r < kConservationReps; ++r) {
                const auto res = run_replication(c, r);
                std::uint64_t arrived = 0, delivered = 0;
                for (const auto& t : res.slots) {
                    arrived += t.arrivals;
                    delivered += t.deliveries;
                    violations += arrived != delivered + t.residual_queue;
                }
                violations += res.arrivals != res.deliveries + res.residual_queue;
                ++checked;
            }
        }
    return {violations == 0, fmt("packet conservation: %llu replications (all schemes and receivers), %llu violations",
                                 static_cast<unsigned long long>(checked),
                                 static_cast<unsigned long long>(violations))};
}

std::string
slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Verdict
criterion_9()
{
    ExperimentPlan plan;
    plan.mode = Mode::Compare;
    plan.receivers = {ReceiverModel::Advanced, ReceiverModel::Basic};
    plan.lambda_dp_grid = {1.0, 5.0};
    plan.slots = 5;
    plan.replications = 64;
    plan.seed = kSeed;

    const auto dir = std::filesystem::temp_directory_path() / "rach_acceptance_determinism";
    std::filesystem::create_directories(dir);
    std::vector<std::string> outputs;
    for (int threads : {1, 4, 1}) {
        plan.threads = threads;
        const auto path = dir / fmt("results_t%d_%zu.csv", threads, outputs.size());
        emit_csv(run_plan(plan), path);
        outputs.push_back(slurp(path));
    }
    const bool same = outputs[0] == outputs[1] && outputs[0] == outputs[2];
    detail(fmt("%zu bytes per file; serial, 4-thread and repeated serial runs compared", outputs[0].size()));
    std::filesystem::remove_all(dir);
    return {same, fmt("determinism: CSV bytes %s across serial and parallel runs", same ? "identical" : "DIFFER")};
}

} // namespace

int
main()
{
    const std::vector<std::function<Verdict()>> criteria{criterion_1, criterion_2, criterion_3,
                                                         criterion_4, criterion_5, criterion_6,
                                                         criterion_7, criterion_8, criterion_9};
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto v = criteria[i]();
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %zu: %s  %s [%.1fs]\n", i + 1, v.pass ? "PASS" : "FAIL", v.summary.c_str(), secs);
        std::fflush(stdout);
        failed += !v.pass;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
