#include "rach/experiment.h"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "rach/analytic.h"

namespace rach {

namespace {

constexpr std::array<std::pair<Mode, std::string_view>, 3> kModes{{
    {Mode::Analytic, "analytic"},
    {Mode::Simulate, "simulate"},
    {Mode::Compare, "compare"},
}};

constexpr std::array<std::pair<Figure, std::string_view>, 7> kFigures{{
    {Figure::None, "none"},
    {Figure::SuccessVsSlot, "success_vs_slot"},
    {Figure::SuccessVsIntensity, "success_vs_intensity"},
    {Figure::EnergyVsSlot, "energy_vs_slot"},
    {Figure::EnergyVsIntensity, "energy_vs_intensity"},
    {Figure::ThroughputVsSlot, "throughput_vs_slot"},
    {Figure::ThroughputVsIntensity, "throughput_vs_intensity"},
}};

bool
is_intensity_sweep(Figure f)
{
    return f == Figure::SuccessVsIntensity || f == Figure::EnergyVsIntensity ||
           f == Figure::ThroughputVsIntensity;
}

template <typename T>
void
sort_unique(std::vector<T>& v)
{
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

std::string
opt_value(const std::optional<double>& v)
{
    return v ? format_value(*v) : std::string();
}

void
write_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
        throw IoError("cannot open '" + path.string() + "' for writing: " + std::strerror(errno));
    os << content;
    os.flush();
    if (!os)
        throw IoError("write to '" + path.string() + "' failed: " + std::strerror(errno));
}

double
parse_number(std::string_view s, std::string_view what)
{
    const std::string str(s);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(str.c_str(), &end);
    if (str.empty() || end != str.c_str() + str.size() || errno == ERANGE || !std::isfinite(v))
        throw UsageError("malformed " + std::string(what) + " '" + str + "'");
    return v;
}

// Tags each raw-dump line with its cell.
void
forward_raw(std::ostream& os, const std::string& raw, SchemeKind s, ReceiverModel r, double lambda)
{
    char prefix[128];
    std::snprintf(prefix, sizeof prefix, "{\"scheme\":\"%s\",\"receiver\":\"%s\",\"lambda_dp\":%s,",
                  std::string(to_string(s)).c_str(), std::string(to_string(r)).c_str(),
                  format_value(lambda).c_str());
    std::istringstream in(raw);
    std::string line;
    while (std::getline(in, line)) {
        if (line.size() < 2)
            continue;
        os << prefix << line.substr(1) << '\n';
    }
}

ComparisonRow
check(const ResultRow& a, std::string metric, const std::optional<double>& av,
      const std::optional<double>& sv, double tol, bool relative)
{
    ComparisonRow c;
    c.scheme = a.scheme;
    c.receiver = a.receiver;
    c.lambda_dp = a.lambda_dp;
    c.slot = a.slot;
    c.metric = std::move(metric);
    c.analytic = av;
    c.simulation = sv;
    if (!av || !sv) {
        c.status = CheckStatus::Skipped;
        return c;
    }
    c.abs_diff = std::fabs(*av - *sv);
    c.allowed = relative ? tol * std::fabs(*av) : tol;
    c.status = *c.abs_diff <= c.allowed ? CheckStatus::Pass : CheckStatus::Fail;
    return c;
}

} // namespace

std::string_view
to_string(Mode m)
{
    for (const auto& [k, name] : kModes)
        if (k == m)
            return name;
    return "?";
}

std::string_view
to_string(Figure f)
{
    for (const auto& [k, name] : kFigures)
        if (k == f)
            return name;
    return "?";
}

std::string_view
to_string(Engine e)
{
    return e == Engine::Analytic ? "analytic" : "simulation";
}

std::optional<Mode>
parse_mode(std::string_view s)
{
    for (const auto& [k, name] : kModes)
        if (name == s)
            return k;
    return std::nullopt;
}

std::optional<Figure>
parse_figure(std::string_view s)
{
    for (const auto& [k, name] : kFigures)
        if (name == s)
            return k;
    return std::nullopt;
}

std::string
format_value(double v)
{
    if (!std::isfinite(v))
        return {};
    if (v == 0.0)
        v = 0.0;  // no "-0"
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void
validate(const ExperimentPlan& plan)
{
    if (plan.schemes.empty())
        throw UsageError("no scheme selected");
    if (plan.receivers.empty())
        throw UsageError("no receiver selected");
    if (plan.lambda_dp_grid.empty())
        throw UsageError("empty lambda-dp grid");
    for (double l : plan.lambda_dp_grid)
        if (!(l > 0.0) || !std::isfinite(l))
            throw UsageError("lambda-dp values must be positive, got " + format_value(l));
    if (plan.slots < 1)
        throw UsageError("slots must be >= 1");
    if (plan.replications < 1)
        throw UsageError("reps must be >= 1");
    if (plan.threads < 0)
        throw UsageError("threads must be >= 0");
    const auto& t = plan.tolerances;
    if (!(t.success_abs >= 0) || !(t.energy_rel >= 0) || !(t.throughput_rel >= 0))
        throw UsageError("tolerances must be non-negative");
    try {
        auto p = plan.params;
        for (double l : plan.lambda_dp_grid) {
            p.lambda_dp = l;
            rach::validate(p);
        }
    } catch (const ParamError& e) {
        throw UsageError(e.what());
    }
}

std::vector<double>
parse_lambda_grid(std::string_view text)
{
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(':', start);
        parts.push_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    if (parts.size() == 1)
        return {parse_number(parts[0], "lambda-dp value")};
    if (parts.size() != 3)
        throw UsageError("malformed lambda-dp range '" + std::string(text) + "', expected start:stop:step");

    const double a = parse_number(parts[0], "range start");
    const double b = parse_number(parts[1], "range stop");
    const double step = parse_number(parts[2], "range step");
    if (!(step > 0.0))
        throw UsageError("lambda-dp range step must be positive");
    if (b < a)
        throw UsageError("lambda-dp range stop is below start");
    const double span = (b - a) / step;
    if (span > 1e6)
        throw UsageError("lambda-dp range has too many points");
    const auto n = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
    std::vector<double> grid;
    grid.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        grid.push_back(a + static_cast<double>(i) * step);
    return grid;
}

ExperimentPlan
parse_cli(int argc, const char* const* argv)
{
    CLI::App app{"Random-access success, energy and throughput: analytic model and Monte Carlo simulator",
                 "rach_cli"};
    app.footer(
        "Outputs (in --out):\n"
        "  results.csv     scheme,receiver,lambda_dp,slot,engine,success_prob,success_ci95,\n"
        "                  energy_per_packet_uj,energy_ci95,throughput_bps,fallback_rate\n"
        "                  one row per (scheme, receiver, lambda_dp, slot, engine); 6 significant\n"
        "                  digits; empty cells for undefined values\n"
        "  comparison.csv  compare mode: per-cell |analytic - simulation| checks\n"
        "  <figure>.csv    with --figure\n"
        "  raw.jsonl       with --raw-dump: one record per slot per replication\n"
        "Exit status: 0 ok, 1 usage error, 2 comparison failure, 3 I/O error.");

    std::string mode_s = "analytic";
    std::vector<std::string> scheme_s, receiver_s;
    std::string lambda_s, config_s, out_s, figure_s = "none", pdp_s = "distributional";
    ExperimentPlan plan;

    app.add_option("--mode", mode_s, "analytic | simulate | compare")
                       ->check(CLI::IsMember({"analytic", "simulate", "compare"}));
    app.add_option("--scheme", scheme_s, "4step | 4stepSDT | 2step | 2stepSDT (repeatable; default all)")
        ->delimiter(',');
    app.add_option("--receiver", receiver_s, "advanced | basic (repeatable; default advanced)")
        ->delimiter(',');
    auto* o_lambda = app.add_option("--lambda-dp", lambda_s, "devices per preamble: value or start:stop:step");
    auto* o_slots = app.add_option("--slots", plan.slots, "RACH periods per run (default 10)");
    auto* o_reps = app.add_option("--reps", plan.replications, "simulation replications (default 200)");
    auto* o_seed = app.add_option("--seed", plan.seed, "root seed (default 1)");
    app.add_option("--config", config_s, "JSON parameter file; flags take precedence");
    app.add_option("--out", out_s, "output directory (default ./out)");
    app.add_option("--figure", figure_s, "figure preset")
        ->check(CLI::IsMember({"none", "success_vs_slot", "success_vs_intensity", "energy_vs_slot",
                               "energy_vs_intensity", "throughput_vs_slot", "throughput_vs_intensity"}));
    auto* o_tol_p = app.add_option("--tol-success", plan.tolerances.success_abs,
                                   "compare: absolute tolerance on success probability (0.02)");
    auto* o_tol_e = app.add_option("--tol-energy", plan.tolerances.energy_rel,
                                   "compare: relative tolerance on energy per packet (0.05)");
    auto* o_tol_r = app.add_option("--tol-throughput", plan.tolerances.throughput_rel,
                                   "compare: relative tolerance on throughput (0.05)");
    auto* o_threads = app.add_option("--threads", plan.threads, "worker threads, 0 = all cores (default 1)");
    auto* o_pdp = app.add_option("--pdp-mode", pdp_s, "distributional | waveform")
                      ->check(CLI::IsMember({"distributional", "waveform"}));
    auto* o_raw = app.add_flag("--raw-dump", plan.raw_dump, "write raw per-replication tallies");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested(app.help());
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    plan.mode = *parse_mode(mode_s);
    plan.figure = *parse_figure(figure_s);
    plan.pdp_mode = pdp_s == "waveform" ? PdpMode::Waveform : PdpMode::Distributional;
    if (!out_s.empty())
        plan.output_path = out_s;

    if (!config_s.empty()) {
        std::ifstream probe(config_s);
        if (!probe)
            throw IoError("cannot read config '" + config_s + "': " + std::strerror(errno));
        try {
            plan.params = load_params(config_s);
        } catch (const ParamError& e) {
            throw UsageError(e.what());
        }
    }

    if (plan.mode == Mode::Analytic) {
        for (auto* o : {o_reps, o_seed, o_threads, o_pdp, o_raw})
            if (o->count() > 0)
                throw UsageError(o->get_name() + " has no effect in analytic mode");
    }
    if (plan.mode != Mode::Compare) {
        for (auto* o : {o_tol_p, o_tol_e, o_tol_r})
            if (o->count() > 0)
                throw UsageError(o->get_name() + " requires --mode compare");
    }

    if (!scheme_s.empty()) {
        plan.schemes.clear();
        for (const auto& s : scheme_s) {
            const auto k = parse_scheme(s);
            if (!k)
                throw UsageError("unknown scheme '" + s + "'");
            plan.schemes.push_back(*k);
        }
    }
    if (!receiver_s.empty()) {
        plan.receivers.clear();
        for (const auto& s : receiver_s) {
            const auto k = parse_receiver(s);
            if (!k)
                throw UsageError("unknown receiver '" + s + "'");
            plan.receivers.push_back(*k);
        }
    }

    // Precedence: defaults < config < figure preset < flags.
    plan.lambda_dp_grid = {plan.params.lambda_dp};
    if (plan.figure != Figure::None) {
        if (is_intensity_sweep(plan.figure))
            plan.lambda_dp_grid = parse_lambda_grid("1:10:1");
        else
            plan.lambda_dp_grid = {5.0};
        if (o_slots->count() == 0)
            plan.slots = 10;
    }
    if (o_lambda->count() > 0)
        plan.lambda_dp_grid = parse_lambda_grid(lambda_s);

    sort_unique(plan.schemes);
    sort_unique(plan.receivers);
    sort_unique(plan.lambda_dp_grid);
    validate(plan);
    return plan;
}

bool
ResultTable::all_pass() const
{
    return std::none_of(comparisons.begin(), comparisons.end(),
                        [](const ComparisonRow& c) { return c.status == CheckStatus::Fail; });
}

ResultTable
run_plan(const ExperimentPlan& plan, std::ostream* raw_dump)
{
    validate(plan);
    const bool analytic = plan.mode != Mode::Simulate;
    const bool simulate = plan.mode != Mode::Analytic;
    ResultTable table;

    for (auto scheme : plan.schemes) {
        for (auto rx : plan.receivers) {
            for (double lambda : plan.lambda_dp_grid) {
                SystemParams p = plan.params;
                p.lambda_dp = lambda;

                std::vector<SlotAnalytics> an;
                if (analytic)
                    an = evolve(scheme, rx, p, plan.slots);

                SimResult sim;
                if (simulate) {
                    SimConfig cfg;
                    cfg.replications = plan.replications;
                    cfg.seed = plan.seed;
                    cfg.receiver = rx;
                    cfg.scheme = scheme;
                    cfg.slots = plan.slots;
                    cfg.pdp_mode = plan.pdp_mode;
                    cfg.params = p;
                    cfg.threads = plan.threads;
                    std::ostringstream raw;
                    sim = run(cfg, raw_dump ? &raw : nullptr);
                    if (raw_dump)
                        forward_raw(*raw_dump, raw.str(), scheme, rx, lambda);
                }

                for (int m = 0; m < plan.slots; ++m) {
                    ResultRow base;
                    base.scheme = scheme;
                    base.receiver = rx;
                    base.lambda_dp = lambda;
                    base.slot = m + 1;

                    ResultRow a = base, s = base;
                    if (analytic) {
                        const auto& x = an[static_cast<std::size_t>(m)];
                        a.engine = Engine::Analytic;
                        a.success = x.p_overall;
                        a.energy_per_packet_uj = x.energy_per_packet_uj;
                        a.throughput_bps = x.throughput_bps;
                        a.fallback_rate = x.p_fb;
                        table.rows.push_back(a);
                    }
                    if (simulate) {
                        const auto& x = sim.slots[static_cast<std::size_t>(m)];
                        s.engine = Engine::Simulation;
                        if (x.success) {
                            s.success = x.success->value;
                            s.success_ci95 = x.success->ci95;
                        }
                        if (x.energy_per_packet) {
                            s.energy_per_packet_uj = x.energy_per_packet->value;
                            s.energy_ci95 = x.energy_per_packet->ci95;
                        }
                        if (x.throughput_bps)
                            s.throughput_bps = x.throughput_bps->value;
                        s.fallback_rate = x.fallback_rate;
                        table.rows.push_back(s);
                    }
                    if (analytic && simulate) {
                        const auto& t = plan.tolerances;
                        table.comparisons.push_back(
                            check(a, "success_prob", a.success, s.success, t.success_abs, false));
                        table.comparisons.push_back(check(a, "energy_per_packet_uj", a.energy_per_packet_uj,
                                                          s.energy_per_packet_uj, t.energy_rel, true));
                        table.comparisons.push_back(check(a, "throughput_bps", a.throughput_bps,
                                                          s.throughput_bps, t.throughput_rel, true));
                    }
                }
            }
        }
    }
    return table;
}

void
emit_csv(const ResultTable& table, const std::filesystem::path& path)
{
    std::string out =
        "scheme,receiver,lambda_dp,slot,engine,success_prob,success_ci95,energy_per_packet_uj,"
        "energy_ci95,throughput_bps,fallback_rate\n";
    for (const auto& r : table.rows) {
        out += to_string(r.scheme);
        out += ',';
        out += to_string(r.receiver);
        out += ',' + format_value(r.lambda_dp) + ',' + std::to_string(r.slot) + ',';
        out += to_string(r.engine);
        out += ',' + opt_value(r.success) + ',' + opt_value(r.success_ci95) + ',' +
               opt_value(r.energy_per_packet_uj) + ',' + opt_value(r.energy_ci95) + ',' +
               opt_value(r.throughput_bps) + ',' + opt_value(r.fallback_rate) + '\n';
    }
    write_file(path, out);
}

void
emit_comparison_csv(const ResultTable& table, const std::filesystem::path& path)
{
    std::string out = "scheme,receiver,lambda_dp,slot,metric,analytic,simulation,abs_diff,allowed,status\n";
    for (const auto& c : table.comparisons) {
        out += to_string(c.scheme);
        out += ',';
        out += to_string(c.receiver);
        out += ',' + format_value(c.lambda_dp) + ',' + std::to_string(c.slot) + ',' + c.metric + ',' +
               opt_value(c.analytic) + ',' + opt_value(c.simulation) + ',' + opt_value(c.abs_diff) + ',' +
               (c.status == CheckStatus::Skipped ? std::string() : format_value(c.allowed)) + ',' +
               (c.status == CheckStatus::Pass ? "pass" : c.status == CheckStatus::Fail ? "fail" : "skipped") +
               '\n';
    }
    write_file(path, out);
}

void
emit_figure_csv(const ResultTable& table, Figure figure, const std::filesystem::path& path)
{
    if (figure == Figure::None || table.rows.empty())
        return;
    const bool by_intensity = is_intensity_sweep(figure);
    double first_lambda = table.rows.front().lambda_dp;
    int last_slot = 0;
    for (const auto& r : table.rows) {
        first_lambda = std::min(first_lambda, r.lambda_dp);
        last_slot = std::max(last_slot, r.slot);
    }

    std::string metric;
    auto value = [&](const ResultRow& r) -> std::pair<std::optional<double>, std::optional<double>> {
        switch (figure) {
        case Figure::SuccessVsSlot:
        case Figure::SuccessVsIntensity:
            return {r.success, r.success_ci95};
        case Figure::EnergyVsSlot:
        case Figure::EnergyVsIntensity:
            return {r.energy_per_packet_uj, r.energy_ci95};
        default:
            return {r.throughput_bps, std::nullopt};
        }
    };
    switch (figure) {
    case Figure::SuccessVsSlot:
    case Figure::SuccessVsIntensity:
        metric = "success_prob";
        break;
    case Figure::EnergyVsSlot:
    case Figure::EnergyVsIntensity:
        metric = "energy_per_packet_uj";
        break;
    default:
        metric = "throughput_bps";
    }

    std::string out = std::string("scheme,receiver,") + (by_intensity ? "lambda_dp" : "slot") + ",engine," +
                      metric + ',' + metric + "_ci95\n";
    for (const auto& r : table.rows) {
        if (by_intensity ? r.slot != last_slot : r.lambda_dp != first_lambda)
            continue;
        const auto [v, ci] = value(r);
        out += to_string(r.scheme);
        out += ',';
        out += to_string(r.receiver);
        out += ',' + (by_intensity ? format_value(r.lambda_dp) : std::to_string(r.slot)) + ',';
        out += to_string(r.engine);
        out += ',' + opt_value(v) + ',' + opt_value(ci) + '\n';
    }
    write_file(path, out);
}

int
run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    ExperimentPlan plan;
    try {
        plan = parse_cli(argc, argv);
    } catch (const HelpRequested& h) {
        out << h.what();
        return kExitOk;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\nrun with --help for the flag reference\n";
        return kExitUsage;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << '\n';
        return kExitIo;
    }

    try {
        std::error_code ec;
        std::filesystem::create_directories(plan.output_path, ec);
        if (ec)
            throw IoError("cannot create '" + plan.output_path.string() + "': " + ec.message());

        std::ostringstream raw;
        const ResultTable table = run_plan(plan, plan.raw_dump ? &raw : nullptr);
        emit_csv(table, plan.output_path / "results.csv");
        if (plan.mode == Mode::Compare)
            emit_comparison_csv(table, plan.output_path / "comparison.csv");
        if (plan.figure != Figure::None)
            emit_figure_csv(table, plan.figure,
                            plan.output_path / (std::string(to_string(plan.figure)) + ".csv"));
        if (plan.raw_dump)
            write_file(plan.output_path / "raw.jsonl", raw.str());

        out << "wrote " << table.rows.size() << " rows to " << (plan.output_path / "results.csv").string()
            << '\n';
        if (plan.mode == Mode::Compare) {
            std::size_t failed = 0, skipped = 0;
            for (const auto& c : table.comparisons) {
                if (c.status == CheckStatus::Fail) {
                    if (failed < 20)
                        err << "FAIL " << to_string(c.scheme) << ' ' << to_string(c.receiver)
                            << " lambda_dp=" << format_value(c.lambda_dp) << " slot=" << c.slot << ' '
                            << c.metric << ": analytic " << opt_value(c.analytic) << " simulation "
                            << opt_value(c.simulation) << " |diff| " << opt_value(c.abs_diff) << " > "
                            << format_value(c.allowed) << '\n';
                    ++failed;
                } else if (c.status == CheckStatus::Skipped) {
                    ++skipped;
                }
            }
            out << table.comparisons.size() << " checks, " << failed << " failed, " << skipped
                << " skipped (undefined metric)\n";
            if (failed > 0)
                return kExitComparison;
        }
        return kExitOk;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << '\n';
        return kExitIo;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }
}

} // namespace rach
