#ifndef RACH_EXPERIMENT_H
#define RACH_EXPERIMENT_H

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rach/params.h"
#include "rach/scheme.h"
#include "rach/sim.h"

namespace rach {

enum class Mode { Analytic, Simulate, Compare };

enum class Figure {
    None,
    SuccessVsSlot,
    SuccessVsIntensity,
    EnergyVsSlot,
    EnergyVsIntensity,
    ThroughputVsSlot,
    ThroughputVsIntensity,
};

enum class Engine { Analytic, Simulation };

std::string_view to_string(Mode m);
std::string_view to_string(Figure f);
std::string_view to_string(Engine e);
std::optional<Mode> parse_mode(std::string_view s);
std::optional<Figure> parse_figure(std::string_view s);

/// Exit statuses of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitComparison = 2, kExitIo = 3 };

class UsageError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Thrown by parse_cli for --help; carries the reference text.
class HelpRequested : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct Tolerances
{
    double success_abs = 0.02;
    double energy_rel = 0.05;
    double throughput_rel = 0.05;
};

struct ExperimentPlan
{
    Mode mode = Mode::Analytic;
    std::vector<SchemeKind> schemes{kAllSchemes.begin(), kAllSchemes.end()};
    std::vector<ReceiverModel> receivers{ReceiverModel::Advanced};
    std::vector<double> lambda_dp_grid{5.0};
    int slots = 10;
    int replications = 200;
    std::uint64_t seed = 1;
    std::filesystem::path output_path = "out";
    Figure figure = Figure::None;
    SystemParams params;
    Tolerances tolerances;
    int threads = 1;
    PdpMode pdp_mode = PdpMode::Distributional;
    bool raw_dump = false;
};

/// Throws UsageError on an empty grid, scheme or receiver list, or a bad count.
void validate(const ExperimentPlan& plan);

/// "5" or "start:stop:step" (inclusive of stop within rounding).
std::vector<double> parse_lambda_grid(std::string_view text);

/// Throws UsageError, IoError (unreadable config) or HelpRequested.
ExperimentPlan parse_cli(int argc, const char* const* argv);

struct ResultRow
{
    SchemeKind scheme = SchemeKind::FourStep;
    ReceiverModel receiver = ReceiverModel::Advanced;
    double lambda_dp = 0.0;
    int slot = 0;
    Engine engine = Engine::Analytic;
    std::optional<double> success;
    std::optional<double> success_ci95;
    std::optional<double> energy_per_packet_uj;
    std::optional<double> energy_ci95;
    std::optional<double> throughput_bps;
    std::optional<double> fallback_rate;
};

enum class CheckStatus { Pass, Fail, Skipped };

struct ComparisonRow
{
    SchemeKind scheme = SchemeKind::FourStep;
    ReceiverModel receiver = ReceiverModel::Advanced;
    double lambda_dp = 0.0;
    int slot = 0;
    std::string metric;
    std::optional<double> analytic;
    std::optional<double> simulation;
    std::optional<double> abs_diff;
    double allowed = 0.0;  ///< absolute allowance after applying relative tolerances
    CheckStatus status = CheckStatus::Skipped;
};

struct ResultTable
{
    std::vector<ResultRow> rows;
    std::vector<ComparisonRow> comparisons;

    bool all_pass() const;
};

/// Rows ordered by (scheme, receiver, lambda_dp, slot, engine).
ResultTable run_plan(const ExperimentPlan& plan, std::ostream* raw_dump = nullptr);

/// Throws IoError naming the path and cause.
void emit_csv(const ResultTable& table, const std::filesystem::path& path);
void emit_comparison_csv(const ResultTable& table, const std::filesystem::path& path);
/// Two-axis extract for one figure: slot sweeps keep the first intensity,
/// intensity sweeps keep the last slot.
void emit_figure_csv(const ResultTable& table, Figure figure, const std::filesystem::path& path);

std::string format_value(double v);

/// Whole tool: parse, run, write outputs; returns an ExitCode.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace rach

#endif
