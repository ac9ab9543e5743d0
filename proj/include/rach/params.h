#ifndef RACH_PARAMS_H
#define RACH_PARAMS_H

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rach {

/// Radio, traffic, timing and power constants shared by the analytic model
/// and the simulator. Values are stored in the units named by each suffix;
/// everything downstream converts to linear units (mW, us) once.
struct SystemParams
{
    double rho_dbm = -90.0;          ///< power-control received-power target
    double sigma2_dbm = -100.4;      ///< noise power
    double gamma_th_db = -10.0;      ///< PUSCH SINR threshold
    double lambda_th_dbm = -51.5;    ///< PDP peak detection threshold
    int n_zc = 839;                  ///< Zadoff-Chu sequence length
    double bler = 0.1;               ///< block error rate per data transmission
    int harq_max = 1;                ///< maximum data HARQ transmissions
    double mu_new = 0.1;             ///< new packets per device per RACH period
    double lambda_dp = 5.0;          ///< mean devices per preamble
    int xi = 64;                     ///< non-dedicated preambles
    double packet_size_bits = 800.0;
    double t_rach_us = 31500.0;
    double t_p_us = 142.4;
    double t_s_us = 500.0;
    double t_d_us = 107.14;
    int n_rar = 40;
    int n_crt = 48;
    int n_dci = 2;
    double t_k2_us = 500.0;
    double t_delta_us = 1500.0;
    double t_pucch_us = 964.29;
    double p_s_mw = 0.015;
    double p_r_mw = 80.0;
    double p_t_mw = 500.0;
    double alpha = 4.0;              ///< path-loss exponent; no numerical effect under full inversion
    double cell_area_km2 = 0.1;

    bool operator==(const SystemParams&) const = default;
};

/// One violated constraint: which field, which rule, and the value seen.
struct ParamViolation
{
    std::string field;
    std::string constraint;
    double value;

    std::string to_string() const;
};

class ParamError : public std::invalid_argument
{
public:
    explicit ParamError(const std::string& what)
        : std::invalid_argument(what)
    {
    }
    ParamError(std::string what, std::vector<ParamViolation> violations);

    const std::vector<ParamViolation>& violations() const { return violations_; }

private:
    std::vector<ParamViolation> violations_;
};

double dbm_to_mw(double dbm);
double mw_to_dbm(double mw);
double db_to_linear(double db);

SystemParams default_params();

/// Every invariant violated by p, in field order. Empty means valid.
std::vector<ParamViolation> check(const SystemParams& p);

/// Returns p unchanged, or throws ParamError carrying the full violation list.
SystemParams validate(const SystemParams& p);

/// Flat JSON object keyed by field name. Keys absent from the document keep
/// their value from `base`; unknown keys are rejected.
SystemParams params_from_json(std::string_view text, const SystemParams& base = default_params());
SystemParams load_params(const std::string& path, const SystemParams& base = default_params());
std::string params_to_json(const SystemParams& p);

/// Linear-unit view of the link-level constants used by both engines.
struct LinkBudget
{
    double rho_mw;
    double noise_mw;
    double sinr_threshold;          ///< linear
    double detection_threshold_mw;
    int n_zc;

    static LinkBudget from(const SystemParams& p);

    /// Mean of the exponential PDP peak: rho*N^2 + sigma^2*N.
    double pdp_peak_mean_mw() const;
};

} // namespace rach

#endif
