#include "rach/params.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <variant>

#include <json.hpp>

namespace rach {

namespace {

using Member = std::variant<double SystemParams::*, int SystemParams::*>;

struct Field
{
    const char* name;
    Member member;
};

// Order here is the serialization order.
const Field kFields[] = {
    {"rho_dbm", &SystemParams::rho_dbm},
    {"sigma2_dbm", &SystemParams::sigma2_dbm},
    {"gamma_th_db", &SystemParams::gamma_th_db},
    {"lambda_th_dbm", &SystemParams::lambda_th_dbm},
    {"n_zc", &SystemParams::n_zc},
    {"bler", &SystemParams::bler},
    {"harq_max", &SystemParams::harq_max},
    {"mu_new", &SystemParams::mu_new},
    {"lambda_dp", &SystemParams::lambda_dp},
    {"xi", &SystemParams::xi},
    {"packet_size_bits", &SystemParams::packet_size_bits},
    {"t_rach_us", &SystemParams::t_rach_us},
    {"t_p_us", &SystemParams::t_p_us},
    {"t_s_us", &SystemParams::t_s_us},
    {"t_d_us", &SystemParams::t_d_us},
    {"n_rar", &SystemParams::n_rar},
    {"n_crt", &SystemParams::n_crt},
    {"n_dci", &SystemParams::n_dci},
    {"t_k2_us", &SystemParams::t_k2_us},
    {"t_delta_us", &SystemParams::t_delta_us},
    {"t_pucch_us", &SystemParams::t_pucch_us},
    {"p_s_mw", &SystemParams::p_s_mw},
    {"p_r_mw", &SystemParams::p_r_mw},
    {"p_t_mw", &SystemParams::p_t_mw},
    {"alpha", &SystemParams::alpha},
    {"cell_area_km2", &SystemParams::cell_area_km2},
};

std::string join(const std::vector<ParamViolation>& v)
{
    std::string out = "invalid parameters:";
    for (const auto& x : v) {
        out += "\n  ";
        out += x.to_string();
    }
    return out;
}

} // namespace

std::string ParamViolation::to_string() const
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", value);
    return field + ": requires " + constraint + ", got " + buf;
}

ParamError::ParamError(std::string what, std::vector<ParamViolation> violations)
    : std::invalid_argument(std::move(what)),
      violations_(std::move(violations))
{
}

double dbm_to_mw(double dbm)
{
    if (!std::isfinite(dbm)) {
        throw ParamError("dbm_to_mw: non-finite input");
    }
    return std::pow(10.0, dbm / 10.0);
}

double mw_to_dbm(double mw)
{
    if (!std::isfinite(mw) || mw <= 0.0) {
        throw ParamError("mw_to_dbm: input must be finite and positive");
    }
    return 10.0 * std::log10(mw);
}

double db_to_linear(double db)
{
    return dbm_to_mw(db);
}

SystemParams default_params()
{
    return SystemParams{};
}

std::vector<ParamViolation> check(const SystemParams& p)
{
    std::vector<ParamViolation> out;
    auto require = [&](bool ok, const char* field, const char* constraint, double value) {
        if (!ok) {
            out.push_back({field, constraint, value});
        }
    };

    // dB/dBm fields may be any finite value.
    require(std::isfinite(p.rho_dbm), "rho_dbm", "finite", p.rho_dbm);
    require(std::isfinite(p.sigma2_dbm), "sigma2_dbm", "finite", p.sigma2_dbm);
    require(std::isfinite(p.gamma_th_db), "gamma_th_db", "finite", p.gamma_th_db);
    require(std::isfinite(p.lambda_th_dbm), "lambda_th_dbm", "finite", p.lambda_th_dbm);
    require(p.n_zc >= 2, "n_zc", "n_zc >= 2", p.n_zc);
    require(p.bler >= 0.0 && p.bler <= 1.0, "bler", "bler ∈ [0,1]", p.bler);
    require(p.harq_max >= 1, "harq_max", "harq_max >= 1", p.harq_max);
    require(p.mu_new > 0.0 && std::isfinite(p.mu_new), "mu_new", "mu_new > 0", p.mu_new);
    require(p.lambda_dp > 0.0 && std::isfinite(p.lambda_dp), "lambda_dp", "lambda_dp > 0", p.lambda_dp);
    require(p.xi >= 1, "xi", "xi >= 1", p.xi);
    require(p.packet_size_bits > 0.0, "packet_size_bits", "packet_size_bits > 0", p.packet_size_bits);
    require(p.t_rach_us > 0.0, "t_rach_us", "t_rach_us > 0", p.t_rach_us);
    require(p.t_p_us > 0.0, "t_p_us", "t_p_us > 0", p.t_p_us);
    require(p.t_s_us > 0.0, "t_s_us", "t_s_us > 0", p.t_s_us);
    require(p.t_d_us > 0.0, "t_d_us", "t_d_us > 0", p.t_d_us);
    require(p.t_p_us <= p.t_s_us, "t_p_us", "t_p ≤ t_s", p.t_p_us);
    require(p.t_d_us <= p.t_s_us, "t_d_us", "t_d ≤ t_s", p.t_d_us);
    require(p.n_rar > 0, "n_rar", "n_rar > 0", p.n_rar);
    require(p.n_crt > 0, "n_crt", "n_crt > 0", p.n_crt);
    require(p.n_dci > 0, "n_dci", "n_dci > 0", p.n_dci);
    require(p.t_k2_us > 0.0, "t_k2_us", "t_k2_us > 0", p.t_k2_us);
    require(p.t_delta_us > 0.0, "t_delta_us", "t_delta_us > 0", p.t_delta_us);
    require(p.t_pucch_us > 0.0, "t_pucch_us", "t_pucch_us > 0", p.t_pucch_us);
    require(p.p_s_mw > 0.0, "p_s_mw", "p_s_mw > 0", p.p_s_mw);
    require(p.p_r_mw > 0.0, "p_r_mw", "p_r_mw > 0", p.p_r_mw);
    require(p.p_t_mw > 0.0, "p_t_mw", "p_t_mw > 0", p.p_t_mw);
    require(p.alpha > 2.0, "alpha", "alpha > 2", p.alpha);
    require(p.cell_area_km2 > 0.0, "cell_area_km2", "cell_area_km2 > 0", p.cell_area_km2);
    return out;
}

SystemParams validate(const SystemParams& p)
{
    auto v = check(p);
    if (!v.empty()) {
        std::string what = join(v);
        throw ParamError(std::move(what), std::move(v));
    }
    return p;
}

SystemParams params_from_json(std::string_view text, const SystemParams& base)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParamError(std::string("config parse error: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ParamError("config must be a flat JSON object");
    }

    SystemParams p = base;
    for (const auto& [key, value] : doc.items()) {
        const Field* field = nullptr;
        for (const auto& f : kFields) {
            if (key == f.name) {
                field = &f;
                break;
            }
        }
        if (field == nullptr) {
            throw ParamError("unknown config key '" + key + "'");
        }
        if (!value.is_number()) {
            throw ParamError("config key '" + key + "' must be a number");
        }
        std::visit(
            [&](auto ptr) {
                using T = std::remove_reference_t<decltype(p.*ptr)>;
                if constexpr (std::is_same_v<T, int>) {
                    if (!value.is_number_integer()) {
                        throw ParamError("config key '" + key + "' must be an integer");
                    }
                    p.*ptr = value.get<int>();
                } else {
                    p.*ptr = value.get<double>();
                }
            },
            field->member);
    }
    return validate(p);
}

SystemParams load_params(const std::string& path, const SystemParams& base)
{
    std::ifstream in(path);
    if (!in) {
        throw ParamError("cannot open config file '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return params_from_json(ss.str(), base);
}

std::string params_to_json(const SystemParams& p)
{
    nlohmann::ordered_json doc;
    for (const auto& f : kFields) {
        std::visit([&](auto ptr) { doc[f.name] = p.*ptr; }, f.member);
    }
    return doc.dump(2);
}

LinkBudget LinkBudget::from(const SystemParams& p)
{
    return LinkBudget{
        dbm_to_mw(p.rho_dbm),
        dbm_to_mw(p.sigma2_dbm),
        db_to_linear(p.gamma_th_db),
        dbm_to_mw(p.lambda_th_dbm),
        p.n_zc,
    };
}

double LinkBudget::pdp_peak_mean_mw() const
{
    const double n = static_cast<double>(n_zc);
    return rho_mw * n * n + noise_mw * n;
}

} // namespace rach
