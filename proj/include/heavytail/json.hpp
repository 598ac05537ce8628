#pragma once

// nlohmann::json conversions for result types. Non-finite numbers are
// written as null.

#include "heavytail/catalog.hpp"
#include "heavytail/evt.hpp"
#include "heavytail/firmsize.hpp"
#include "heavytail/frequency.hpp"
#include "heavytail/projection.hpp"
#include "heavytail/severity.hpp"
#include "heavytail/stats.hpp"

#include <json.hpp>

#include <cmath>
#include <optional>

namespace heavytail {

inline nlohmann::json num(double v)
{
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

inline nlohmann::json num(const std::optional<double>& v)
{
    return v ? num(*v) : nlohmann::json(nullptr);
}

inline void to_json(nlohmann::json& j, const CategorySummary& s)
{
    j = {{"n_total", s.n_total},
         {"n_unknown", s.n_unknown},
         {"n_known", s.n_known()},
         {"n_above_threshold", s.n_above_threshold},
         {"total_breach", s.total_breach},
         {"total_above_threshold", s.total_above_threshold},
         {"unknown_fraction", num(s.unknown_fraction())}};
}

inline void to_json(nlohmann::json& j, const CatalogSummary& s)
{
    j = {{"threshold", s.threshold}, {"US", s.us}, {"NON_US", s.non_us}, {"ALL", s.all}};
}

inline void to_json(nlohmann::json& j, const GpdFit& f)
{
    j = {{"model", to_string(f.model)},
         {"u", f.u},
         {"n_exceed", f.n_exceed},
         {"xi", f.xi},
         {"xi_se", f.xi_se},
         {"beta0", f.beta0},
         {"beta0_se", f.beta0_se},
         {"beta1", f.has_slope() ? num(f.beta1) : nlohmann::json(nullptr)},
         {"beta1_se", f.has_slope() ? num(f.beta1_se) : nlohmann::json(nullptr)},
         {"beta1_p", num(f.beta1_p)},
         {"loglik", f.loglik},
         {"converged", f.converged},
         {"boot_ok", f.boot_ok},
         {"boot_failed", f.boot_failed},
         {"time_shift_years", kLogTimeShift},
         {"seed", f.seed}};
}

inline void to_json(nlohmann::json& j, const StabilityScan& s)
{
    j = nlohmann::json::object();
    auto entries = nlohmann::json::array();
    for (const auto& e : s.entries) {
        nlohmann::json row = {{"u", e.u}, {"n_exceed", e.n_exceed}};
        if (e.fit) {
            row["fit"] = *e.fit;
            row["endpoint"] = num(e.endpoint);
        } else {
            row["error"] = e.error;
        }
        entries.push_back(std::move(row));
    }
    j["entries"] = std::move(entries);
    j["recommended_u"] = num(s.recommended_u);
}

inline void to_json(nlohmann::json& j, const DtpFit& f)
{
    j = {{"model", to_string(f.model)},
         {"u", f.u},
         {"n", f.n},
         {"alpha0", f.alpha0},
         {"alpha0_se", f.alpha0_se},
         {"alpha1", f.has_slope() ? num(f.alpha1) : nlohmann::json(nullptr)},
         {"alpha1_se", f.has_slope() ? num(f.alpha1_se) : nlohmann::json(nullptr)},
         {"alpha1_p", num(f.alpha1_p)},
         {"nu0", num(f.nu0)},
         {"nu0_se", num(f.nu0_se)},
         {"nu1", f.model == DteModel::D2 ? num(f.nu1) : nlohmann::json(nullptr)},
         {"loglik", f.loglik},
         {"converged", f.converged},
         {"constrained", f.constrained},
         {"t_first", f.t_first},
         {"t_last", f.t_last},
         {"boot_ok", f.boot_ok},
         {"boot_failed", f.boot_failed},
         {"time_shift_years", kLogTimeShift},
         {"seed", f.seed}};
}

inline void to_json(nlohmann::json& j, const LrtResult& r)
{
    j = {{"statistic", r.statistic}, {"df", r.df}, {"p_value", r.p_value}};
}

inline void to_json(nlohmann::json& j, const KsResult& r)
{
    j = {{"statistic", r.statistic}, {"p_value", r.p_value}, {"n", r.n}};
}

inline void to_json(nlohmann::json& j, const TailScanEntry& e)
{
    j = {{"u", e.u}, {"n", e.n}};
    if (e.error.empty()) {
        j["alpha"] = e.alpha;
        j["se"] = num(e.se);
        j["nu"] = e.nu;
    } else {
        j["error"] = e.error;
    }
}

inline void to_json(nlohmann::json& j, const RateModel& m)
{
    j = {{"category", m.category},
         {"n", m.stats.n_events},
         {"n_months", m.stats.n_months},
         {"monthly_mean", m.stats.monthly_mean},
         {"monthly_sd", m.stats.monthly_sd},
         {"n_years", m.stats.n_years},
         {"annual_mean", m.stats.annual_mean},
         {"annual_sd", m.stats.annual_sd}};
    if (m.glm) {
        j["glm"] = {{"intercept", m.glm->intercept},
                    {"intercept_se", m.glm->intercept_se},
                    {"slope", m.glm->slope},
                    {"slope_se", m.glm->slope_se},
                    {"slope_p", m.glm->slope_p},
                    {"loglik", m.glm->loglik},
                    {"constrained", m.glm->constrained}};
    } else {
        j["glm"] = nullptr;
        j["glm_error"] = m.glm_error;
    }
}

inline void to_json(nlohmann::json& j, const Forecast& f)
{
    auto rows = nlohmann::json::array();
    for (const auto& r : f.rows) {
        rows.push_back({{"year", r.year},
                        {"t", r.t},
                        {"severity_mean", r.severity_mean},
                        {"severity_sd", r.severity_sd},
                        {"annual_mean", r.annual_mean},
                        {"annual_sd", r.annual_sd},
                        {"cumulative_mean", r.cumulative_mean},
                        {"cumulative_sd", r.cumulative_sd}});
    }
    j = {{"model", f.model},
         {"rate_mean", f.rate_mean},
         {"rate_var", f.rate_var},
         {"anchor", {{"year", f.anchor.year}, {"cumulative", f.anchor.cumulative}}},
         {"within_year", f.within_year},
         {"rows", std::move(rows)}};
}

inline void to_json(nlohmann::json& j, const LognormFit& f)
{
    j = {{"mu", f.params.mu},
         {"mu_se", f.mu_se},
         {"sigma", f.params.sigma},
         {"sigma_se", f.sigma_se},
         {"lower", f.params.lower},
         {"upper", num(f.params.upper)},
         {"n", f.n},
         {"loglik", f.loglik},
         {"converged", f.converged}};
}

inline void to_json(nlohmann::json& j, const QuantileFit& f)
{
    j = {{"tau", f.tau},
         {"n", f.n},
         {"intercept", f.intercept},
         {"intercept_se", f.intercept_se},
         {"slope", f.slope},
         {"slope_se", f.slope_se},
         {"slope_p", f.slope_p},
         {"knot", num(f.knot)},
         {"slope_above", f.knot ? num(f.slope_above) : nlohmann::json(nullptr)},
         {"slope_above_se", f.knot ? num(f.slope_above_se) : nlohmann::json(nullptr)},
         {"slope_above_p", f.knot ? num(f.slope_above_p) : nlohmann::json(nullptr)},
         {"loss", f.loss}};
}

inline void to_json(nlohmann::json& j, const ScalingExponent& s)
{
    j = {{"exponent", s.exponent}, {"se", s.se}, {"n_points", s.n_points}};
}

inline void to_json(nlohmann::json& j, const SectorSummary& s)
{
    auto rows = nlohmann::json::array();
    for (const auto& e : s.entries)
        rows.push_back(
            {{"sector", e.sector}, {"n", e.n}, {"median_size", e.median_size}, {"frequency_10y", e.frequency_10y}});
    j = {{"sectors", std::move(rows)}, {"notes", s.notes}};
}

} // namespace heavytail
