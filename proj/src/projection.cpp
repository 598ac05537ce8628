#include "heavytail/projection.hpp"

#include "heavytail/distributions.hpp"
#include "heavytail/error.hpp"

#include <cmath>

namespace heavytail {

std::vector<CumsumPoint> expected_cumsum_curve(const SeverityModel& severity, std::size_t n_events,
                                               double rate_mean)
{
    if (!(rate_mean > 0.0))
        throw DomainError("event rate must be positive");
    std::vector<CumsumPoint> out;
    out.reserve(n_events);
    double mean = 0.0;
    double var = 0.0;
    for (std::size_t n = 1; n <= n_events; ++n) {
        const double t = static_cast<double>(n) / rate_mean;
        const DtpParams p = severity.sizes_at(t);
        if (!(p.alpha > 0.0))
            throw DomainError("shape alpha(t) is not positive at t = " + std::to_string(t));
        const DtpMoments m = dtp_moments(p);
        mean += m.mean;
        var += m.variance();
        out.push_back({n, t, mean, std::sqrt(var)});
    }
    return out;
}

double clt_crossover(double u, double nu, double alpha)
{
    if (!(u > 0.0) || nu < u || !(alpha > 0.0))
        throw DomainError("crossover needs 0 < u <= nu and alpha > 0");
    return std::pow(nu / u, alpha);
}

double superlinear_reference(double u, double alpha, double n)
{
    if (!(alpha > 0.0))
        throw DomainError("alpha must be positive");
    return u * std::pow(n, 1.0 / alpha);
}

Forecast forecast(const SeverityModel& severity, double rate_mean, double rate_var, const Anchor& anchor,
                  int last_year, Date epoch, double within_year)
{
    if (rate_mean < 0.0 || rate_var < 0.0)
        throw DomainError("rate mean and variance must be non-negative");
    if (last_year <= anchor.year)
        throw DomainError("forecast needs years after the anchor year " + std::to_string(anchor.year));

    Forecast f;
    f.model = to_string(severity.model);
    f.rate_mean = rate_mean;
    f.rate_var = rate_var;
    f.anchor = anchor;
    f.within_year = within_year;

    double cum = anchor.cumulative;
    double cum_var = 0.0;
    for (int year = anchor.year + 1; year <= last_year; ++year) {
        const Date jan1 = make_date(year, 1, 1);
        if (jan1 < epoch)
            throw DomainError("forecast year " + std::to_string(year) + " precedes the epoch");
        ForecastRow r;
        r.year = year;
        r.t = static_cast<double>((jan1 - epoch).count()) / kDaysPerYear + within_year;
        const DtpParams p = severity.sizes_at(r.t);
        if (!(p.alpha > 0.0))
            throw DomainError("shape alpha(t) is not positive in " + std::to_string(year));
        const DtpMoments m = dtp_moments(p);
        r.severity_mean = m.mean;
        r.severity_sd = m.sd();
        r.annual_mean = m.mean * rate_mean;
        const double var = rate_mean * m.variance() + m.mean * m.mean * rate_var;
        r.annual_sd = std::sqrt(var);
        cum += r.annual_mean;
        cum_var += var;
        r.cumulative_mean = cum;
        r.cumulative_sd = std::sqrt(cum_var);
        f.rows.push_back(r);
    }
    return f;
}

} // namespace heavytail
