#include "heavytail/frequency.hpp"

#include "heavytail/distributions.hpp"
#include "heavytail/error.hpp"
#include "heavytail/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

namespace heavytail {

namespace {

using std::chrono::year_month;
using std::chrono::year_month_day;

int months_between(year_month from, year_month to)
{
    return (static_cast<int>(to.year()) - static_cast<int>(from.year())) * 12 +
           (static_cast<int>(static_cast<unsigned>(to.month())) - static_cast<int>(static_cast<unsigned>(from.month())));
}

double sample_sd(const std::vector<double>& v, double mean)
{
    if (v.size() < 2)
        return 0.0;
    double ss = 0.0;
    for (double x : v)
        ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

struct Series {
    std::vector<double> c;
    std::vector<double> x; // years
};

double objective(const Series& s, double a, double b, double kappa)
{
    double v = 0.0;
    for (std::size_t i = 0; i < s.c.size(); ++i) {
        const double mu = a + b * s.x[i];
        if (!(mu > 0.0))
            return -kInf;
        v += (s.c[i] > 0.0 ? s.c[i] * std::log(mu) : 0.0) - mu;
    }
    if (kappa > 0.0)
        v += kappa * (std::log(a + b * s.x.front()) + std::log(a + b * s.x.back()));
    return v;
}

struct NewtonResult {
    double a;
    double b;
    bool converged;
    int iterations;
};

// Damped Newton ascent on the barrier objective.
NewtonResult newton(const Series& s, double a, double b, double kappa)
{
    const std::array<std::size_t, 2> ends{0, s.c.size() - 1};
    for (int it = 1; it <= 200; ++it) {
        double g0 = 0.0, g1 = 0.0, h00 = 0.0, h01 = 0.0, h11 = 0.0;
        for (std::size_t i = 0; i < s.c.size(); ++i) {
            const double mu = a + b * s.x[i];
            const double x = s.x[i];
            g0 += s.c[i] / mu - 1.0;
            g1 += (s.c[i] / mu - 1.0) * x;
            const double w = s.c[i] / (mu * mu);
            h00 += w;
            h01 += w * x;
            h11 += w * x * x;
        }
        if (kappa > 0.0) {
            for (std::size_t j : ends) {
                const double mu = a + b * s.x[j];
                const double x = s.x[j];
                g0 += kappa / mu;
                g1 += kappa * x / mu;
                const double w = kappa / (mu * mu);
                h00 += w;
                h01 += w * x;
                h11 += w * x * x;
            }
        }
        // Solve (-H) d = g.
        const double det = h00 * h11 - h01 * h01;
        if (!(det > 0.0))
            return {a, b, false, it};
        const double da = (h11 * g0 - h01 * g1) / det;
        const double db = (h00 * g1 - h01 * g0) / det;

        const double f0 = objective(s, a, b, kappa);
        double step = 1.0;
        bool moved = false;
        for (int k = 0; k < 60; ++k, step *= 0.5) {
            const double na = a + step * da;
            const double nb = b + step * db;
            if (objective(s, na, nb, kappa) >= f0) {
                a = na;
                b = nb;
                moved = true;
                break;
            }
        }
        const double size = std::abs(step * da) + std::abs(step * db);
        if (!moved || size < 1e-12 * (1.0 + std::abs(a) + std::abs(b)))
            return {a, b, moved || size == 0.0, it};
    }
    return {a, b, false, 200};
}

} // namespace

std::vector<MonthCount> monthly_counts(const BreachCatalog& catalog, const DateWindow& window)
{
    if (window.last < window.first)
        throw DomainError("window ends before it starts");

    const year_month_day first{window.first};
    const year_month_day last{window.last};
    year_month start{first.year(), first.month()};
    if (first.day() != std::chrono::day{1})
        start += std::chrono::months{1};
    year_month end{last.year(), last.month()};
    const year_month_day end_of_month{end.year() / end.month() / std::chrono::last};
    if (last.day() != end_of_month.day())
        end -= std::chrono::months{1};

    std::vector<MonthCount> out;
    if (months_between(start, end) < 0)
        return out;

    const year_month_day ep{catalog.epoch()};
    const year_month epoch_month{ep.year(), ep.month()};
    for (year_month m = start; months_between(m, end) >= 0; m += std::chrono::months{1}) {
        MonthCount mc;
        mc.year = static_cast<int>(m.year());
        mc.month = static_cast<unsigned>(m.month());
        mc.index = months_between(epoch_month, m);
        out.push_back(mc);
    }
    for (const auto& e : catalog.events()) {
        const year_month_day d{e.date};
        const int k = months_between(start, year_month{d.year(), d.month()});
        if (k >= 0 && k < static_cast<int>(out.size()) && window.contains(e.date))
            ++out[static_cast<std::size_t>(k)].count;
    }
    return out;
}

std::vector<YearCount> annual_counts(const std::vector<MonthCount>& months)
{
    std::map<int, std::pair<int, std::size_t>> by_year; // year -> (months seen, events)
    for (const auto& m : months) {
        auto& slot = by_year[m.year];
        ++slot.first;
        slot.second += m.count;
    }
    std::vector<YearCount> out;
    for (const auto& [year, slot] : by_year)
        if (slot.first == 12)
            out.push_back({year, slot.second});
    return out;
}

RateStats rate_stats(const std::vector<MonthCount>& months)
{
    RateStats r;
    r.n_months = months.size();
    std::vector<double> c;
    for (const auto& m : months) {
        c.push_back(static_cast<double>(m.count));
        r.n_events += m.count;
    }
    if (!c.empty()) {
        r.monthly_mean = static_cast<double>(r.n_events) / static_cast<double>(c.size());
        r.monthly_sd = sample_sd(c, r.monthly_mean);
    }
    std::vector<double> y;
    for (const auto& a : annual_counts(months))
        y.push_back(static_cast<double>(a.count));
    r.n_years = y.size();
    if (!y.empty()) {
        double sum = 0.0;
        for (double v : y)
            sum += v;
        r.annual_mean = sum / static_cast<double>(y.size());
        r.annual_sd = sample_sd(y, r.annual_mean);
        r.annual_var = r.annual_sd * r.annual_sd;
    }
    return r;
}

RateGlm fit_rate_glm(const std::vector<MonthCount>& months)
{
    if (months.size() < 24)
        throw EstimationError("rate GLM needs at least 24 months, got " + std::to_string(months.size()));
    Series s;
    double total = 0.0;
    for (const auto& m : months) {
        s.c.push_back(static_cast<double>(m.count));
        s.x.push_back(m.t());
        total += static_cast<double>(m.count);
    }
    if (total == 0.0)
        throw EstimationError("rate GLM on an all-zero series");

    // Least-squares start, pulled back to a constant line if infeasible.
    const double n = static_cast<double>(s.c.size());
    double mx = 0.0, mc = 0.0;
    for (std::size_t i = 0; i < s.c.size(); ++i) {
        mx += s.x[i] / n;
        mc += s.c[i] / n;
    }
    double sxx = 0.0, sxc = 0.0;
    for (std::size_t i = 0; i < s.c.size(); ++i) {
        sxx += (s.x[i] - mx) * (s.x[i] - mx);
        sxc += (s.x[i] - mx) * (s.c[i] - mc);
    }
    double b = sxx > 0.0 ? sxc / sxx : 0.0;
    double a = mc - b * mx;
    if (std::min(a + b * s.x.front(), a + b * s.x.back()) <= 0.05 * mc) {
        a = mc;
        b = 0.0;
    }

    RateGlm g;
    for (double kappa : {1.0, 1e-2, 1e-4, 1e-6, 1e-8}) {
        const NewtonResult r = newton(s, a, b, kappa);
        a = r.a;
        b = r.b;
        g.iterations += r.iterations;
        if (!r.converged)
            throw EstimationError("rate GLM: Newton iterations did not converge");
    }
    const NewtonResult free = newton(s, a, b, 0.0);
    g.iterations += free.iterations;
    const double free_min = std::min(free.a + free.b * s.x.front(), free.a + free.b * s.x.back());
    if (free.converged && free_min > 1e-6) {
        a = free.a;
        b = free.b;
    } else {
        g.constrained = true;
    }
    g.converged = true;
    g.intercept = a;
    g.slope = b;

    double i00 = 0.0, i01 = 0.0, i11 = 0.0;
    g.loglik = 0.0;
    for (std::size_t i = 0; i < s.c.size(); ++i) {
        const double mu = a + b * s.x[i];
        const double x = s.x[i];
        i00 += 1.0 / mu;
        i01 += x / mu;
        i11 += x * x / mu;
        g.loglik += (s.c[i] > 0.0 ? s.c[i] * std::log(mu) : 0.0) - mu - std::lgamma(s.c[i] + 1.0);
    }
    const double det = i00 * i11 - i01 * i01;
    if (!(det > 0.0))
        throw EstimationError("rate GLM: singular information matrix");
    g.intercept_se = std::sqrt(i11 / det);
    g.slope_se = std::sqrt(i00 / det);
    g.slope_p = two_sided_normal_p(g.slope / g.slope_se);
    return g;
}

RateModel fit_rate(const BreachCatalog& catalog, const DateWindow& window, std::optional<Country> country)
{
    RateModel m;
    m.category = country ? to_string(*country) : "ALL";
    const BreachCatalog sub = country ? filter_country(catalog, *country) : catalog;
    const auto months = monthly_counts(sub, window);
    m.stats = rate_stats(months);
    try {
        m.glm = fit_rate_glm(months);
    } catch (const EstimationError& e) {
        m.glm_error = e.what();
    }
    return m;
}

} // namespace heavytail
