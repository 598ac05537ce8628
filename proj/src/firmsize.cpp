#include "heavytail/firmsize.hpp"

#include "heavytail/error.hpp"
#include "heavytail/montecarlo.hpp"
#include "heavytail/optimize.hpp"

#include "csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <numeric>

namespace heavytail {

namespace {

constexpr std::size_t kMinLognormSample = 30;
constexpr std::size_t kMinQuantileSample = 20;

// ---------------------------------------------------------------------------
// Truncated lognormal likelihood on z = ln x.

double log_mass(double mu, double sigma, double lower, double upper)
{
    const double a = lower > 0.0 ? (std::log(lower) - mu) / sigma : -kInf;
    const double b = std::isfinite(upper) ? (std::log(upper) - mu) / sigma : kInf;
    const double m = a > 0.0 ? normal_cdf(-a) - normal_cdf(-b) : normal_cdf(b) - normal_cdf(a);
    return m > 0.0 ? std::log(m) : -kInf;
}

double lognorm_loglik(std::span<const double> z, double mu, double sigma, double lower, double upper)
{
    const double lm = log_mass(mu, sigma, lower, upper);
    if (!std::isfinite(lm))
        return -kInf;
    const double c = std::log(std::sqrt(2.0 * std::numbers::pi) * sigma) + lm;
    double ll = 0.0;
    for (double v : z) {
        const double w = (v - mu) / sigma;
        ll -= 0.5 * w * w + c;
    }
    return ll;
}

struct LognormPoint {
    double mu;
    double sigma;
    double loglik;
    bool converged;
};

LognormPoint fit_lognorm_point(std::span<const double> z, double lower, double upper)
{
    const double n = static_cast<double>(z.size());
    const double m = std::accumulate(z.begin(), z.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : z)
        ss += (v - m) * (v - m);
    const double s = std::sqrt(ss / n);
    if (!(s > 0.0))
        throw EstimationError("lognormal fit on a degenerate sample (all values equal)");

    const Objective f = [&](std::span<const double> th) {
        const double ll = lognorm_loglik(z, th[0], std::exp(th[1]), lower, upper);
        return std::isfinite(ll) ? -ll : kInf;
    };
    SimplexOptions opt;
    opt.restarts = 2;
    const std::vector<double> steps{0.1 * s, 0.1};
    const OptimResult r = minimize(f, {m, std::log(s)}, steps, opt);
    if (!std::isfinite(r.value))
        throw EstimationError("lognormal fit: no finite likelihood");
    return {r.x[0], std::exp(r.x[1]), -r.value, r.converged};
}

// ---------------------------------------------------------------------------
// Small dense linear algebra for the quantile regression design (p <= 3).

using Row = std::vector<double>;

bool solve(std::vector<Row> a, Row b, Row& x)
{
    const std::size_t p = b.size();
    for (std::size_t k = 0; k < p; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < p; ++i)
            if (std::abs(a[i][k]) > std::abs(a[piv][k]))
                piv = i;
        double scale = 0.0;
        for (std::size_t j = 0; j < p; ++j)
            scale = std::max(scale, std::abs(a[piv][j]));
        if (!(std::abs(a[piv][k]) > 1e-12 * std::max(scale, 1e-300)))
            return false;
        std::swap(a[k], a[piv]);
        std::swap(b[k], b[piv]);
        for (std::size_t i = k + 1; i < p; ++i) {
            const double f = a[i][k] / a[k][k];
            for (std::size_t j = k; j < p; ++j)
                a[i][j] -= f * a[k][j];
            b[i] -= f * b[k];
        }
    }
    x.assign(p, 0.0);
    for (std::size_t k = p; k-- > 0;) {
        double s = b[k];
        for (std::size_t j = k + 1; j < p; ++j)
            s -= a[k][j] * x[j];
        x[k] = s / a[k][k];
    }
    return true;
}

struct Design {
    std::vector<Row> z; // rows [1, x, (x - knot)+]
    std::vector<double> y;
    double tau = 0.5;
    std::size_t p = 2;
};

Design make_design(std::span<const double> x, std::span<const double> y, double tau, std::optional<double> knot)
{
    Design d;
    d.tau = tau;
    d.p = knot ? 3 : 2;
    d.y.assign(y.begin(), y.end());
    for (double v : x) {
        Row r{1.0, v};
        if (knot)
            r.push_back(std::max(0.0, v - *knot));
        d.z.push_back(std::move(r));
    }
    return d;
}

double dot(const Row& a, const Row& b)
{
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j)
        s += a[j] * b[j];
    return s;
}

double rho(double r, double tau)
{
    return r >= 0.0 ? tau * r : (tau - 1.0) * r;
}

double loss_of(const Design& d, const Row& beta)
{
    double s = 0.0;
    for (std::size_t i = 0; i < d.y.size(); ++i)
        s += rho(d.y[i] - dot(d.z[i], beta), d.tau);
    return s;
}

// Weighted least squares; false when the normal equations are singular.
bool wls(const Design& d, const std::vector<double>& w, Row& beta)
{
    std::vector<Row> a(d.p, Row(d.p, 0.0));
    Row b(d.p, 0.0);
    for (std::size_t i = 0; i < d.y.size(); ++i) {
        for (std::size_t j = 0; j < d.p; ++j) {
            b[j] += w[i] * d.z[i][j] * d.y[i];
            for (std::size_t k = 0; k < d.p; ++k)
                a[j][k] += w[i] * d.z[i][j] * d.z[i][k];
        }
    }
    return solve(std::move(a), std::move(b), beta);
}

// IRLS on the check loss with weights c_i / max(|r_i|, eps), eps annealed.
Row irls(const Design& d, Row beta, double scale)
{
    const std::size_t n = d.y.size();
    std::vector<double> w(n);
    for (double eps : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
        const double e = eps * scale;
        for (int it = 0; it < 50; ++it) {
            for (std::size_t i = 0; i < n; ++i) {
                const double r = d.y[i] - dot(d.z[i], beta);
                w[i] = (r >= 0.0 ? d.tau : 1.0 - d.tau) / std::max(std::abs(r), e);
            }
            Row next;
            if (!wls(d, w, next))
                return beta;
            double change = 0.0;
            for (std::size_t j = 0; j < d.p; ++j)
                change = std::max(change, std::abs(next[j] - beta[j]));
            beta = std::move(next);
            if (change < 1e-10 * (1.0 + scale))
                break;
        }
    }
    return beta;
}

struct Basis {
    std::vector<std::size_t> idx;
    Row beta;
};

bool basis_solution(const Design& d, const std::vector<std::size_t>& idx, Row& beta)
{
    std::vector<Row> a;
    Row b;
    for (std::size_t i : idx) {
        a.push_back(d.z[i]);
        b.push_back(d.y[i]);
    }
    return solve(std::move(a), std::move(b), beta);
}

// Interpolate the p points closest to the line that give a regular system.
std::optional<Basis> snap(const Design& d, const Row& beta)
{
    const std::size_t n = d.y.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> absr(n);
    for (std::size_t i = 0; i < n; ++i)
        absr[i] = std::abs(d.y[i] - dot(d.z[i], beta));
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return absr[a] < absr[b]; });

    // Rows are accepted while they add a direction: Gram-Schmidt residual
    // against the accepted rows, relative to the row's own length.
    Basis bs;
    std::vector<Row> ortho;
    for (std::size_t i : order) {
        Row v = d.z[i];
        const double len = std::sqrt(dot(v, v));
        for (const Row& q : ortho) {
            const double c = dot(v, q);
            for (std::size_t j = 0; j < v.size(); ++j)
                v[j] -= c * q[j];
        }
        const double rest = std::sqrt(dot(v, v));
        if (!(rest > 1e-9 * len))
            continue;
        for (double& e : v)
            e /= rest;
        ortho.push_back(std::move(v));
        bs.idx.push_back(i);
        if (bs.idx.size() == d.p)
            break;
    }
    if (bs.idx.size() != d.p || !basis_solution(d, bs.idx, bs.beta))
        return std::nullopt;
    return bs;
}

// Simplex edge moves: release one basis point, move along the edge to the
// weighted-quantile breakpoint, repeat until no edge lowers the loss.
Basis polish(const Design& d, Basis bs)
{
    const std::size_t n = d.y.size();
    double current = loss_of(d, bs.beta);
    for (int iter = 0; iter < 1000; ++iter) {
        bool improved = false;
        for (std::size_t j = 0; j < d.p && !improved; ++j) {
            std::vector<Row> zb;
            for (std::size_t i : bs.idx)
                zb.push_back(d.z[i]);
            Row e(d.p, 0.0);
            e[j] = 1.0;
            Row dir;
            if (!solve(zb, e, dir))
                continue;

            struct Break {
                double s;
                double w;
                std::size_t i;
            };
            std::vector<Break> br;
            double target = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double g = dot(d.z[i], dir);
                if (std::abs(g) < 1e-14)
                    continue;
                const double r = d.y[i] - dot(d.z[i], bs.beta);
                const double tau_i = g > 0.0 ? d.tau : 1.0 - d.tau;
                br.push_back({r / g, std::abs(g), i});
                target += tau_i * std::abs(g);
            }
            if (br.empty())
                continue;
            std::sort(br.begin(), br.end(), [](const Break& a, const Break& b) { return a.s < b.s; });
            double cum = 0.0;
            std::size_t k = 0;
            for (; k < br.size(); ++k) {
                cum += br[k].w;
                if (cum >= target)
                    break;
            }
            k = std::min(k, br.size() - 1);
            if (br[k].i == bs.idx[j] || br[k].s == 0.0)
                continue;
            Row next = bs.beta;
            for (std::size_t c = 0; c < d.p; ++c)
                next[c] += br[k].s * dir[c];
            const double l = loss_of(d, next);
            if (l < current - 1e-12 * (1.0 + current)) {
                std::vector<std::size_t> idx = bs.idx;
                idx[j] = br[k].i;
                Row exact;
                if (!basis_solution(d, idx, exact))
                    continue;
                bs.idx = std::move(idx);
                bs.beta = std::move(exact);
                current = loss_of(d, bs.beta);
                improved = true;
            }
        }
        if (!improved)
            break;
    }
    return bs;
}

std::optional<Row> solve_quantile(const Design& d)
{
    const std::size_t n = d.y.size();
    std::vector<double> ones(n, 1.0);
    Row ols;
    if (!wls(d, ones, ols))
        return std::nullopt;

    std::vector<double> sorted = d.y;
    std::sort(sorted.begin(), sorted.end());
    const double q = sorted[std::min(n - 1, static_cast<std::size_t>(d.tau * static_cast<double>(n)))];
    const double scale = std::max(1e-12, sorted.back() - sorted.front());

    Row flat(d.p, 0.0);
    flat[0] = q;
    Row shifted = ols;
    shifted[0] += (q - sorted[n / 2]);

    Row best;
    double best_loss = kInf;
    for (const Row& start : {ols, flat, shifted}) {
        const Row b = irls(d, start, scale);
        const double l = loss_of(d, b);
        if (l < best_loss) {
            best_loss = l;
            best = b;
        }
    }
    auto bs = snap(d, best);
    if (!bs)
        return std::nullopt;
    const Basis done = polish(d, *bs);
    return loss_of(d, done.beta) <= best_loss ? done.beta : best;
}

double percentile_sign_p(const std::vector<double>& draws)
{
    if (draws.empty())
        return 1.0;
    std::size_t le = 0;
    std::size_t ge = 0;
    for (double v : draws) {
        le += v <= 0.0;
        ge += v >= 0.0;
    }
    const double k = static_cast<double>(std::min(le, ge) + 1);
    return std::min(1.0, 2.0 * k / static_cast<double>(draws.size() + 1));
}

double sd_of(const std::vector<double>& v)
{
    if (v.size() < 2)
        return 0.0;
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v)
        ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double quantile_of(std::vector<double> v, double q)
{
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

} // namespace

// ---------------------------------------------------------------------------

std::string to_string(SizeRole r)
{
    return r == SizeRole::Population ? "population" : "victim";
}

std::optional<SizeRole> parse_size_role(std::string_view s)
{
    const std::string v = csv::lower(csv::trim(s));
    if (v == "population" || v == "pop")
        return SizeRole::Population;
    if (v == "victim")
        return SizeRole::Victim;
    return std::nullopt;
}

SizeSample make_size_sample(std::vector<double> values, SizeRole role)
{
    SizeSample s;
    s.role = role;
    for (double v : values)
        if (!(v > 0.0) || !std::isfinite(v))
            throw DomainError("size values must be positive and finite");
    if (!values.empty()) {
        const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
        s.lower = *lo;
        s.upper = *hi;
    }
    s.values = std::move(values);
    return s;
}

SizeSamples parse_size_samples(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open size sample file: " + path.string());
    return parse_size_samples(in);
}

SizeSamples parse_size_samples(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line))
        throw DataError("size sample file has no header");
    const auto header = csv::split_csv(line);
    std::optional<std::size_t> c_mcap, c_role, c_sector;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const std::string h = csv::lower(header[i]);
        if (h == "mcap")
            c_mcap = i;
        else if (h == "role")
            c_role = i;
        else if (h == "sector")
            c_sector = i;
    }
    if (!c_mcap || !c_role)
        throw DataError("size sample header needs mcap and role columns");

    std::vector<double> pop;
    std::vector<double> vic;
    SizeSamples out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (csv::trim(line).empty())
            continue;
        const auto f = csv::split_csv(line);
        const auto at = [&](std::size_t c) { return c < f.size() ? f[c] : std::string{}; };
        double v = 0.0;
        const std::string m = at(*c_mcap);
        const auto [ptr, ec] = std::from_chars(m.data(), m.data() + m.size(), v);
        if (ec != std::errc{} || ptr != m.data() + m.size() || !(v > 0.0) || !std::isfinite(v))
            throw DataError("line " + std::to_string(line_no) + ": mcap must be a positive number");
        const auto role = parse_size_role(at(*c_role));
        if (!role)
            throw DataError("line " + std::to_string(line_no) + ": role must be population or victim");
        (*role == SizeRole::Population ? pop : vic).push_back(v);
        out.sectors.push_back(c_sector ? at(*c_sector) : std::string{});
    }
    out.population = make_size_sample(std::move(pop), SizeRole::Population);
    out.victim = make_size_sample(std::move(vic), SizeRole::Victim);
    return out;
}

LognormFit fit_lognormal_trunc(const SizeSample& sample, const LognormOptions& options)
{
    if (sample.values.size() < kMinLognormSample)
        throw EstimationError("lognormal fit needs at least " + std::to_string(kMinLognormSample) + " values");
    std::vector<double> z;
    z.reserve(sample.values.size());
    for (double v : sample.values) {
        if (v < sample.lower || v > sample.upper || !(v > 0.0))
            throw DomainError("size value outside the sample bounds");
        z.push_back(std::log(v));
    }

    const LognormPoint pt = fit_lognorm_point(z, sample.lower, sample.upper);
    LognormFit fit;
    fit.params = {pt.mu, pt.sigma, sample.lower, sample.upper};
    fit.loglik = pt.loglik;
    fit.n = z.size();
    fit.converged = pt.converged;
    if (options.n_boot == 0)
        return fit;

    const Replicate replicate = [&](Rng& rng) -> std::optional<std::vector<double>> {
        std::vector<double> sim(z.size());
        for (auto& v : sim)
            v = std::log(lognorm_trunc_sample(fit.params, rng));
        try {
            const LognormPoint r = fit_lognorm_point(sim, sample.lower, sample.upper);
            if (!r.converged)
                return std::nullopt;
            return std::vector<double>{r.mu, r.sigma};
        } catch (const Error&) {
            return std::nullopt;
        }
    };
    const BootstrapResult boot =
        bootstrap_se(2, replicate, options.n_boot, derive_seed(options.seed, 0xB007), options.threads);
    fit.mu_se = boot.se[0];
    fit.sigma_se = boot.se[1];
    fit.boot_ok = boot.n_ok;
    fit.boot_failed = boot.n_failed;
    return fit;
}

std::vector<CurvePoint> victimization_pdf(const LognormParams& population, const LognormParams& victim,
                                          std::span<const double> x_grid)
{
    const auto inside = [](double x, const LognormParams& p) {
        return (p.lower <= 0.0 || x >= std::log(p.lower)) && (!std::isfinite(p.upper) || x <= std::log(p.upper));
    };
    std::vector<CurvePoint> out;
    double peak = 0.0;
    for (double x : x_grid) {
        if (!inside(x, population) || !inside(x, victim))
            throw DomainError("grid point " + std::to_string(x) + " lies outside a density's support");
        const double r = lognorm_trunc_log_density(x, victim) / lognorm_trunc_log_density(x, population);
        out.push_back({x, r, false});
        peak = std::max(peak, r);
    }
    if (peak > 0.0)
        for (auto& p : out)
            p.density /= peak;
    return out;
}

LogHistogram log_size_histogram(std::span<const double> values, double lo, double hi, double decades)
{
    if (!(lo > 0.0) || !(hi > lo) || !(decades > 0.0))
        throw DomainError("histogram needs 0 < lo < hi and a positive bin width");
    const double a = std::log(lo);
    const double b = std::log(hi);
    const double w = decades * std::numbers::ln10;
    const auto bins = static_cast<std::size_t>(std::ceil((b - a) / w - 1e-9));
    LogHistogram h;
    for (std::size_t k = 0; k <= bins; ++k)
        h.edges.push_back(a + static_cast<double>(k) * w);
    h.density.assign(bins, 0.0);
    std::size_t n = 0;
    for (double v : values) {
        if (!(v >= lo && v <= hi))
            continue;
        const auto k = std::min(bins - 1, static_cast<std::size_t>((std::log(v) - a) / w));
        h.density[k] += 1.0;
        ++n;
    }
    if (n > 0)
        for (auto& d : h.density)
            d /= static_cast<double>(n) * w;
    return h;
}

std::vector<CurvePoint> victimization_pdf(const LogHistogram& population, const LogHistogram& victim)
{
    if (population.edges != victim.edges)
        throw DomainError("histograms must share identical bins");
    std::vector<CurvePoint> out;
    double peak = 0.0;
    for (std::size_t k = 0; k < population.density.size(); ++k) {
        CurvePoint p;
        p.x = 0.5 * (population.edges[k] + population.edges[k + 1]);
        if (population.density[k] > 0.0) {
            p.density = victim.density[k] / population.density[k];
            peak = std::max(peak, p.density);
        } else {
            p.excluded = true;
        }
        out.push_back(p);
    }
    if (peak > 0.0)
        for (auto& p : out)
            if (!p.excluded)
                p.density /= peak;
    return out;
}

ScalingExponent local_scaling_exponent(std::span<const CurvePoint> curve, double lo, double hi)
{
    if (!(hi > lo))
        throw DomainError("scaling range must have lo < hi");
    double gmin = kInf, gmax = -kInf;
    for (const auto& p : curve) {
        gmin = std::min(gmin, p.x);
        gmax = std::max(gmax, p.x);
    }
    if (curve.empty() || hi < gmin || lo > gmax)
        throw DomainError("scaling range lies outside the grid");

    std::vector<double> xs, ys;
    for (const auto& p : curve) {
        if (p.excluded || !(p.density > 0.0) || p.x < lo || p.x > hi)
            continue;
        xs.push_back(p.x);
        ys.push_back(std::log(p.density));
    }
    if (xs.size() < 5)
        throw DomainError("scaling exponent needs at least 5 grid points in range, got " + std::to_string(xs.size()));
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    ScalingExponent s;
    s.exponent = sxy / sxx;
    s.n_points = xs.size();
    return s;
}

ScalingExponent local_scaling_exponent(const LognormFit& population, const LognormFit& victim,
                                       std::span<const double> x_grid, double lo, double hi, std::size_t n_rep,
                                       std::uint64_t seed, unsigned threads)
{
    const auto curve = victimization_pdf(population.params, victim.params, x_grid);
    ScalingExponent out = local_scaling_exponent(curve, lo, hi);
    for (const auto& p : curve)
        out.x.push_back(p.x);
    if (n_rep == 0)
        return out;

    struct Draw {
        double slope;
        std::vector<double> log_density;
    };
    const auto resample = [&](std::size_t, Rng& rng) -> std::optional<Draw> {
        const auto redraw = [&](const LognormFit& f) {
            std::vector<double> z(f.n);
            for (auto& v : z)
                v = std::log(lognorm_trunc_sample(f.params, rng));
            const LognormPoint r = fit_lognorm_point(z, f.params.lower, f.params.upper);
            return LognormParams{r.mu, r.sigma, f.params.lower, f.params.upper};
        };
        try {
            const LognormParams p = redraw(population);
            const LognormParams v = redraw(victim);
            const auto c = victimization_pdf(p, v, x_grid);
            Draw d;
            d.slope = local_scaling_exponent(c, lo, hi).exponent;
            for (const auto& pt : c)
                d.log_density.push_back(std::log(pt.density));
            return d;
        } catch (const Error&) {
            return std::nullopt;
        }
    };
    const auto draws = run_replications(n_rep, seed, threads, resample);

    std::vector<double> slopes;
    std::vector<std::vector<double>> by_point(curve.size());
    for (const auto& d : draws) {
        if (!d)
            continue;
        slopes.push_back(d->slope);
        for (std::size_t k = 0; k < curve.size(); ++k)
            by_point[k].push_back(d->log_density[k]);
    }
    out.se = sd_of(slopes);
    for (const auto& v : by_point) {
        out.lower.push_back(v.empty() ? 0.0 : std::exp(quantile_of(v, 0.05)));
        out.upper.push_back(v.empty() ? 0.0 : std::exp(quantile_of(v, 0.95)));
    }
    return out;
}

double check_loss(std::span<const double> x, std::span<const double> y, double tau, double a, double b,
                  std::optional<double> knot, double c)
{
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double fit = a + b * x[i];
        if (knot)
            fit += c * std::max(0.0, x[i] - *knot);
        s += rho(y[i] - fit, tau);
    }
    return s;
}

QuantileFit quantile_regression(std::span<const double> x, std::span<const double> y, double tau,
                                std::optional<double> knot, const QuantileOptions& options)
{
    if (x.size() != y.size())
        throw DomainError("x and y differ in length");
    if (!(tau > 0.0 && tau < 1.0))
        throw DomainError("tau must lie strictly between 0 and 1");
    if (x.size() < kMinQuantileSample)
        throw EstimationError("quantile regression needs at least " + std::to_string(kMinQuantileSample) +
                              " points");
    const Design d = make_design(x, y, tau, knot);
    const auto beta = solve_quantile(d);
    if (!beta)
        throw DomainError("quantile regression design is collinear");

    QuantileFit f;
    f.tau = tau;
    f.n = x.size();
    f.intercept = (*beta)[0];
    f.slope = (*beta)[1];
    f.knot = knot;
    f.slope_above = knot ? f.slope + (*beta)[2] : f.slope;
    f.loss = loss_of(d, *beta);
    if (options.n_boot == 0)
        return f;

    const std::size_t n = x.size();
    const Replicate replicate = [&](Rng& rng) -> std::optional<std::vector<double>> {
        std::vector<double> bx(n), by(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto k = std::min(n - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(n)));
            bx[i] = x[k];
            by[i] = y[k];
        }
        const auto b = solve_quantile(make_design(bx, by, tau, knot));
        if (!b)
            return std::nullopt;
        return *b;
    };
    const BootstrapResult boot =
        bootstrap_se(d.p, replicate, options.n_boot, derive_seed(options.seed, 0x0B5), options.threads);
    f.boot_ok = boot.n_ok;
    f.intercept_se = boot.se[0];
    f.slope_se = boot.se[1];
    std::vector<double> slopes, above;
    for (const auto& e : boot.estimates) {
        slopes.push_back(e[1]);
        above.push_back(knot ? e[1] + e[2] : e[1]);
    }
    f.slope_p = percentile_sign_p(slopes);
    f.slope_above_se = sd_of(above);
    f.slope_above_p = percentile_sign_p(above);
    return f;
}

SectorSummary sector_summary(const BreachCatalog& catalog, double span_years)
{
    if (!(span_years > 0.0))
        throw DomainError("span must be positive");
    std::map<std::string, std::pair<std::size_t, std::vector<double>>> by_sector;
    for (const auto& e : catalog.events()) {
        if (!e.sector || e.sector->empty())
            continue;
        auto& slot = by_sector[*e.sector];
        ++slot.first;
        if (e.size)
            slot.second.push_back(static_cast<double>(*e.size));
    }
    SectorSummary out;
    for (auto& [name, slot] : by_sector) {
        auto& sizes = slot.second;
        if (sizes.empty()) {
            out.notes.push_back("sector " + name + " omitted: no events with known size");
            continue;
        }
        std::sort(sizes.begin(), sizes.end());
        const std::size_t m = sizes.size() / 2;
        SectorEntry s;
        s.sector = name;
        s.n = slot.first;
        s.median_size = sizes.size() % 2 ? sizes[m] : 0.5 * (sizes[m - 1] + sizes[m]);
        s.frequency_10y = static_cast<double>(slot.first) * 10.0 / span_years;
        out.entries.push_back(s);
    }
    return out;
}

} // namespace heavytail
