// Channel models with log-normal turbulence.
#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "model_common.hpp"
#include "uavfso/quadrature.hpp"
#include "uavfso/specfun.hpp"

namespace uavfso {
namespace {

using detail::kPi;

std::vector<std::string> boresight_flags(UavStability const& s)
{
    std::vector<std::string> flags;
    if (boresight_condition_violated(s))
        flags.emplace_back(
            "boresight: (theta'_tx+theta'_rx)^2 + (theta'_ty+theta'_ry)^2 exceeds 9 max(sigma_xo^2, "
            "sigma_yo^2); the Rayleigh approximation is expected to deviate");
    return flags;
}

// ln Q(z) without underflow for large positive z.
double log_q(double z)
{
    if (z > 0.0)
        return std::log(0.5 * specfun::erfcx(z / std::numbers::sqrt2)) - 0.5 * z * z;
    return std::log(specfun::q_function(z));
}

// int_0^inf u^k exp(-(u - c)^2 / s2) du by direct quadrature.
double half_line_moment_numeric(int k, double c, double s2)
{
    double const peak = 0.5 * (c + std::sqrt(c * c + 2.0 * k * s2));
    double const x_peak = std::max(peak, 0.0);
    double const top = x_peak + 40.0 * std::sqrt(s2);
    // Factor out exp(-c^2/s2) when c < 0 so the integrand stays representable.
    double const shift = c < 0.0 ? -c * c / s2 : 0.0;
    auto f = [&](double u) {
        double const e = -(u - c) * (u - c) / s2 - shift;
        return (k == 0 ? 1.0 : std::pow(u, k)) * std::exp(e);
    };
    quad::Tolerance tol{0.0, 1e-11, 400};
    double v = 0.0;
    if (x_peak > 0.0)
        v += quad::integrate_or_throw(f, 0.0, x_peak, tol, "theorem4: moment quadrature");
    v += quad::integrate_or_throw(f, x_peak, top, tol, "theorem4: moment quadrature");
    return v * std::exp(shift);
}

struct RicianLogNormal
{
    double log_q3;            // log of the h-independent prefactor
    double tau;
    double q2;
    double s2;                // 8 sigma_L^2
    std::vector<double> a_k;  // (r_o^2 w^2 / 8 sigma_d^4)^k / (k!)^2
    std::vector<std::vector<double>> pascal;
    double scale;             // 1 - marcum mass

    RicianLogNormal(DerivedConstants const& c, LinkGeometry const& g, LogNormal const& m,
                    int k_terms, double p_zero)
        : tau(c.tau), s2(8.0 * m.sigma_l2), scale(1.0 - p_zero)
    {
        double const sl = std::sqrt(m.sigma_l2);
        q2 = std::log(c.a0 * g.h_l) + 2.0 * m.mu_l - 4.0 * m.sigma_l2 * tau;
        log_q3 = std::log(tau) - tau * (q2 + 2.0 * m.sigma_l2 * tau)
                 - c.r_o * c.r_o / (2.0 * c.sigma_d2) - std::log(std::sqrt(8.0 * kPi) * sl);
        double const base = c.r_o * c.r_o * c.w_z * c.w_z / (8.0 * c.sigma_d2 * c.sigma_d2);
        a_k.resize(static_cast<std::size_t>(k_terms) + 2);
        for (std::size_t k = 0; k < a_k.size(); ++k)
        {
            double const kk = static_cast<double>(k);
            a_k[k] = base == 0.0 ? (k == 0 ? 1.0 : 0.0)
                                 : std::exp(kk * std::log(base) - 2.0 * std::lgamma(kk + 1.0));
            pascal.emplace_back(k + 1, 1.0);
            for (std::size_t j = 1; j < k; ++j)
                pascal[k][j] = pascal[k - 1][j - 1] + pascal[k - 1][j];
        }
    }

    int k_terms() const { return static_cast<int>(a_k.size()) - 2; }

    // int_0^inf u^k exp(-(u - c)^2 / s2) du for k = 0..n and c <= 0, from
    // M_{k+1} = c M_k + (s2/2)(k M_{k-1} + [k = 0] exp(-c^2/s2)). Upward
    // recurrence loses about exp(2|c| sqrt(2n/s2)); beyond that the ratios
    // M_k / M_{k-1} are run downward from a saddle-point start.
    std::vector<double> negative_moments(double c, int n) const
    {
        double const a = std::abs(c) / std::sqrt(s2);
        double const half = 0.5 * s2;
        std::vector<double> m(n + 1);
        m[0] = 0.5 * std::sqrt(kPi * s2) * specfun::erfcx(a) * std::exp(-a * a);
        double const growth = 2.0 * a * std::sqrt(2.0 * n);
        if (growth < 7.0)
        {
            if (n >= 1)
                m[1] = c * m[0] + half * std::exp(-a * a);
            for (int k = 1; k < n; ++k)
                m[k + 1] = c * m[k] + half * k * m[k - 1];
            return m;
        }
        double const extra = 18.0 / (a * std::numbers::sqrt2);
        double const root = std::sqrt(static_cast<double>(n)) + extra;
        int const top = std::min(4000, std::max(n + 8, static_cast<int>(std::ceil(root * root))));
        double r = 0.5 * (c + std::sqrt(c * c + 2.0 * (top + 1) * s2));
        std::vector<double> ratio(n + 1, 0.0);
        for (int k = top; k >= 1; --k)
        {
            r = half * k / (r - c);
            if (k <= n)
                ratio[k] = r;
        }
        for (int k = 1; k <= n; ++k)
            m[k] = m[k - 1] * ratio[k];
        return m;
    }

    // a_k int_0^inf u^k exp(-(u - c)^2 / s2) du for k = 0..n. For c > 0 the
    // moments are binomial sums of complete and lower incomplete Gamma
    // functions; a sum that cancels falls back to quadrature.
    std::vector<double> terms(double c, bool lower_branch, int n) const
    {
        if (!lower_branch)
        {
            auto m = negative_moments(std::min(c, 0.0), n);
            for (int k = 0; k <= n; ++k)
                m[k] *= a_k[k];
            return m;
        }
        double const x = c * c / s2;
        // Gamma((j+1)/2, x) and Gamma((j+1)/2) by upward recurrence from the
        // orders 1/2 and 1; Gamma(s) + (-1)^j Upsilon(s, x) is 2 Gamma(s) -
        // Gamma(s, x) for even j and Gamma(s, x) for odd j.
        std::vector<double> upper(n + 1), full(n + 1), g(n + 1), pw(n + 1);
        double const log_x = std::log(x);
        for (int j = 0; j <= n; ++j)
        {
            if (j < 2)
            {
                upper[j] = j == 0 ? std::sqrt(kPi) * specfun::erfc(std::sqrt(x)) : std::exp(-x);
                full[j] = j == 0 ? std::sqrt(kPi) : 1.0;
            }
            else
            {
                double const sp = 0.5 * (j - 1);
                upper[j] = sp * upper[j - 2] + (x > 0.0 ? std::exp(sp * log_x - x) : 0.0);
                full[j] = sp * full[j - 2];
            }
            double const v = j % 2 == 0 ? 2.0 * full[j] - upper[j] : upper[j];
            g[j] = 0.5 * std::pow(s2, 0.5 * (j + 1)) * v;
            pw[j] = j == 0 ? 1.0 : pw[j - 1] * c;
        }
        std::vector<double> out(n + 1, 0.0);
        for (int k = 0; k <= n; ++k)
        {
            if (a_k[k] == 0.0)
                continue;
            double sum = 0.0;
            double mag = 0.0;
            for (int j = 0; j <= k; ++j)
            {
                double const t = pascal[k][j] * pw[k - j] * g[j];
                sum += t;
                mag += std::abs(t);
            }
            if (mag == 0.0)
                continue;
            if (std::abs(sum) < 1e-8 * mag || sum < 0.0)
                sum = half_line_moment_numeric(k, c, s2);
            out[k] = a_k[k] * sum;
        }
        return out;
    }

    double series(double c, bool lower_branch) const
    {
        auto const t = terms(c, lower_branch, k_terms());
        double sum = 0.0;
        for (double v : t)
            sum += v;
        return sum;
    }

    double density(double h) const
    {
        double const c = q2 - std::log(h);
        double const sum = series(c, c > 0.0);
        if (!(sum > 0.0))
            return sum;
        return scale * std::exp(log_q3 + (tau - 1.0) * std::log(h) + std::log(sum));
    }
};

}  // namespace

ChannelPdf pdf_theorem2(LinkGeometry const& g, UavStability const& s, LogNormal const& m,
                        ModelOptions const& o)
{
    g.validate();
    s.validate();
    detail::require_lognormal(m);
    auto const c = derive_constants(g, s);
    auto const kernel = std::make_shared<detail::BeckmannKernel const>(c);
    double const r = prob_r(s, g.theta_fov, o.n_prime);
    double const top = std::log(c.a0 * g.h_l);
    double const sl2 = m.sigma_l2;
    double const mu = m.mu_l;
    double const u_max = kernel->x_max() * kernel->x_max();

    auto density = [=](double h) {
        double const l = std::log(h) - top;
        double const uc = 2.0 * mu - l;
        double const half = 24.0 * std::sqrt(sl2);
        double const lo = std::max(0.0, uc - half);
        double const hi = std::min(u_max, uc + half);
        if (!(hi > lo))
            return 0.0;
        auto f = [&](double u) {
            double const d = l + u - 2.0 * mu;
            return std::exp(kernel->log_c1_g_u(u) - d * d / (8.0 * sl2));
        };
        quad::Tolerance tol{0.0, 1e-9, 400};
        double const v = quad::integrate_or_throw(f, lo, hi, tol, "theorem2: quadrature failed");
        return r * v / (h * std::sqrt(8.0 * kPi * sl2));
    };
    return ChannelPdf(ModelTag::theorem2, 1.0 - r, INFINITY, density,
                      detail::lognormal_range(c, g, m), {});
}

ChannelPdf pdf_theorem3(LinkGeometry const& g, UavStability const& s, LogNormal const& m,
                        ModelOptions const& o)
{
    g.validate();
    s.validate();
    detail::require_lognormal(m);
    auto const c = derive_constants(g, s);
    if (!(c.sigma_m2 > 0.0))
        throw std::invalid_argument("theorem3: displacement scale sigma_m must be positive");
    double const r = prob_r(s, g.theta_fov, o.n_prime);
    double const top = std::log(c.a0 * g.h_l);
    double const t1 = c.tau1;
    double const sl = std::sqrt(m.sigma_l2);
    double const mu = m.mu_l;
    double const log_pre = std::log(r) + std::log(t1) - t1 * top - 2.0 * mu * t1
                           + 2.0 * m.sigma_l2 * t1 * t1;

    auto density = [=](double h) {
        double const lh = std::log(h);
        double const z = (lh - top - 2.0 * mu + 4.0 * m.sigma_l2 * t1) / (2.0 * sl);
        return std::exp(log_pre + (t1 - 1.0) * lh + log_q(z));
    };
    return ChannelPdf(ModelTag::theorem3, 1.0 - r, INFINITY, density,
                      detail::lognormal_range(c, g, m), boresight_flags(s));
}

ChannelPdf pdf_theorem4(LinkGeometry const& g, UavStability const& s, LogNormal const& m,
                        ModelOptions const& o)
{
    g.validate();
    s.validate();
    detail::require_lognormal(m);
    if (o.k_terms < 1)
        throw std::invalid_argument("theorem4: K must be at least 1");
    auto const c = derive_constants(g, s);
    detail::require_displacement(c);
    double const p0 = marcum_mass(c.theta_d, g.theta_fov, std::sqrt(c.sigma_to2),
                                  std::sqrt(c.sigma_ro2));
    auto const model = std::make_shared<RicianLogNormal const>(c, g, m, o.k_terms, p0);

    // Both branches meet at c = 0.
    double const fa = model->series(0.0, false);
    double const fb = model->series(0.0, true);
    if (std::abs(fa - fb) > 1e-6 * std::max(std::abs(fa), std::abs(fb)))
        throw std::runtime_error("theorem4: branches disagree at the splice point");

    auto const range = detail::lognormal_range(c, g, m);
    ChannelPdf pdf(ModelTag::theorem4, p0, INFINITY,
                   [model](double h) { return model->density(h); }, range, isotropy_warnings(s));

    // Size of the first omitted term relative to the retained series.
    double worst = 0.0;
    int const probes = 32;
    for (int i = 0; i < probes; ++i)
    {
        double const lh = range.bulk_lo + (range.bulk_hi - range.bulk_lo) * (i + 0.5) / probes;
        double const cc = model->q2 - lh;
        auto const t = model->terms(cc, cc > 0.0, o.k_terms + 1);
        double const sum = std::accumulate(t.begin(), t.end() - 1, 0.0);
        if (sum > 0.0)
            worst = std::max(worst, t.back() / sum);
    }
    if (worst > 1e-3)
    {
        std::ostringstream msg;
        msg << "theorem4: K-truncation residual up to " << worst << " of the density";
        pdf.add_flag(msg.str());
    }
    return pdf;
}

ChannelPdf pdf_prop1(LinkGeometry const& g, UavStability const& s, LogNormal const& m,
                     ModelOptions const&)
{
    g.validate();
    s.validate();
    detail::require_lognormal(m);
    auto const c = derive_constants(g, s);
    detail::require_displacement(c);
    double const p0 = marcum_mass(c.theta_d, g.theta_fov, std::sqrt(c.sigma_to2),
                                  std::sqrt(c.sigma_ro2));
    double const sl2 = m.sigma_l2;
    double const big_s = std::sqrt(8.0 * sl2);
    double const sd2 = c.sigma_d2;
    double const ro2 = c.r_o * c.r_o;
    double const w2 = c.w_z * c.w_z;
    double const s1 = std::sqrt(2.0 * sl2) * ro2 * w2 / (4.0 * sd2 * sd2);
    double const s2 = sl2 * ro2 * ro2 * w2 * w2 / (32.0 * sd2 * sd2 * sd2 * sd2);
    double const log_s0_base = std::log(c.tau / 4.0) - ro2 / (2.0 * sd2);
    double const top = std::log(c.a0 * g.h_l);
    double const tau = c.tau;
    double const mu = m.mu_l;
    double const scale = 1.0 - p0;

    auto density = [=](double h) {
        double const lh = std::log(h);
        double const b = top - lh + 2.0 * mu;
        double const cc = b - 4.0 * sl2 * tau;
        double const cs = cc / big_s;
        double const log_s0 = log_s0_base - b * b / (big_s * big_s);
        // s0 * exp(c^2/S^2) * erfc(-c/S)
        double s0g;
        if (cs < 0.0)
            s0g = std::exp(log_s0) * specfun::erfcx(-cs);
        else
            s0g = std::exp(log_s0_base + (cc * cc - b * b) / (big_s * big_s))
                  * specfun::erfc(-cs);
        double const first = 2.0 * std::exp(log_s0) / std::sqrt(kPi) * (s1 + s2 * cs);
        double const second = s0g * (2.0 + s2 + 2.0 * s1 * cs + 2.0 * s2 * cs * cs);
        return scale * (first + second) / h;
    };

    auto flags = isotropy_warnings(s);
    if (std::sqrt(sd2) <= 0.8 * c.r_o)
        flags.emplace_back("prop1: sigma_d / r_o <= 0.8, outside the stated validity region");
    return ChannelPdf(ModelTag::prop1, p0, INFINITY, density, detail::lognormal_range(c, g, m),
                      std::move(flags));
}

}  // namespace uavfso
