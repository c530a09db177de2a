#include "fracscrew/specfun.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "fracscrew/errors.hpp"
#include "fracscrew/quadrature.hpp"

namespace fracscrew::specfun {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kYSwitch = 12.0;  // handover to the large-argument expansion
// Above this the K reflection series loses ~e^{2y} eps to cancellation
// (already ~5e-12 relative at y=6), so hand over to the continued fraction
// while the loss is still ~1e-12.
constexpr double kYReflect = 4.0;
constexpr double kYOverflow = 700.0;
constexpr int kMaxIter = 400;

void check_argument(double y) {
    if (!(y >= 0.0)) throw std::domain_error("bessel: argument must be nonnegative");
    if (y > kYOverflow) throw std::overflow_error("bessel: argument beyond overflow guard");
}

bool near_integer(double nu) {
    return std::abs(nu - std::round(nu)) < 1e-12;
}

// a_k(nu)/y^k terms of the Poincare expansions, shared by I and K
// (DLMF 10.40.1/10.40.5). Truncated at the smallest term.
void asymptotic_sums(double nu, double y, double& alt, double& pos) {
    double mu2 = 4.0 * nu * nu;
    double term = 1.0;
    alt = 1.0; // sum (-1)^k a_k / y^k
    pos = 1.0; // sum        a_k / y^k
    double prev = std::abs(term);
    for (int k = 1; k <= kMaxIter; ++k) {
        term *= (mu2 - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k * y);
        if (std::abs(term) >= prev) break; // smallest-term truncation
        prev = std::abs(term);
        pos += term;
        alt += (k % 2 ? -term : term);
        if (std::abs(term) < kEps) break;
    }
}

// Steed's continued fraction for K_mu, K_{mu+1} with |mu| <= 1/2, y >= 2
// (Thompson & Barnett, J. Comput. Phys. 64 (1986); same scheme as the
// classical bessik routine). Machine precision in the band where neither
// the reflection series nor the asymptotic expansion reaches it.
void k_cf2(double mu, double y, double& kmu, double& kmu1) {
    double mu2 = mu * mu;
    double b = 2.0 * (1.0 + y);
    double d = 1.0 / b;
    double delh = d, h = d;
    double q1 = 0.0, q2 = 1.0;
    double a1 = 0.25 - mu2;
    double q = a1, c = a1, a = -a1;
    double s = 1.0 + q * delh;
    int i = 2;
    for (; i <= kMaxIter; ++i) {
        a -= 2.0 * (i - 1);
        c = -a * c / i;
        double qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        double dels = q * delh;
        s += dels;
        if (std::abs(dels / s) <= kEps) break;
    }
    if (i > kMaxIter)
        throw NonConvergenceError("bessel_z continued fraction stalled", std::abs(delh));
    h = a1 * h;
    kmu = std::sqrt(M_PI / (2.0 * y)) * std::exp(-y) / s;
    kmu1 = kmu * (mu + y + 0.5 - h) / y;
}

// core range 0 < nu < 1, dispatch over the three K schemes
double k_core(double nu, double y) {
    if (y <= kYReflect) return branches::k_reflection(nu, y);
    if (y <= kYSwitch) return branches::k_continued_fraction(nu, y);
    return branches::k_asymptotic(nu, y);
}

} // namespace

namespace branches {

// ascending series, orders nu > -2 away from negative integers
double i_series(double nu, double y) {
    double t = std::pow(0.5 * y, nu) / std::tgamma(nu + 1.0);
    double q = 0.25 * y * y;
    double sum = t;
    for (int k = 1; k <= kMaxIter; ++k) {
        t *= q / (k * (k + nu));
        sum += t;
        if (std::abs(t) < kEps * std::abs(sum)) return sum;
    }
    throw NonConvergenceError("bessel_i series stalled", std::abs(t));
}

double i_asymptotic(double nu, double y) {
    double alt, pos;
    asymptotic_sums(nu, y, alt, pos);
    double front = 1.0 / std::sqrt(2.0 * M_PI * y);
    // exponentially small reflection term keeps half-integer orders exact
    return front * (std::exp(y) * alt - std::sin(nu * M_PI) * std::exp(-y) * pos);
}

double k_reflection(double nu, double y) {
    double s = std::sin(M_PI * nu);
    return 0.5 * M_PI * (i_series(-nu, y) - i_series(nu, y)) / s;
}

double k_continued_fraction(double nu, double y) {
    double kmu, kmu1;
    if (nu <= 0.5) {
        k_cf2(nu, y, kmu, kmu1);
        return kmu;
    }
    k_cf2(nu - 1.0, y, kmu, kmu1);
    return kmu1;
}

double k_asymptotic(double nu, double y) {
    double alt, pos;
    asymptotic_sums(nu, y, alt, pos);
    (void)alt;
    return std::sqrt(M_PI / (2.0 * y)) * std::exp(-y) * pos;
}

} // namespace branches

double y_switch() { return kYSwitch; }

double bessel_i(double nu, double y) {
    check_argument(y);
    if (nu <= -2.0) throw std::domain_error("bessel_i: order below supported range");
    if (near_integer(nu) && nu < 0.0)
        throw std::domain_error("bessel_i: negative integer order");
    if (y == 0.0) {
        if (nu == 0.0) return 1.0;
        if (nu > 0.0) return 0.0;
        throw std::domain_error("bessel_i: negative order at zero argument");
    }
    if (y <= kYSwitch) return branches::i_series(nu, y);
    return branches::i_asymptotic(nu, y);
}

double bessel_z(double nu, double y) {
    check_argument(y);
    if (y == 0.0) throw std::domain_error("bessel_z: argument must be positive");
    nu = std::abs(nu);
    if (near_integer(nu)) throw std::domain_error("bessel_z: integer order unsupported");
    if (nu < 1.0) return k_core(nu, y);
    if (nu < 2.0) {
        double q = nu - 1.0; // K_{q+1} = K_{1-q} + (2q/y) K_q, both cores in (0,1)
        return k_core(1.0 - q, y) + (2.0 * q / y) * k_core(q, y);
    }
    throw std::domain_error("bessel_z: order beyond supported range");
}

double c_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("c_alpha: alpha must lie in (0,1)");
    return std::pow(2.0, 1.0 - 2.0 * alpha) * std::tgamma(1.0 - alpha) / std::tgamma(alpha);
}

ExtensionProfile::ExtensionProfile(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("ExtensionProfile: alpha must lie in (0,1)");
    norm_ = std::pow(2.0, 1.0 - alpha) / std::tgamma(alpha);
}

static constexpr double kYMin = 1e-8;

double ExtensionProfile::phi1(double y) const {
    if (y < kYMin) return 0.0;
    return std::pow(y, alpha_) * bessel_i(alpha_, y);
}

double ExtensionProfile::phi2(double y) const {
    if (y < kYMin) return 1.0;
    if (y > kYOverflow) return 0.0; // decayed below double range long before this
    return norm_ * std::pow(y, alpha_) * bessel_z(alpha_, y);
}

double ExtensionProfile::dphi1(double y) const {
    return std::pow(y, alpha_) * bessel_i(alpha_ - 1.0, y);
}

double ExtensionProfile::dphi2(double y) const {
    if (y > kYOverflow) return 0.0;
    return -norm_ * std::pow(y, alpha_) * bessel_z(1.0 - alpha_, y);
}

double ExtensionProfile::ddphi1(double y) const {
    double im1 = bessel_i(alpha_ - 1.0, y);
    double i0 = bessel_i(alpha_, y);
    double im2 = i0 + (2.0 * (alpha_ - 1.0) / y) * im1; // downward recurrence
    return alpha_ * std::pow(y, alpha_ - 1.0) * im1 + std::pow(y, alpha_) * 0.5 * (im2 + i0);
}

double ExtensionProfile::ddphi2(double y) const {
    if (y > kYOverflow) return 0.0;
    double ka = bessel_z(alpha_, y);
    double kb = bessel_z(1.0 - alpha_, y);
    return norm_ * (std::pow(y, alpha_) * ka -
                    (2.0 * alpha_ - 1.0) * std::pow(y, alpha_ - 1.0) * kb);
}

double ExtensionProfile::rescaled_residual(double mu, double y, Which which) const {
    if (!(mu > 0.0) || !(y > 0.0))
        throw std::domain_error("rescaled_residual: mu and y must be positive");
    double w = std::pow(y, 1.0 - 2.0 * alpha_);
    if (which == Which::one) return -w * mu * mu;
    double t = mu * y;
    double p, dp, ddp;
    if (which == Which::phi1) {
        p = phi1(t);
        dp = dphi1(t);
        ddp = ddphi1(t);
    } else {
        p = phi2(t);
        dp = dphi2(t);
        ddp = ddphi2(t);
    }
    return w * (mu * mu * ddp + (1.0 - 2.0 * alpha_) * mu * dp / y - mu * mu * p);
}

TraceResult neumann_trace(double alpha, double y0, int levels) {
    ExtensionProfile prof(alpha);
    std::vector<double> g(levels);
    double y = y0;
    for (int l = 0; l < levels; ++l, y *= 0.5)
        g[l] = -std::pow(y, 1.0 - 2.0 * alpha) * prof.dphi2(y);

    // error ladder of y^{1-a} K_{1-a}: even powers plus the y^{2-2a} branch
    std::vector<double> expo;
    for (int m = 1; expo.size() < 8; ++m) {
        expo.push_back(2.0 * m - 2.0 * alpha);
        expo.push_back(2.0 * m);
    }
    auto ex = quad::richardson(g, expo, 2.0);

    double ref = c_alpha(alpha);
    if (!std::isfinite(ex.value) || ex.error > 1e-6 * std::abs(ref))
        throw NonConvergenceError("neumann_trace extrapolation did not settle", ex.error, g);

    TraceResult out;
    out.value = ex.value;
    out.error = ex.error;
    out.levels = ex.levels;
    return out;
}

} // namespace fracscrew::specfun
