#include "fracscrew/spectral1d.hpp"

#include <cmath>
#include <stdexcept>

#include "fracscrew/quadrature.hpp"
#include "fracscrew/specfun.hpp"

namespace fracscrew::spectral1d {

double SineExpansion::mu(int k) const {
    if (k < 1) throw std::domain_error("mode index starts at 1");
    double root = k * M_PI / lambda;
    return root * root;
}

SineExpansion analyze(const std::vector<double>& samples, double lambda) {
    if (!(lambda > 0.0)) throw std::domain_error("analyze: lambda must be positive");
    const int n = static_cast<int>(samples.size()) - 1;
    if (n < 2) throw std::invalid_argument("analyze: need at least 3 samples");
    double scale = 0.0;
    for (double v : samples) scale = std::max(scale, std::abs(v));
    if (std::abs(samples.front()) > 1e-12 * (1.0 + scale) ||
        std::abs(samples.back()) > 1e-12 * (1.0 + scale))
        throw std::invalid_argument("analyze: samples must vanish at both endpoints");

    SineExpansion e;
    e.lambda = lambda;
    e.coeffs.resize(n - 1);
    const double ds = lambda / n;
    const double norm = std::sqrt(2.0 / lambda);
    for (int k = 1; k < n; ++k) {
        double s = 0.0;
        for (int i = 1; i < n; ++i)
            s += samples[i] * std::sin(M_PI * k * i / n);
        e.coeffs[k - 1] = ds * norm * s;
    }
    return e;
}

std::vector<double> synthesize(const SineExpansion& e, int n_intervals) {
    if (n_intervals < 2) throw std::invalid_argument("synthesize: need at least 2 intervals");
    std::vector<double> out(n_intervals + 1, 0.0);
    const double norm = std::sqrt(2.0 / e.lambda);
    for (int i = 1; i < n_intervals; ++i) {
        double s = 0.0;
        for (int k = 1; k <= e.modes(); ++k)
            s += e.coeffs[k - 1] * std::sin(M_PI * k * i / static_cast<double>(n_intervals));
        out[i] = norm * s;
    }
    return out;
}

double synthesize_at(const SineExpansion& e, double s) {
    const double norm = std::sqrt(2.0 / e.lambda);
    double v = 0.0;
    for (int k = 1; k <= e.modes(); ++k)
        v += e.coeffs[k - 1] * std::sin(M_PI * k * s / e.lambda);
    return norm * v;
}

SineExpansion frac_laplacian(const SineExpansion& e, double alpha) {
    SineExpansion out = e;
    for (int k = 1; k <= e.modes(); ++k)
        out.coeffs[k - 1] *= std::pow(e.mu(k), alpha);
    return out;
}

std::vector<double> extend(const SineExpansion& e, double alpha, double y,
                           int n_intervals) {
    if (y < 0.0) throw std::domain_error("extend: height must be nonnegative");
    specfun::ExtensionProfile prof(alpha);
    SineExpansion damped = e;
    for (int k = 1; k <= e.modes(); ++k)
        damped.coeffs[k - 1] *= prof.phi2(std::sqrt(e.mu(k)) * y);
    return synthesize(damped, n_intervals);
}

double extend_at(const SineExpansion& e, double alpha, double s, double y) {
    if (y < 0.0) throw std::domain_error("extend: height must be nonnegative");
    specfun::ExtensionProfile prof(alpha);
    const double norm = std::sqrt(2.0 / e.lambda);
    double v = 0.0;
    for (int k = 1; k <= e.modes(); ++k)
        v += e.coeffs[k - 1] * std::sin(M_PI * k * s / e.lambda) *
             prof.phi2(std::sqrt(e.mu(k)) * y);
    return norm * v;
}

SineExpansion neumann_derivative(const SineExpansion& e, double alpha) {
    specfun::ExtensionProfile prof(alpha);
    const double ca = specfun::c_alpha(alpha);
    const int levels = 11;
    std::vector<double> expo;
    for (int m = 1; expo.size() < 8; ++m) {
        expo.push_back(2.0 * m - 2.0 * alpha);
        expo.push_back(2.0 * m);
    }
    SineExpansion out = e;
    for (int k = 1; k <= e.modes(); ++k) {
        double m = std::sqrt(e.mu(k));
        // flat trace of the k-th mode extension, ladder kept inside the
        // small-argument regime of phi2 regardless of the mode frequency
        std::vector<double> g(levels);
        double y = 0.5 / m;
        for (int l = 0; l < levels; ++l, y *= 0.5)
            g[l] = -std::pow(y, 1.0 - 2.0 * alpha) * m * prof.dphi2(m * y);
        out.coeffs[k - 1] = e.coeffs[k - 1] * quad::richardson(g, expo, 2.0).value / ca;
    }
    return out;
}

} // namespace fracscrew::spectral1d
