#include "fracscrew/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace fracscrew::quad {

static GaussRule make_gauss(int n) {
    GaussRule r;
    r.x.resize(n);
    r.w.resize(n);
    // Newton iteration on Legendre polynomials, nodes symmetric about 0.
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.x[i] = -x;
        r.x[n - 1 - i] = x;
        r.w[i] = r.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
    }
    return r;
}

const GaussRule& gauss_legendre(int n) {
    static std::map<int, GaussRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, make_gauss(n)).first;
    return it->second;
}

double integrate(const std::function<double(double)>& f, double a, double b, int n) {
    const GaussRule& g = gauss_legendre(n);
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += g.w[i] * f(mid + half * g.x[i]);
    return s * half;
}

namespace {
double simpson(double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const std::function<double(double)>& f, double a, double fa, double b,
             double fb, double m, double fm, double whole, double tol, int depth) {
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = simpson(a, fa, m, fm, flm);
    double right = simpson(m, fm, b, fb, frm);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adapt(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adapt(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}
} // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double tol, int max_depth) {
    if (a == b) return 0.0;
    double fa = f(a), fb = f(b), m = 0.5 * (a + b), fm = f(m);
    double whole = simpson(a, fa, b, fb, fm);
    return adapt(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

Extrapolation richardson(const std::vector<double>& samples,
                         const std::vector<double>& exponents, double ratio) {
    const size_t n = samples.size();
    if (n < 2) throw std::invalid_argument("richardson: need at least 2 samples");
    std::vector<std::vector<double>> T(n);
    T[0] = samples;
    size_t stages = std::min(exponents.size(), n - 1);
    for (size_t m = 0; m < stages; ++m) {
        double fac = std::pow(ratio, exponents[m]) - 1.0;
        T[m + 1].resize(n - m - 1);
        for (size_t l = 0; l + m + 1 < n; ++l)
            T[m + 1][l] = T[m][l + 1] + (T[m][l + 1] - T[m][l]) / fac;
    }
    Extrapolation out;
    // best value: last entry of the deepest column
    const auto& last = T[stages];
    out.value = last.back();
    out.levels = static_cast<int>(stages);
    if (last.size() >= 2)
        out.error = std::abs(last.back() - last[last.size() - 2]);
    else if (stages >= 1)
        out.error = std::abs(T[stages].back() - T[stages - 1].back());
    out.converged = true;
    return out;
}

} // namespace fracscrew::quad
