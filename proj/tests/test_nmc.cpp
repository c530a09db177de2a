#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "fracscrew/errors.hpp"
#include "fracscrew/nmc.hpp"
#include "fracscrew/quadrature.hpp"

using namespace fracscrew;
using nmc::BoxWindow;
using nmc::Classifier;
using nmc::RegionLabel;
using nmc::ScrewSurface;

namespace {

const double kPi = 3.14159265358979323846;

using A3 = std::array<double, 3>;

// Closed form for two intervals: integrating the kernel twice gives the
// four-point combination of f(d) = d^(1-2a). Shares nothing with the panel
// quadrature in the library.
double interval_L_exact(double a0, double a1, double b0, double b1, double alpha) {
    auto f = [&](double d) { return std::pow(d, 1.0 - 2.0 * alpha); };
    return (f(b0 - a0) - f(b0 - a1) - f(b1 - a0) + f(b1 - a1)) /
           (2.0 * alpha * (1.0 - 2.0 * alpha));
}

// Independent oracle for L between axis-aligned boxes: reduce the double
// integral to a correlation integral of the kernel against the product of
// per-axis overlap widths, then integrate in spherical coordinates with
// kink-aligned radial panels. The library instead recurses over sub-box
// pairs in Cartesian coordinates, so the two routes share no structure.
double box_pair_L(const A3& alo, const A3& ahi, const A3& blo, const A3& bhi, double alpha,
                  int nc) {
    const auto& gc = quad::gauss_legendre(nc);
    const auto& gr = quad::gauss_legendre(8);
    const int nphi = 2 * nc;
    const double p = -1.0 - 2.0 * alpha;
    auto wd = [&](int d, double tau) {
        return std::min(ahi[d], bhi[d] - tau) - std::max(alo[d], blo[d] - tau);
    };
    double total = 0.0;
    for (int half = 0; half < 2; ++half) {
        double clo = half == 0 ? -1.0 : 0.0;
        for (int ic = 0; ic < nc; ++ic) {
            double c = clo + 0.5 + 0.5 * gc.x[ic];
            double wc = 0.5 * gc.w[ic];
            double sc = std::sqrt(std::max(0.0, 1.0 - c * c));
            for (int ip = 0; ip < nphi; ++ip) {
                double phi = 2.0 * kPi * (ip + 0.5) / nphi;
                A3 om{sc * std::cos(phi), sc * std::sin(phi), c};

                double rlo = 0.0, rhi = 1e300;
                std::vector<double> cuts;
                bool empty = false;
                for (int d = 0; d < 3 && !empty; ++d) {
                    double lo = blo[d] - ahi[d], hi = bhi[d] - alo[d];
                    if (std::abs(om[d]) < 1e-15) {
                        if (!(lo < 0.0 && 0.0 < hi)) empty = true;
                        continue;
                    }
                    double a = lo / om[d], b = hi / om[d];
                    if (a > b) std::swap(a, b);
                    rlo = std::max(rlo, a);
                    rhi = std::min(rhi, b);
                    for (double k : {blo[d] - alo[d], bhi[d] - ahi[d]}) {
                        double r = k / om[d];
                        if (r > 0.0) cuts.push_back(r);
                    }
                }
                if (empty || rhi <= rlo) continue;
                cuts.push_back(rlo);
                cuts.push_back(rhi);
                std::sort(cuts.begin(), cuts.end());
                std::vector<double> edges;
                for (double r : cuts)
                    if (r >= rlo && r <= rhi && (edges.empty() || r > edges.back()))
                        edges.push_back(r);
                if (edges.size() >= 2 && edges.front() <= 1e-14 * edges.back()) {
                    double e1 = edges[1];
                    std::vector<double> fine;
                    for (int k = 40; k >= 1; --k) fine.push_back(std::ldexp(e1, -k));
                    edges.erase(edges.begin());
                    edges.insert(edges.begin(), fine.begin(), fine.end());
                }
                std::vector<double> dense{edges.front()};
                for (std::size_t e = 1; e < edges.size(); ++e) {
                    double a = edges[e - 1], b = edges[e];
                    int nsub = 1;
                    if (a > 0.0 && b / a > 1.4)
                        nsub = static_cast<int>(std::ceil(std::log(b / a) / std::log(1.4)));
                    for (int s = 1; s <= nsub; ++s)
                        dense.push_back(a * std::pow(b / a, static_cast<double>(s) / nsub));
                }
                double acc = 0.0;
                for (std::size_t e = 0; e + 1 < dense.size(); ++e) {
                    double m = 0.5 * (dense[e] + dense[e + 1]);
                    double h = 0.5 * (dense[e + 1] - dense[e]);
                    if (h <= 0.0) continue;
                    for (std::size_t i = 0; i < gr.x.size(); ++i) {
                        double r = m + h * gr.x[i];
                        double w0 = wd(0, r * om[0]);
                        if (w0 <= 0.0) continue;
                        double w1 = wd(1, r * om[1]);
                        if (w1 <= 0.0) continue;
                        double w2 = wd(2, r * om[2]);
                        if (w2 <= 0.0) continue;
                        acc += gr.w[i] * h * std::pow(r, p) * w0 * w1 * w2;
                    }
                }
                total += wc * (2.0 * kPi / nphi) * acc;
            }
        }
    }
    return total;
}

// the angular error is O(nc^-2); one Richardson step removes it
double box_pair_L_ext(const A3& alo, const A3& ahi, const A3& blo, const A3& bhi, double alpha,
                      int nc = 64) {
    double c = box_pair_L(alo, ahi, blo, bhi, alpha, nc);
    double f = box_pair_L(alo, ahi, blo, bhi, alpha, 2 * nc);
    return f + (f - c) / 3.0;
}

Classifier always(int v) {
    return [v](double, double, double) { return v; };
}

// truncated closed form for the unit ball seen from a point on the sphere:
// the sphere cuts every probe sphere of radius r < 2 in a cap whose signed
// measure integrates, against r^(-1-2a), to the expression below
double ball_truncated_value(double alpha, double rho_max) {
    double a2 = 2.0 * alpha;
    return 4.0 * kPi / a2 *
           (std::pow(2.0, -a2) / (1.0 - a2) - std::pow(rho_max, -a2));
}

}  // namespace

TEST_CASE("classify labels the screw regions and the surface") {
    for (double lam : {kPi, 2.7}) {
        ScrewSurface s(lam);
        CHECK(nmc::classify(1.0, 0.0, lam / 2.0, s) == RegionLabel::Plus);
        CHECK(nmc::classify(1.0, 0.0, 0.0, s) == RegionLabel::Boundary);
        CHECK(nmc::classify(1.0, 0.0, -lam / 2.0, s) == RegionLabel::Minus);
        CHECK(nmc::classify(0.0, 0.0, 0.37, s) == RegionLabel::Boundary);  // axis
    }
}

TEST_CASE("classify is invariant under the screw motion") {
    ScrewSurface s(2.2);
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> u(-3.0, 3.0), ub(-10.0, 10.0);
    int checked = 0;
    for (int k = 0; k < 400; ++k) {
        double x1 = u(rng), x2 = u(rng), x3 = u(rng);
        RegionLabel l0 = nmc::classify(x1, x2, x3, s);
        if (l0 == RegionLabel::Boundary) continue;
        for (int j = 0; j < 5; ++j) {
            double beta = ub(rng);
            double cb = std::cos(beta), sb = std::sin(beta);
            RegionLabel l1 = nmc::classify(cb * x1 - sb * x2, sb * x1 + cb * x2,
                                           x3 + s.lambda * beta / kPi, s);
            CHECK(l1 == l0);
            ++checked;
        }
    }
    CHECK(checked > 1000);
}

TEST_CASE("symmetry map is a distance-preserving involution") {
    ScrewSurface s(1.7);
    std::mt19937_64 rng(72);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    for (int k = 0; k < 1000; ++k) {
        A3 x{u(rng), u(rng), u(rng)};
        A3 y = nmc::symmetry_map(nmc::symmetry_map(x));
        CHECK(y[0] == x[0]);
        CHECK(y[1] == x[1]);
        CHECK(y[2] == x[2]);
    }

    // |f(x) - x0| = |x - x0| for any x0 on the positive x1 axis
    A3 x{1.0, 0.0, s.lambda / 2.0}, x0{2.0, 0.0, 0.0};
    A3 fx = nmc::symmetry_map(x);
    auto d2 = [&](const A3& a, const A3& b) {
        return (a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) +
               (a[2] - b[2]) * (a[2] - b[2]);
    };
    CHECK(d2(fx, x0) == d2(x, x0));
    std::uniform_real_distribution<double> ut(0.1, 3.0);
    for (int k = 0; k < 200; ++k) {
        A3 p{u(rng), u(rng), u(rng)};
        A3 q{ut(rng), 0.0, 0.0};
        CHECK(d2(nmc::symmetry_map(p), q) == doctest::Approx(d2(p, q)).epsilon(1e-14));
    }

    // surface points stay on the surface
    std::uniform_real_distribution<double> uth(-3.0, 3.0);
    for (int k = 0; k < 300; ++k) {
        double t = ut(rng), th = uth(rng);
        A3 p{t * std::cos(th), t * std::sin(th), s.lambda * th / kPi};
        REQUIRE(nmc::classify(p[0], p[1], p[2], s) == RegionLabel::Boundary);
        A3 fp = nmc::symmetry_map(p);
        CHECK(nmc::classify(fp[0], fp[1], fp[2], s) == RegionLabel::Boundary);
    }
}

TEST_CASE("symmetry map sends the plus region onto the minus region") {
    ScrewSurface s(kPi);
    std::mt19937_64 rng(73);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    int plus = 0, mapped_minus = 0;
    while (plus < 100000) {
        double x1 = u(rng), x2 = u(rng), x3 = u(rng);
        if (nmc::classify(x1, x2, x3, s) != RegionLabel::Plus) continue;
        ++plus;
        A3 f = nmc::symmetry_map({x1, x2, x3});
        if (nmc::classify(f[0], f[1], f[2], s) == RegionLabel::Minus) ++mapped_minus;
    }
    CHECK(mapped_minus == plus);
}

TEST_CASE("symmetry map preserves volume under Monte-Carlo sampling") {
    // sample a cube symmetric under the map and count hits in a test box and
    // in its image; both estimate the same volume if the Jacobian modulus is 1
    std::mt19937_64 rng(74);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const A3 blo{0.4, 0.2, -0.7}, bhi{1.4, 1.0, 0.1};
    const int n = 400000;
    int direct = 0, image = 0;
    for (int k = 0; k < n; ++k) {
        A3 y{u(rng), u(rng), u(rng)};
        auto inside = [&](const A3& p) {
            return p[0] > blo[0] && p[0] < bhi[0] && p[1] > blo[1] && p[1] < bhi[1] &&
                   p[2] > blo[2] && p[2] < bhi[2];
        };
        if (inside(y)) ++direct;
        if (inside(nmc::symmetry_map(y))) ++image;
    }
    double p_exact = (1.0 * 0.8 * 0.8) / 64.0;
    double sigma = std::sqrt(n * p_exact * (1.0 - p_exact));
    CHECK(std::abs(direct - n * p_exact) < 6.0 * sigma);
    CHECK(std::abs(image - n * p_exact) < 6.0 * sigma);
    CHECK(std::abs(direct - image) < 8.0 * sigma);
}

TEST_CASE("ball curvature matches the truncated closed form") {
    auto ball = nmc::ball_classifier(1.0);
    nmc::PVQuadrature q;
    q.rho_max = 16.0;
    for (double alpha : {0.1, 0.25, 0.4}) {
        auto r = nmc::nmc_at(ball, {0.0, 0.0, 1.0}, alpha, q);
        double want = ball_truncated_value(alpha, q.rho_max);
        CHECK(r.value > 0.0);  // the complement dominates outside a convex body
        CHECK(r.value == doctest::Approx(want).epsilon(2e-6));
        CHECK(r.pv_extrapolation_error > 0.0);
        CHECK(r.pv_extrapolation_error < 1e-5);
        CHECK(r.node_count > 0);
        // value plus reported tail reproduces the full closed form
        double full = 4.0 * kPi * std::pow(2.0, -2.0 * alpha) /
                      (2.0 * alpha * (1.0 - 2.0 * alpha));
        CHECK(r.value + r.tail_bound == doctest::Approx(full).epsilon(2e-6));
    }

    // alpha = 1/4 collapses to pi (8 sqrt 2 - 2)
    auto r = nmc::nmc_at(ball, {0.0, 0.0, 1.0}, 0.25, q);
    CHECK(r.value == doctest::Approx(kPi * (8.0 * std::sqrt(2.0) - 2.0)).epsilon(1e-6));

    // truncation deficit decays with the predicted order 2 alpha
    nmc::PVQuadrature q2;
    q2.rho_max = 64.0;
    auto r2 = nmc::nmc_at(ball, {0.0, 0.0, 1.0}, 0.25, q2);
    double full = 4.0 * kPi * std::pow(2.0, -0.5) / (0.5 * 0.5);
    double d1 = full - r.value, d2 = full - r2.value;
    double slope = std::log(d1 / d2) / std::log(q2.rho_max / q.rho_max);
    CHECK(slope == doctest::Approx(2.0 * 0.25).epsilon(1e-3));
}

TEST_CASE("half-space curvature vanishes at the origin") {
    nmc::PVQuadrature q;
    auto r = nmc::nmc_at(nmc::halfspace_classifier(), {0.0, 0.0, 0.0}, 0.25, q);
    CHECK(std::abs(r.value) <= r.pv_extrapolation_error);
    CHECK(std::abs(r.value) < 1e-6);
}

TEST_CASE("helicoid curvature vanishes at a surface point") {
    ScrewSurface s(kPi);
    auto cls = nmc::helicoid_classifier(s);
    nmc::PVQuadrature q;
    auto r = nmc::nmc_at(cls, {1.0, 0.0, 0.0}, 0.25, q);
    CHECK(std::abs(r.value) <= r.pv_extrapolation_error);
    CHECK(std::abs(r.value) < 5e-3);
    CHECK(r.pv_extrapolation_error < 1e-4);

    // tighter truncation: still zero within its own error, and the reported
    // tail bound carries the 2 alpha order between the two truncations
    nmc::PVQuadrature q16;
    q16.rho_max = 16.0;
    q16.n_azimuth = 32;
    auto r16 = nmc::nmc_at(cls, {1.0, 0.0, 0.0}, 0.25, q16);
    CHECK(std::abs(r16.value) <= r16.pv_extrapolation_error);
    double order = std::log(r16.tail_bound / r.tail_bound) / std::log(64.0 / 16.0);
    CHECK(order == doctest::Approx(2.0 * 0.25).epsilon(1e-9));

    // subtracting the symmetrized estimate changes nothing: it is exactly zero
    double sym = nmc::nmc_helicoid_symmetrized(1.0, kPi, 0.25, q);
    CHECK(r.value - sym == r.value);
}

TEST_CASE("symmetrized helicoid estimator cancels in pairs") {
    nmc::PVQuadrature q;
    for (double t0 : {0.5, 1.0, 2.0})
        for (double lam : {1.0, kPi})
            for (double alpha : {0.1, 0.25, 0.4}) {
                double v = nmc::nmc_helicoid_symmetrized(t0, lam, alpha, q);
                CHECK(std::abs(v) <= 1e-12);
            }

    // negative control: breaking the pairing pitch leaves a visible residue
    double broken = nmc::nmc_helicoid_symmetrized(1.0, 4.0, 0.25, q, 4.2);
    CHECK(std::abs(broken) > 0.1);
}

TEST_CASE("pv extrapolation reports divergence for a non-surface point") {
    Classifier marked = [](double x, double y, double z) {
        return (x == 0.0 && y == 0.0 && z == 0.0) ? 0 : 1;
    };
    nmc::PVQuadrature q;
    CHECK_THROWS_AS(nmc::nmc_at(marked, {0.0, 0.0, 0.0}, 0.25, q), NonConvergenceError);
    try {
        nmc::nmc_at(marked, {0.0, 0.0, 0.0}, 0.25, q);
    } catch (const NonConvergenceError& e) {
        CHECK(e.residual > 0.0);
        CHECK(e.last_iterate.size() == q.deltas.size());
        for (double v : e.last_iterate) CHECK(std::isfinite(v));
    }
}

TEST_CASE("interval interaction matches the antiderivative oracle") {
    // the two pinned constants
    double v1 = nmc::interaction_L({0.0, 1.0}, {2.0, 3.0}, 0.25);
    CHECK(v1 == doctest::Approx(4.0 * (2.0 * std::sqrt(2.0) - 1.0 - std::sqrt(3.0)))
                    .epsilon(1e-6));
    double v2 = nmc::interaction_L({0.0, 1.0}, {1.0, 2.0}, 0.1);
    CHECK(v2 == doctest::Approx(6.25 * (2.0 - std::pow(2.0, 0.8))).epsilon(1e-6));

    // random pairs against the closed form
    std::mt19937_64 rng(75);
    std::uniform_real_distribution<double> len(0.1, 3.0), gap(0.02, 2.0), ua(0.05, 0.45),
        off(-5.0, 5.0);
    for (int k = 0; k < 25; ++k) {
        double a0 = off(rng), a1 = a0 + len(rng);
        double b0 = a1 + gap(rng), b1 = b0 + len(rng);
        double alpha = ua(rng);
        double v = nmc::interaction_L({a0, a1}, {b0, b1}, alpha);
        CHECK(v == doctest::Approx(interval_L_exact(a0, a1, b0, b1, alpha)).epsilon(1e-10));
    }
    for (int k = 0; k < 15; ++k) {
        double a0 = off(rng), a1 = a0 + len(rng), b1 = a1 + len(rng);
        double alpha = ua(rng);
        double v = nmc::interaction_L({a0, a1}, {a1, b1}, alpha);
        CHECK(v == doctest::Approx(interval_L_exact(a0, a1, a1, b1, alpha)).epsilon(1e-10));
    }

    // symmetric in its arguments, bit for bit
    double ab = nmc::interaction_L({-1.3, 0.2}, {0.9, 2.4}, 0.3);
    double ba = nmc::interaction_L({0.9, 2.4}, {-1.3, 0.2}, 0.3);
    CHECK(ab == ba);

    CHECK_THROWS_AS(nmc::interaction_L({0.0, 1.0}, {0.5, 1.5}, 0.25), std::invalid_argument);
    CHECK_THROWS_AS(nmc::interaction_L({1.0, 0.0}, {2.0, 3.0}, 0.25), std::invalid_argument);
    CHECK_THROWS_AS(nmc::interaction_L({0.0, 1.0}, {2.0, 3.0}, 0.5), std::invalid_argument);
}

TEST_CASE("box interaction matches the spherical correlation oracle") {
    BoxWindow ba{{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}};
    BoxWindow bb{{2.0, 0.0, 0.0}, {3.0, 1.0, 1.0}};
    double v = nmc::interaction_L(always(1), ba, always(1), bb, 0.25);
    double o = box_pair_L_ext({0, 0, 0}, {1, 1, 1}, {2, 0, 0}, {3, 1, 1}, 0.25);
    CHECK(v == doctest::Approx(o).epsilon(1e-5));

    BoxWindow bt{{1.0, 0.0, 0.0}, {2.0, 1.0, 1.0}};
    double vt = nmc::interaction_L(always(1), ba, always(1), bt, 0.25);
    double ot = box_pair_L_ext({0, 0, 0}, {1, 1, 1}, {1, 0, 0}, {2, 1, 1}, 0.25);
    CHECK(vt == doctest::Approx(ot).epsilon(1e-4));

    double vs = nmc::interaction_L(always(1), bb, always(1), ba, 0.25);
    CHECK(v == vs);

    BoxWindow ov{{0.5, 0.0, 0.0}, {1.5, 1.0, 1.0}};
    CHECK_THROWS_AS(nmc::interaction_L(always(1), ba, always(1), ov, 0.25),
                    std::invalid_argument);
}

TEST_CASE("half-space perimeter matches the correlation oracle") {
    const double alpha = 0.25, R = 64.0;
    BoxWindow om{{-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5}};
    nmc::PVQuadrature q;
    q.rho_max = R;
    auto pr = nmc::fractional_perimeter(nmc::halfspace_classifier(), om, alpha, q);

    // the two defining terms, assembled from box pairs: the window part of
    // the set against the truncated complement, and the outside part (the
    // truncated set minus its window part) against the complement window
    double o1 = box_pair_L_ext({-0.5, -0.5, -0.5}, {0.5, 0.5, 0.0},
                               {-R, -R, 0.0}, {R, R, R}, alpha);
    double o2a = box_pair_L_ext({-R, -R, -R}, {R, R, 0.0},
                                {-0.5, -0.5, 0.0}, {0.5, 0.5, 0.5}, alpha);
    double o2b = box_pair_L_ext({-0.5, -0.5, -0.5}, {0.5, 0.5, 0.0},
                                {-0.5, -0.5, 0.0}, {0.5, 0.5, 0.5}, alpha);
    double want = o1 + o2a - o2b;
    CHECK(pr.value == doctest::Approx(want).epsilon(1e-4));
    CHECK(pr.tail_bound > 0.0);
    CHECK(pr.node_count > 0);
}

TEST_CASE("perimeter of the empty set is zero") {
    nmc::PVQuadrature q;
    BoxWindow om{{-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5}};
    auto pr = nmc::fractional_perimeter(always(-1), om, 0.25, q);
    CHECK(pr.value == 0.0);
}

TEST_CASE("perimeter obeys the scaling law s^(3-2a)") {
    const double alpha = 0.25;
    nmc::PVQuadrature q1, q2;
    q1.rho_max = 64.0;
    q2.rho_max = 128.0;  // truncation scaled with the window
    BoxWindow om1{{-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5}};
    BoxWindow om2{{-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0}};
    auto p1 = nmc::fractional_perimeter(nmc::halfspace_classifier(), om1, alpha, q1);
    auto p2 = nmc::fractional_perimeter(nmc::halfspace_classifier(), om2, alpha, q2);
    double expo = std::log(p2.value / p1.value) / std::log(2.0);
    CHECK(expo == doctest::Approx(3.0 - 2.0 * alpha).epsilon(1e-2));
}

TEST_CASE("domain validation rejects bad arguments") {
    nmc::PVQuadrature q;
    auto ball = nmc::ball_classifier(1.0);
    CHECK_THROWS_AS(ScrewSurface(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(nmc::ball_classifier(0.0), std::invalid_argument);
    CHECK_THROWS_AS(nmc::nmc_at(ball, {0.0, 0.0, 0.5}, 0.25, q), std::invalid_argument);
    CHECK_THROWS_AS(nmc::nmc_at(ball, {0.0, 0.0, 1.0}, 0.0, q), std::invalid_argument);
    CHECK_THROWS_AS(nmc::nmc_at(ball, {0.0, 0.0, 1.0}, 0.5, q), std::invalid_argument);
    {
        nmc::PVQuadrature bad;
        bad.rho_max = 5.0;
        CHECK_THROWS_AS(nmc::nmc_at(ball, {0.0, 0.0, 1.0}, 0.25, bad), std::invalid_argument);
    }
    {
        nmc::PVQuadrature bad;
        bad.deltas = {0.08};
        CHECK_THROWS_AS(nmc::nmc_at(ball, {0.0, 0.0, 1.0}, 0.25, bad), std::invalid_argument);
    }
    {
        nmc::PVQuadrature bad;
        bad.deltas = {30.0, 20.0};
        CHECK_THROWS_AS(nmc::nmc_at(ball, {0.0, 0.0, 1.0}, 0.25, bad), std::invalid_argument);
    }
    CHECK_THROWS_AS(nmc::nmc_helicoid_symmetrized(0.0, kPi, 0.25, q), std::invalid_argument);
    {
        BoxWindow degenerate{{0.0, 0.0, 0.0}, {0.0, 1.0, 1.0}};
        BoxWindow fine{{2.0, 0.0, 0.0}, {3.0, 1.0, 1.0}};
        CHECK_THROWS_AS(nmc::interaction_L(always(1), degenerate, always(1), fine, 0.25),
                        std::invalid_argument);
        nmc::PVQuadrature bad;
        bad.rho_max = 3.0;
        BoxWindow om{{-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5}};
        CHECK_THROWS_AS(nmc::fractional_perimeter(always(1), om, 0.25, bad),
                        std::invalid_argument);
    }
}
