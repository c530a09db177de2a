#include "fracscrew/nmc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <utility>

#include "fracscrew/errors.hpp"
#include "fracscrew/quadrature.hpp"
#include "fracscrew/threading.hpp"

namespace fracscrew::nmc {

namespace {

constexpr double kBand = 1e-12;  // boundary detection band for classifiers

void require_alpha(double alpha, const char* who) {
    if (!(alpha > 0.0) || !(alpha < 0.5))
        throw std::invalid_argument(std::string(who) + ": alpha must lie in (0, 1/2)");
}

int label_sign(RegionLabel l) {
    return l == RegionLabel::Plus ? 1 : (l == RegionLabel::Minus ? -1 : 0);
}

// ---------------------------------------------------------------------------
// shell quadrature: kernel is constant on a sphere around the base point, so
// the angular factor is the signed measure of the set on that sphere. Each
// polar circle is handled by scanning for sign transitions and bisecting
// them to full precision, which keeps the arc integral exact; the polar
// direction uses midpoint Gauss panels refined adaptively. Node placement is
// symmetric under (c, beta) -> (-c, -beta), so for sets that are odd under
// the matching reflection the two hemispheres cancel to rounding.
// ---------------------------------------------------------------------------

struct ShellFrame {
    const Classifier* cls;
    std::array<double, 3> x0;
    int n_azimuth;
    long* nodes;
};

int sample_sign(const ShellFrame& fr, double rho, double sps, double cps, double beta) {
    ++*fr.nodes;
    int s = (*fr.cls)(fr.x0[0] + rho * sps * std::cos(beta),
                      fr.x0[1] + rho * sps * std::sin(beta), fr.x0[2] + rho * cps);
    if (s == 0) {  // node fell into the boundary band; nudge it off
        ++*fr.nodes;
        double b = beta + 7.3e-9;
        s = (*fr.cls)(fr.x0[0] + rho * sps * std::cos(b), fr.x0[1] + rho * sps * std::sin(b),
                      fr.x0[2] + rho * cps);
        if (s == 0) s = 1;
    }
    return s;
}

double bisect_crossing(const ShellFrame& fr, double rho, double sps, double cps, double blo,
                       double bhi, int slo) {
    for (int it = 0; it < 46; ++it) {
        double mid = 0.5 * (blo + bhi);
        if (sample_sign(fr, rho, sps, cps, mid) == slo)
            blo = mid;
        else
            bhi = mid;
    }
    return 0.5 * (blo + bhi);
}

// signed azimuthal measure (arc inside minus arc outside) of the circle at
// polar height c on the sphere of radius rho
double signed_arcs(const ShellFrame& fr, double rho, double c) {
    double sps = std::sqrt(std::max(0.0, 1.0 - c * c));
    const int M = fr.n_azimuth;
    const double step = 2.0 * M_PI / M;
    const double off = 0.5 * step;  // grid is closed under beta -> -beta (mod 2pi)
    if (sps < 1e-15) return 2.0 * M_PI * sample_sign(fr, rho, sps, c, off);

    std::vector<int> s(M);
    for (int m = 0; m < M; ++m) s[m] = sample_sign(fr, rho, sps, c, off + m * step);

    std::vector<double> xs;
    std::vector<int> rs;  // sign immediately after each crossing
    for (int m = 0; m < M; ++m) {
        int mn = (m + 1) % M;
        if (s[m] != s[mn]) {
            xs.push_back(
                bisect_crossing(fr, rho, sps, c, off + m * step, off + (m + 1) * step, s[m]));
            rs.push_back(s[mn]);
        }
    }
    if (xs.empty()) return 2.0 * M_PI * s[0];

    double total = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        double b1 = (k + 1 < xs.size()) ? xs[k + 1] : xs[0] + 2.0 * M_PI;
        total += rs[k] * (b1 - xs[k]);
    }
    return total;
}

// azimuthal arcs where the classifier is +1, as [lo, hi) angle pairs
std::vector<std::pair<double, double>> plus_arcs(const ShellFrame& fr, double rho, double c) {
    double sps = std::sqrt(std::max(0.0, 1.0 - c * c));
    const int M = fr.n_azimuth;
    const double step = 2.0 * M_PI / M;
    const double off = 0.5 * step;
    std::vector<std::pair<double, double>> out;
    if (sps < 1e-15) {
        if (sample_sign(fr, rho, sps, c, off) == 1) out.emplace_back(0.0, 2.0 * M_PI);
        return out;
    }
    std::vector<int> s(M);
    for (int m = 0; m < M; ++m) s[m] = sample_sign(fr, rho, sps, c, off + m * step);
    std::vector<double> xs;
    std::vector<int> rs;
    for (int m = 0; m < M; ++m) {
        int mn = (m + 1) % M;
        if (s[m] != s[mn]) {
            xs.push_back(
                bisect_crossing(fr, rho, sps, c, off + m * step, off + (m + 1) * step, s[m]));
            rs.push_back(s[mn]);
        }
    }
    if (xs.empty()) {
        if (s[0] == 1) out.emplace_back(0.0, 2.0 * M_PI);
        return out;
    }
    for (std::size_t k = 0; k < xs.size(); ++k) {
        if (rs[k] != 1) continue;
        double b1 = (k + 1 < xs.size()) ? xs[k + 1] : xs[0] + 2.0 * M_PI;
        out.emplace_back(xs[k], b1);
    }
    return out;
}

// 4-point Gauss panel, summed pairwise so a mirrored panel yields the exact
// negation when the integrand is odd
template <class F>
double gl4_panel(const F& f, double a, double b) {
    static const double xi[2] = {0.3399810435848563, 0.8611363115940526};
    static const double wt[2] = {0.6521451548625461, 0.3478548451374538};
    double m = 0.5 * (a + b), h = 0.5 * (b - a);
    double total = 0.0;
    for (int k = 0; k < 2; ++k) {
        double t = h * xi[k];
        total += wt[k] * (f(m + t) + f(m - t));
    }
    return h * total;
}

template <class F>
double polar_rec(const F& f, double a, double b, double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double left = gl4_panel(f, a, m), right = gl4_panel(f, m, b);
    double sum = left + right;
    if (depth <= 0 || std::abs(sum - whole) <= tol) return sum;
    return polar_rec(f, a, m, left, 0.5 * tol, depth - 1) +
           polar_rec(f, m, b, right, 0.5 * tol, depth - 1);
}

// signed spherical measure of the set on the sphere of radius rho (inside
// minus outside). The arc profile is piecewise smooth in the polar height
// but jumps where the circle topology flips (a sphere tangent to the set
// boundary flips between fully inside and fully outside, and adaptive
// panels alone cannot see a jump hiding between their nodes), so flips are
// located by scanning a symmetric grid and bisecting before the smooth
// pieces integrate adaptively. The grid, the bisections and the panels are
// all symmetric under (c, beta) -> (-c, -beta), so configurations that are
// odd under the matching reflection cancel to rounding.
double sphere_signed_measure(const ShellFrame& fr, double rho, double tol, int depth) {
    auto f = [&](double c) { return signed_arcs(fr, rho, c); };
    const int nc = 26;  // poles included so no flip can hide beyond the scan
    std::array<double, nc> cg, av;
    cg[0] = -1.0;
    cg[nc - 1] = 1.0;
    for (int k = 1; k + 1 < nc; ++k) cg[k] = -1.0 + (k - 0.5) * (2.0 / (nc - 2));
    for (int k = 0; k < nc; ++k) av[k] = f(cg[k]);
    std::vector<double> edges{-1.0, 0.0, 1.0};
    for (int k = 0; k + 1 < nc; ++k) {
        if (std::abs(av[k + 1] - av[k]) <= 1.0) continue;
        double lo = cg[k], hi = cg[k + 1], al = av[k], ah = av[k + 1];
        for (int it = 0; it < 46; ++it) {
            double m = 0.5 * (lo + hi), am = f(m);
            if (std::abs(am - al) <= std::abs(am - ah)) {
                lo = m;
                al = am;
            } else {
                hi = m;
                ah = am;
            }
        }
        edges.push_back(0.5 * (lo + hi));
    }
    std::sort(edges.begin(), edges.end());
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
        double a = edges[k], b = edges[k + 1];
        if (!(b > a)) continue;
        total += polar_rec(f, a, b, gl4_panel(f, a, b), tol, depth);
    }
    return total;
}

std::vector<double> sorted_deltas(const std::vector<double>& in, double rho_max,
                                  const char* who) {
    if (in.size() < 2)
        throw std::invalid_argument(std::string(who) +
                                    ": need at least two exclusion radii to extrapolate");
    std::vector<double> d = in;
    std::sort(d.begin(), d.end());
    if (!(d.front() > 0.0))
        throw std::invalid_argument(std::string(who) + ": exclusion radii must be positive");
    if (!(d.back() < 0.25 * rho_max))
        throw std::invalid_argument(std::string(who) +
                                    ": exclusion radii must be well inside rho_max");
    for (std::size_t k = 1; k < d.size(); ++k)
        if (d[k] - d[k - 1] <= 1e-9 * d[k])
            throw std::invalid_argument(std::string(who) + ": exclusion radii must be distinct");
    return d;
}

// ---------------------------------------------------------------------------
// box machinery for set interactions: sets are resolved into pure boxes by
// sampled bisection, and pure box pairs integrate through the correlation
// form  L(A,B) = int K(t) vol(A cap (B+t)) dt,  whose weight is a product of
// one-dimensional overlap trapezoids. The weight vanishes where the boxes
// touch, so grading the integration toward t = 0 tames the kernel.
// ---------------------------------------------------------------------------

struct Box3 {
    std::array<double, 3> lo, hi;
    double extent(int d) const { return hi[d] - lo[d]; }
    double max_extent() const {
        return std::max({extent(0), extent(1), extent(2)});
    }
    double volume() const { return extent(0) * extent(1) * extent(2); }
};

int sampled_purity(const Classifier& cls, const Box3& b, long& nodes) {
    static const double u[5] = {0.02, 0.26, 0.5, 0.74, 0.98};
    int first = 0;
    for (double ux : u)
        for (double uy : u)
            for (double uz : u) {
                ++nodes;
                int s = cls(b.lo[0] + ux * b.extent(0), b.lo[1] + uy * b.extent(1),
                            b.lo[2] + uz * b.extent(2));
                if (s == 0) return 0;
                if (first == 0)
                    first = s;
                else if (s != first)
                    return 0;
            }
    return first;
}

void decompose(const Classifier& cls, const Box3& b, int want, int depth,
               std::vector<Box3>& out, long& nodes) {
    int p = sampled_purity(cls, b, nodes);
    if (p == want) {
        out.push_back(b);
        return;
    }
    if (p != 0) return;
    int ax = 0;
    for (int d = 1; d < 3; ++d)
        if (b.extent(d) > b.extent(ax)) ax = d;
    // halving a stretched box is free: a long shell sliver must not burn its
    // whole budget on aspect alone before the short axis is ever reached
    bool stretched =
        b.extent(ax) > 4.0 * std::min({b.extent(0), b.extent(1), b.extent(2)});
    if (depth <= 0 && !stretched) {
        ++nodes;
        if (cls(0.5 * (b.lo[0] + b.hi[0]), 0.5 * (b.lo[1] + b.hi[1]),
                0.5 * (b.lo[2] + b.hi[2])) == want)
            out.push_back(b);
        return;
    }
    double mid = 0.5 * (b.lo[ax] + b.hi[ax]);
    Box3 a = b, c = b;
    a.hi[ax] = mid;
    c.lo[ax] = mid;
    decompose(cls, a, want, stretched ? depth : depth - 1, out, nodes);
    decompose(cls, c, want, stretched ? depth : depth - 1, out, nodes);
}

double box_origin_dist2(const Box3& b) {
    double d2 = 0.0;
    for (int d = 0; d < 3; ++d) {
        double c = 0.0;
        if (b.lo[d] > 0.0) c = b.lo[d];
        if (b.hi[d] < 0.0) c = b.hi[d];
        d2 += c * c;
    }
    return d2;
}

template <class F>
double corr_rec(const F& f, const Box3& b, double scale0, long& nodes) {
    double ext = b.max_extent();
    if (box_origin_dist2(b) >= 2.25 * ext * ext) {
        const auto& g = quad::gauss_legendre(6);
        double sum = 0.0;
        double c0 = 0.5 * (b.lo[0] + b.hi[0]), h0 = 0.5 * b.extent(0);
        double c1 = 0.5 * (b.lo[1] + b.hi[1]), h1 = 0.5 * b.extent(1);
        double c2 = 0.5 * (b.lo[2] + b.hi[2]), h2 = 0.5 * b.extent(2);
        for (std::size_t i = 0; i < g.x.size(); ++i)
            for (std::size_t j = 0; j < g.x.size(); ++j)
                for (std::size_t k = 0; k < g.x.size(); ++k) {
                    ++nodes;
                    sum += g.w[i] * g.w[j] * g.w[k] *
                           f(c0 + h0 * g.x[i], c1 + h1 * g.x[j], c2 + h2 * g.x[k]);
                }
        return sum * h0 * h1 * h2;
    }
    if (ext < 1e-13 * scale0) return 0.0;  // weight vanishes at the contact point
    int ax = 0;
    for (int d = 1; d < 3; ++d)
        if (b.extent(d) > b.extent(ax)) ax = d;
    Box3 a = b, c = b;
    double mid = 0.5 * (b.lo[ax] + b.hi[ax]);
    a.hi[ax] = mid;
    c.lo[ax] = mid;
    return corr_rec(f, a, scale0, nodes) + corr_rec(f, c, scale0, nodes);
}

double l_corr(const Box3& A, const Box3& B, double alpha, long& nodes) {
    Box3 S;
    for (int d = 0; d < 3; ++d) {
        S.lo[d] = A.lo[d] - B.hi[d];
        S.hi[d] = A.hi[d] - B.lo[d];
    }
    const double p = -0.5 * (3.0 + 2.0 * alpha);
    auto f = [&](double t0, double t1, double t2) {
        double w = std::min(A.hi[0], B.hi[0] + t0) - std::max(A.lo[0], B.lo[0] + t0);
        if (w <= 0.0) return 0.0;
        double w1 = std::min(A.hi[1], B.hi[1] + t1) - std::max(A.lo[1], B.lo[1] + t1);
        if (w1 <= 0.0) return 0.0;
        double w2 = std::min(A.hi[2], B.hi[2] + t2) - std::max(A.lo[2], B.lo[2] + t2);
        if (w2 <= 0.0) return 0.0;
        return w * w1 * w2 * std::pow(t0 * t0 + t1 * t1 + t2 * t2, p);
    };
    // split the support at the singular point so every piece has it at a
    // corner, and at the overlap kinks so the weight is trilinear per piece
    std::vector<Box3> parts{S};
    for (int d = 0; d < 3; ++d) {
        std::vector<double> cs;
        for (double cv : {0.0, A.lo[d] - B.lo[d], A.hi[d] - B.hi[d]})
            if (cv > S.lo[d] && cv < S.hi[d]) cs.push_back(cv);
        std::sort(cs.begin(), cs.end());
        cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
        std::vector<Box3> next;
        for (const Box3& b : parts) {
            double lo = b.lo[d];
            for (double cv : cs)
                if (cv > lo && cv < b.hi[d]) {
                    Box3 a = b;
                    a.lo[d] = lo;
                    a.hi[d] = cv;
                    next.push_back(a);
                    lo = cv;
                }
            Box3 a = b;
            a.lo[d] = lo;
            next.push_back(a);
        }
        parts.swap(next);
    }
    double scale0 = S.max_extent();
    double total = 0.0;
    for (const Box3& b : parts) total += corr_rec(f, b, scale0, nodes);
    return total;
}

Box3 to_box(const BoxWindow& w, const char* who) {
    for (int d = 0; d < 3; ++d)
        if (!(w.hi[d] > w.lo[d]))
            throw std::invalid_argument(std::string(who) + ": degenerate box");
    return Box3{w.lo, w.hi};
}

double paired_sum(const std::vector<std::pair<Box3, Box3>>& pairs, double alpha, long& nodes) {
    std::atomic<long> tally{0};
    std::vector<double> parts = threading::parallel_map(pairs.size(), [&](std::size_t k) {
        long local = 0;
        double v = l_corr(pairs[k].first, pairs[k].second, alpha, local);
        tally += local;
        return v;
    });
    double total = 0.0;
    for (double v : parts) total += v;
    nodes += tally.load();
    return total;
}

}  // namespace

// ---------------------------------------------------------------------------

ScrewSurface::ScrewSurface(double lambda_) : lambda(lambda_) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("ScrewSurface: pitch must be positive and finite");
}

RegionLabel classify(double x1, double x2, double x3, const ScrewSurface& s) {
    if (x1 == 0.0 && x2 == 0.0) return RegionLabel::Boundary;  // the axis lies on both sheets
    double g = std::fmod(M_PI * x3 / s.lambda - std::atan2(x2, x1), 2.0 * M_PI);
    if (g < 0.0) g += 2.0 * M_PI;
    if (g < kBand || 2.0 * M_PI - g < kBand || std::abs(g - M_PI) < kBand)
        return RegionLabel::Boundary;
    return g < M_PI ? RegionLabel::Plus : RegionLabel::Minus;
}

std::array<double, 3> symmetry_map(const std::array<double, 3>& x) {
    return {x[0], -x[1], -x[2]};
}

Classifier helicoid_classifier(const ScrewSurface& s) {
    ScrewSurface surf = s;
    return [surf](double x1, double x2, double x3) {
        return label_sign(classify(x1, x2, x3, surf));
    };
}

Classifier halfspace_classifier() {
    return [](double, double, double x3) {
        if (std::abs(x3) < kBand) return 0;
        return x3 < 0.0 ? 1 : -1;
    };
}

Classifier ball_classifier(double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("ball_classifier: radius must be positive");
    return [radius](double x1, double x2, double x3) {
        double d = std::sqrt(x1 * x1 + x2 * x2 + x3 * x3);
        if (std::abs(d - radius) < kBand * std::max(1.0, radius)) return 0;
        return d < radius ? 1 : -1;
    };
}

NmcResult nmc_at(const Classifier& cls, const std::array<double, 3>& x0, double alpha,
                 const PVQuadrature& q) {
    require_alpha(alpha, "nmc_at");
    double r0 = std::sqrt(x0[0] * x0[0] + x0[1] * x0[1] + x0[2] * x0[2]);
    if (!(q.rho_max > 10.0 * std::max(1.0, r0)))
        throw std::invalid_argument("nmc_at: rho_max must exceed 10 max(1, |x0|)");
    if (q.n_azimuth < 8 || q.polar_depth < 4 || q.radial_depth < 4)
        throw std::invalid_argument("nmc_at: quadrature resolutions too small");
    if (cls(x0[0], x0[1], x0[2]) != 0)
        throw std::invalid_argument("nmc_at: x0 is not on the boundary of the set");

    std::vector<double> d = sorted_deltas(q.deltas, q.rho_max, "nmc_at");
    const std::size_t K = d.size();

    long nodes = 0;
    ShellFrame fr{&cls, x0, q.n_azimuth, &nodes};

    // complement minus set on each sphere; positive where the complement
    // dominates, so a convex body comes out positive
    auto asym = [&](double rho) {
        return -sphere_signed_measure(fr, rho, 1e-9, q.polar_depth);
    };
    // radius integral in log coordinates, split at every exclusion radius
    auto integrand = [&](double u) {
        double rho = std::exp(u);
        return std::pow(rho, -2.0 * alpha) * asym(rho);
    };
    const double abs_mass =
        4.0 * M_PI * (std::pow(d.front(), -2.0 * alpha) - std::pow(q.rho_max, -2.0 * alpha)) /
        (2.0 * alpha);
    const double seg_tol = 3e-10 * abs_mass + 1e-14;

    // embedded-error panels with a hard work cap: each shell evaluation is a
    // full sphere scan, and the scan noise would defeat any tolerance that
    // shrinks with depth, so refinement is greedy and budgeted instead
    const int max_panels = 16 + 8 * q.radial_depth;
    struct Panel {
        double a, b, v, e;
    };
    auto make_panel = [&](double a, double b) {
        const auto& g8 = quad::gauss_legendre(8);
        const auto& g4 = quad::gauss_legendre(4);
        double c = 0.5 * (a + b), h = 0.5 * (b - a);
        double v8 = 0.0, v4 = 0.0;
        for (int i = 0; i < 8; ++i) v8 += g8.w[i] * integrand(c + h * g8.x[i]);
        for (int i = 0; i < 4; ++i) v4 += g4.w[i] * integrand(c + h * g4.x[i]);
        return Panel{a, b, v8 * h, std::abs(v8 - v4) * h};
    };
    auto segment_integral = [&](double ua, double ub) {
        std::vector<Panel> ps;
        for (int i = 0; i < 16; ++i)
            ps.push_back(make_panel(ua + (ub - ua) * i / 16.0, ua + (ub - ua) * (i + 1) / 16.0));
        while ((int)ps.size() < max_panels) {
            double etot = 0.0;
            std::size_t worst = 0;
            for (std::size_t i = 0; i < ps.size(); ++i) {
                etot += ps[i].e;
                if (ps[i].e > ps[worst].e) worst = i;
            }
            if (etot <= seg_tol) break;
            Panel w = ps[worst];
            double m = 0.5 * (w.a + w.b);
            ps[worst] = make_panel(w.a, m);
            ps.push_back(make_panel(m, w.b));
        }
        std::sort(ps.begin(), ps.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
        double total = 0.0;
        for (const Panel& p : ps) total += p.v;
        return total;
    };

    std::vector<double> edges(d.begin(), d.end());
    edges.push_back(q.rho_max);
    std::vector<double> segs(K);
    for (std::size_t i = 0; i < K; ++i)
        segs[i] = segment_integral(std::log(edges[i]), std::log(edges[i + 1]));

    std::vector<double> v(K);  // v[k] = integral from d[k] out to rho_max
    double cum = 0.0;
    for (std::size_t i = K; i-- > 0;) {
        cum += segs[i];
        v[i] = cum;
    }

    // eliminate the leading delta^(1-2a) PV term between consecutive radii
    const double p = 1.0 - 2.0 * alpha;
    std::vector<double> t(K), e(K - 1);
    for (std::size_t k = 0; k < K; ++k) t[k] = std::pow(d[k], p);
    for (std::size_t k = 0; k + 1 < K; ++k)
        e[k] = (v[k] * t[k + 1] - v[k + 1] * t[k]) / (t[k + 1] - t[k]);

    double value = e.front();
    // the reported error never drops below the radial integration budget
    double floor = 3.0e-10 * abs_mass + 1e-300;
    double spread = K >= 3 ? std::abs(e[0] - e[1]) : std::abs(e[0] - v[0]);
    if (K >= 3) {
        double raw = std::abs(v[0] - v[1]);
        if (spread > 1.2 * raw + floor && spread > 1e-6 * (1.0 + std::abs(value)))
            throw NonConvergenceError("nmc_at: principal value extrapolation diverged", spread,
                                      v);
    }
    NmcResult out;
    out.value = value;
    out.pv_extrapolation_error = std::max(spread, floor);
    out.tail_bound = 4.0 * M_PI * std::pow(q.rho_max, -2.0 * alpha) / (2.0 * alpha);
    out.node_count = nodes;
    return out;
}

double nmc_helicoid_symmetrized(double t0, double lambda, double alpha, const PVQuadrature& q,
                                double lambda_pair) {
    require_alpha(alpha, "nmc_helicoid_symmetrized");
    if (!(t0 > 0.0))
        throw std::invalid_argument("nmc_helicoid_symmetrized: t0 must be positive");
    if (!(q.rho_max > 10.0 * std::max(1.0, t0)))
        throw std::invalid_argument("nmc_helicoid_symmetrized: rho_max must exceed 10 max(1, t0)");
    if (lambda_pair == 0.0) lambda_pair = lambda;
    ScrewSurface surf(lambda);
    ScrewSurface paired(lambda_pair);
    Classifier cls = helicoid_classifier(surf);
    const double ratio = paired.lambda / surf.lambda;

    std::array<double, 3> x0{t0, 0.0, 0.0};
    long nodes = 0;
    ShellFrame fr{&cls, x0, q.n_azimuth, &nodes};

    double delta = *std::min_element(q.deltas.begin(), q.deltas.end());
    if (!(delta > 0.0))
        throw std::invalid_argument("nmc_helicoid_symmetrized: exclusion radii must be positive");

    const double p = -0.5 * (3.0 + 2.0 * alpha);  // exponent on squared distance
    const auto& gr = quad::gauss_legendre(6);
    const auto& gc = quad::gauss_legendre(12);
    const auto& gb = quad::gauss_legendre(4);

    // integrate over the Plus chamber only; every sample is paired with its
    // image under the chamber swap, whose squared distance to x0 agrees
    // bitwise, so the lambda_pair == lambda sum cancels term by term
    const int npan = 48;
    const double lr = std::log(q.rho_max / delta) / npan;
    double total = 0.0;
    for (int ip = 0; ip < npan; ++ip) {
        double ra = delta * std::exp(ip * lr), rb = delta * std::exp((ip + 1) * lr);
        double rc = 0.5 * (ra + rb), rh = 0.5 * (rb - ra);
        for (std::size_t i = 0; i < gr.x.size(); ++i) {
            double rho = rc + rh * gr.x[i];
            double wr = rh * gr.w[i] * rho * rho;
            for (std::size_t j = 0; j < gc.x.size(); ++j) {
                double c = 0.5 * gc.x[j] + 0.5;  // [0,1]; the lower hemisphere
                for (int hemi = 0; hemi < 2; ++hemi) {  // comes from c -> -c
                    double cc = hemi == 0 ? c : -c;
                    double wc = 0.5 * gc.w[j];
                    double sps = std::sqrt(std::max(0.0, 1.0 - cc * cc));
                    for (const auto& arc : plus_arcs(fr, rho, cc)) {
                        double bc = 0.5 * (arc.first + arc.second);
                        double bh = 0.5 * (arc.second - arc.first);
                        for (std::size_t kb = 0; kb < gb.x.size(); ++kb) {
                            double beta = bc + bh * gb.x[kb];
                            double x1 = x0[0] + rho * sps * std::cos(beta);
                            double x2 = x0[1] + rho * sps * std::sin(beta);
                            double x3 = x0[2] + rho * cc;
                            double dx = x1 - t0;
                            double d2p = dx * dx + x2 * x2 + x3 * x3;
                            double y2 = -x2, y3 = -x3 * ratio;
                            double d2m = dx * dx + y2 * y2 + y3 * y3;
                            total += wr * wc * bh * gb.w[kb] *
                                     (std::pow(d2p, p) - std::pow(d2m, p));
                        }
                    }
                }
            }
        }
    }
    return total;
}

double interaction_L(const Interval& A0, const Interval& B0, double alpha) {
    require_alpha(alpha, "interaction_L");
    if (!(A0.hi > A0.lo) || !(B0.hi > B0.lo))
        throw std::invalid_argument("interaction_L: degenerate interval");
    Interval A = A0, B = B0;
    double scale = std::max({std::abs(A.lo), std::abs(A.hi), std::abs(B.lo), std::abs(B.hi)});
    if (std::min(A.hi, B.hi) - std::max(A.lo, B.lo) > 1e-12 * scale)
        throw std::invalid_argument("interaction_L: intervals overlap");
    if (B.lo < A.lo || (B.lo == A.lo && B.hi < A.hi)) std::swap(A, B);

    // work in offsets from the facing endpoints: x = A.hi - u, y = B.lo + v,
    // so the node distance gap + u + v never suffers cancellation even in the
    // cells a few ulps from the contact point
    const double gap = std::max(B.lo - A.hi, 0.0);
    const double la = A.hi - A.lo, lb = B.hi - B.lo;

    // panels graded geometrically toward offset zero; grading stops before
    // float granularity so no panel collapses onto the contact point
    auto graded = [](double len) {
        std::vector<double> e{0.0};
        for (int k = 44; k >= 1; --k) {
            double v = std::ldexp(len, -k);
            if (v > e.back() && v < len) e.push_back(v);
        }
        e.push_back(len);
        return e;
    };
    std::vector<double> eu = graded(la);
    std::vector<double> ev = graded(lb);
    const auto& g = quad::gauss_legendre(10);
    const double pk = -(1.0 + 2.0 * alpha);
    const bool touching = gap == 0.0;
    double total = 0.0;
    for (std::size_t iu = 0; iu + 1 < eu.size(); ++iu) {
        for (std::size_t iv = 0; iv + 1 < ev.size(); ++iv) {
            if (touching && iu == 0 && iv == 0) {
                // the cell at the contact corner holds w^(1-2a)-scale mass no
                // node placement can resolve; use the local kernel primitive
                double wa = eu[1], wb = ev[1];
                double q = 1.0 - 2.0 * alpha;
                total += (std::pow(wa, q) + std::pow(wb, q) - std::pow(wa + wb, q)) /
                         (2.0 * alpha * q);
                continue;
            }
            // cells hugging the contact diagonal see the distance vary by a
            // large factor; bisect until the nodes face a mild ratio
            auto cell = [&](auto&& self, double ua, double ub, double va, double vb,
                            int depth) -> double {
                double dmin = gap + ua + va, dmax = gap + ub + vb;
                if (depth > 0 && dmin > 0.0 && dmax > 4.0 * dmin) {
                    double um = 0.5 * (ua + ub), vm = 0.5 * (va + vb);
                    return self(self, ua, um, va, vm, depth - 1) +
                           self(self, ua, um, vm, vb, depth - 1) +
                           self(self, um, ub, va, vm, depth - 1) +
                           self(self, um, ub, vm, vb, depth - 1);
                }
                double cu = 0.5 * (ua + ub), hu = 0.5 * (ub - ua);
                double cv = 0.5 * (va + vb), hv = 0.5 * (vb - va);
                double acc = 0.0;
                for (std::size_t i = 0; i < g.x.size(); ++i)
                    for (std::size_t j = 0; j < g.x.size(); ++j) {
                        double d = gap + (cu + hu * g.x[i]) + (cv + hv * g.x[j]);
                        if (d > 0.0) acc += g.w[i] * g.w[j] * std::pow(d, pk);
                    }
                return acc * hu * hv;
            };
            total += cell(cell, eu[iu], eu[iu + 1], ev[iv], ev[iv + 1], 10);
        }
    }
    return total;
}

double interaction_L(const Classifier& A, const BoxWindow& boxA, const Classifier& B,
                     const BoxWindow& boxB, double alpha, int split_depth) {
    require_alpha(alpha, "interaction_L");
    Box3 ba = to_box(boxA, "interaction_L");
    Box3 bb = to_box(boxB, "interaction_L");
    const Classifier* ca = &A;
    const Classifier* cb = &B;
    // canonical order makes the symmetric call bitwise identical
    if (std::lexicographical_compare(bb.lo.begin(), bb.lo.end(), ba.lo.begin(), ba.lo.end())) {
        std::swap(ba, bb);
        std::swap(ca, cb);
    }
    long nodes = 0;
    std::vector<Box3> pa, pb;
    decompose(*ca, ba, 1, split_depth, pa, nodes);
    decompose(*cb, bb, 1, split_depth, pb, nodes);
    double scale = std::max(ba.max_extent(), bb.max_extent());
    std::vector<std::pair<Box3, Box3>> pairs;
    pairs.reserve(pa.size() * pb.size());
    for (const Box3& a : pa)
        for (const Box3& b : pb) {
            bool solid = true;
            for (int d = 0; d < 3; ++d)
                if (std::min(a.hi[d], b.hi[d]) - std::max(a.lo[d], b.lo[d]) <= 1e-12 * scale)
                    solid = false;
            if (solid) throw std::invalid_argument("interaction_L: sets overlap");
            pairs.emplace_back(a, b);
        }
    return paired_sum(pairs, alpha, nodes);
}

PerimeterResult fractional_perimeter(const Classifier& cls, const BoxWindow& omega, double alpha,
                                     const PVQuadrature& q) {
    require_alpha(alpha, "fractional_perimeter");
    Box3 om = to_box(omega, "fractional_perimeter");
    double r_inf = 0.0, vol = om.volume();
    for (int d = 0; d < 3; ++d)
        r_inf = std::max({r_inf, std::abs(om.lo[d]), std::abs(om.hi[d])});
    if (!(q.rho_max > 10.0 * std::max(1.0, r_inf)))
        throw std::invalid_argument("fractional_perimeter: rho_max must exceed the window");
    Box3 trunc{{-q.rho_max, -q.rho_max, -q.rho_max}, {q.rho_max, q.rho_max, q.rho_max}};

    Classifier flipped = [&cls](double x, double y, double z) { return -cls(x, y, z); };

    // tile the truncation region outside the window with up to 26 shell boxes,
    // so the set difference E \ window is exact box geometry instead of a
    // carved classifier, and every decomposition spends its whole split budget
    // at the scale of its own root box
    std::vector<Box3> shells;
    for (int ix = 0; ix < 3; ++ix)
        for (int iy = 0; iy < 3; ++iy)
            for (int iz = 0; iz < 3; ++iz) {
                if (ix == 1 && iy == 1 && iz == 1) continue;
                auto seg = [&](int which, int d) {
                    double a = which == 0 ? trunc.lo[d] : which == 1 ? om.lo[d] : om.hi[d];
                    double b = which == 0 ? om.lo[d] : which == 1 ? om.hi[d] : trunc.hi[d];
                    return std::pair<double, double>{a, b};
                };
                auto [x0, x1] = seg(ix, 0);
                auto [y0, y1] = seg(iy, 1);
                auto [z0, z1] = seg(iz, 2);
                if (x1 > x0 && y1 > y0 && z1 > z0)
                    shells.push_back(Box3{{x0, y0, z0}, {x1, y1, z1}});
            }

    // purity is decided from a fixed sample lattice, so a shell spanning the
    // whole truncation region can hide boundary features thinner than its
    // sample spacing (a cap poking just past the window face, say). Grade the
    // shells first: keep every box no larger than twice its distance from the
    // window plus the window scale, which matches box size to feature size
    double w0 = std::max({om.extent(0), om.extent(1), om.extent(2)});
    std::vector<Box3> graded;
    auto grade = [&](auto&& self, Box3 b) -> void {
        double gap = 0.0;
        for (int d = 0; d < 3; ++d)
            gap = std::max({gap, b.lo[d] - om.hi[d], om.lo[d] - b.hi[d]});
        int ax = 0;
        for (int d = 1; d < 3; ++d)
            if (b.extent(d) > b.extent(ax)) ax = d;
        if (b.extent(ax) <= 2.0 * (gap + w0)) {
            graded.push_back(b);
            return;
        }
        double mid = 0.5 * (b.lo[ax] + b.hi[ax]);
        Box3 a = b, c = b;
        a.hi[ax] = mid;
        c.lo[ax] = mid;
        self(self, a);
        self(self, c);
    };
    for (const Box3& s : shells) grade(grade, s);

    long nodes = 0;
    std::vector<Box3> inE, outE, winNotE, notE;
    decompose(cls, om, 1, q.box_depth, inE, nodes);       // E inside the window
    decompose(flipped, om, 1, q.box_depth, winNotE, nodes);
    for (const Box3& s : graded) {
        decompose(cls, s, 1, q.box_depth, outE, nodes);   // E beyond the window
        decompose(flipped, s, 1, q.box_depth, notE, nodes);
    }
    notE.insert(notE.end(), winNotE.begin(), winNotE.end());

    std::vector<std::pair<Box3, Box3>> pairs;
    for (const Box3& a : inE)
        for (const Box3& b : notE) pairs.emplace_back(a, b);
    for (const Box3& a : outE)
        for (const Box3& b : winNotE) pairs.emplace_back(a, b);

    PerimeterResult out;
    out.value = paired_sum(pairs, alpha, nodes);
    double margin = q.rho_max - std::sqrt(3.0) * r_inf;
    out.tail_bound =
        2.0 * vol * 4.0 * M_PI * std::pow(std::max(margin, 1e-300), -2.0 * alpha) / (2.0 * alpha);
    out.node_count = nodes;
    return out;
}

}  // namespace fracscrew::nmc
