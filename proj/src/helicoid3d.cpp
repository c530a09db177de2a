#include "fracscrew/helicoid3d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "fracscrew/errors.hpp"
#include "fracscrew/quadrature.hpp"
#include "fracscrew/specfun.hpp"
#include "fracscrew/threading.hpp"

#ifndef M_PI
#define M_PI 3.14159265358979323846
#endif

namespace fracscrew::helicoid3d {

namespace {

// antiderivative of the vertical weight y^(1-2a)
double wint(double a, double b, double alpha) {
    double q = 2.0 - 2.0 * alpha;
    return (std::pow(b, q) - std::pow(a, q)) / q;
}

double clampv(double v, double lo, double hi) { return std::min(hi, std::max(lo, v)); }

}  // namespace

CylGrid::CylGrid(double lambda_, double alpha_, double radius_, int nr_, int ns_, int ny_,
                 double height_) {
    if (!(lambda_ > 0.0)) throw std::domain_error("CylGrid: lambda must be positive");
    if (!(alpha_ > 0.0 && alpha_ < 1.0))
        throw std::domain_error("CylGrid: alpha must lie in (0,1)");
    if (!(radius_ > 0.0)) throw std::domain_error("CylGrid: radius must be positive");
    if (nr_ < 4 || ns_ < 4 || ny_ < 4) throw std::domain_error("CylGrid: need at least 4 cells");
    lambda = lambda_;
    alpha = alpha_;
    radius = radius_;
    nr = nr_;
    ns = ns_;
    ny = ny_;
    height = height_ > 0.0 ? height_ : 12.0 * lambda / M_PI;
    grading = std::max(1.0, 0.5 / alpha);
    dr = radius / nr;
    ds = lambda / ns;

    y.resize(ny + 1);
    for (int j = 0; j <= ny; ++j)
        y[j] = height * std::pow(static_cast<double>(j) / ny, grading);

    ymass.resize(ny + 1);
    for (int j = 0; j <= ny; ++j) {
        double lo = j == 0 ? 0.0 : 0.5 * (y[j - 1] + y[j]);
        double hi = j == ny ? height : 0.5 * (y[j] + y[j + 1]);
        ymass[j] = wint(lo, hi, alpha);
    }
    ycoef.resize(ny);
    for (int j = 0; j < ny; ++j) {
        double dy = y[j + 1] - y[j];
        ycoef[j] = wint(y[j], y[j + 1], alpha) / (dy * dy);
    }

    rmass.resize(nr + 1);
    rmass[0] = dr * dr / 8.0;
    for (int i = 1; i < nr; ++i) rmass[i] = i * dr * dr;
    rmass[nr] = 0.5 * (radius * radius - (radius - 0.5 * dr) * (radius - 0.5 * dr));

    // r_{i+1/2}/dr: the dr from the edge cross-section cancels the one in
    // the difference quotient, so the radial conductance is dimensionless
    redge.resize(nr);
    for (int i = 0; i < nr; ++i) redge[i] = i + 0.5;

    // angular dual integrals; the axis cell carries none (its values are
    // pinned by screw invariance, and its log integral would diverge); the
    // plain measure of the orphaned axis ring folds into ring 1 so the
    // weights telescope to R^2/2 exactly
    acoef.assign(nr + 1, 0.0);
    const double ang = lambda * lambda / (M_PI * M_PI);
    for (int i = 1; i <= nr; ++i) {
        double a = (i - 0.5) * dr;
        double b = std::min((i + 0.5) * dr, radius);
        double plain_lo = i == 1 ? 0.0 : a;
        acoef[i] = 0.5 * (b * b - plain_lo * plain_lo) + ang * std::log(b / a);
    }
}

double ReducedField::sup() const {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

ReducedField ReducedField::zero(const CylGrid& g) {
    ReducedField f;
    f.nr = g.nr;
    f.ns = g.ns;
    f.ny = g.ny;
    f.v.assign(static_cast<size_t>(g.nr + 1) * (g.ns + 1) * (g.ny + 1), 0.0);
    return f;
}

ReducedField ReducedField::mode(const CylGrid& g, double amplitude) {
    ReducedField f = zero(g);
    specfun::ExtensionProfile prof(g.alpha);
    std::vector<double> decay(g.ny + 1, 0.0);
    for (int j = 0; j < g.ny; ++j) decay[j] = prof.phi2(M_PI * g.y[j] / g.lambda);
    for (int i = 1; i < g.nr; ++i) {
        double shape = std::min(i * g.dr, 1.0);
        for (int k = 1; k < g.ns; ++k) {
            double s = std::sin(M_PI * k / g.ns);
            for (int j = 0; j < g.ny; ++j) f.at(i, k, j) = amplitude * shape * s * decay[j];
        }
    }
    return f;
}

double energy_cyl(const CylGrid& g, const ReducedField& f,
                  const potential::DoubleWellPotential& pot) {
    if (f.nr != g.nr || f.ns != g.ns || f.ny != g.ny)
        throw std::invalid_argument("energy_cyl: field does not match grid");
    for (double x : f.v)
        if (!std::isfinite(x)) throw std::invalid_argument("energy_cyl: non-finite field value");

    const double ca = specfun::c_alpha(g.alpha);

    // everything a radial layer contributes: its outward edges, its angular
    // and vertical terms, and its share of the trace integral
    auto slab = [&](size_t iu) {
        int i = static_cast<int>(iu);
        double dir = 0.0;
        if (i < g.nr) {
            double cr = g.ds * g.redge[i];  // conductance of r-edges out of layer i
            for (int k = 0; k <= g.ns; ++k)
                for (int j = 0; j <= g.ny; ++j) {
                    double d = f.at(i + 1, k, j) - f.at(i, k, j);
                    dir += cr * g.ymass[j] * d * d;
                }
        }
        if (g.acoef[i] > 0.0) {
            for (int k = 0; k < g.ns; ++k)
                for (int j = 0; j <= g.ny; ++j) {
                    double d = f.at(i, k + 1, j) - f.at(i, k, j);
                    dir += g.acoef[i] * g.ymass[j] * d * d / g.ds;
                }
        }
        for (int k = 0; k <= g.ns; ++k)
            for (int j = 0; j < g.ny; ++j) {
                double d = f.at(i, k, j + 1) - f.at(i, k, j);
                dir += g.ds * g.rmass[i] * g.ycoef[j] * d * d;
            }
        double trace = pot.F(0.0);
        for (int k = 1; k < g.ns; ++k) trace += pot.F(f.at(i, k, 0));
        return dir / (2.0 * ca) + g.rmass[i] * g.ds * trace;
    };

    double total = 0.0;
    const bool parallel =
        static_cast<long>(g.nr) * g.ns * g.ny >= (1L << 16);
    if (parallel) {
        auto parts = threading::parallel_map(g.nr + 1, slab);
        for (double p : parts) total += p;
    } else {
        for (int i = 0; i <= g.nr; ++i) total += slab(i);
    }
    return total;
}

std::vector<double> energy_gradient_cyl(const CylGrid& g, const ReducedField& f,
                                        const potential::DoubleWellPotential& pot) {
    const double ca = specfun::c_alpha(g.alpha);
    std::vector<double> grad(f.v.size(), 0.0);

    auto slab = [&](size_t iu) {
        int i = static_cast<int>(iu) + 1;  // unknowns live on 1..nr-1
        for (int k = 1; k < g.ns; ++k)
            for (int j = 0; j < g.ny; ++j) {
                double vij = f.at(i, k, j);
                double s_part =
                    g.acoef[i] * g.ymass[j] * (2.0 * vij - f.at(i, k - 1, j) - f.at(i, k + 1, j)) / g.ds;
                double r_part = g.ds * g.ymass[j] *
                                (g.redge[i - 1] * (vij - f.at(i - 1, k, j)) +
                                 g.redge[i] * (vij - f.at(i + 1, k, j)));
                double y_part = g.ycoef[j] * (vij - f.at(i, k, j + 1));
                if (j > 0) y_part += g.ycoef[j - 1] * (vij - f.at(i, k, j - 1));
                double val = (s_part + r_part + g.ds * g.rmass[i] * y_part) / ca;
                if (j == 0) val += g.ds * g.rmass[i] * pot.dF(vij);
                grad[(static_cast<size_t>(i) * (g.ns + 1) + k) * (g.ny + 1) + j] = val;
            }
        return 0.0;
    };

    const bool parallel = static_cast<long>(g.nr) * g.ns * g.ny >= (1L << 16);
    if (parallel) {
        threading::parallel_map(g.nr - 1, slab);  // slabs write disjoint entries
    } else {
        for (int i = 0; i + 1 < g.nr; ++i) slab(i);
    }
    return grad;
}

namespace {

// exact inverse of the quadratic part: sine diagonalization in s, weighted
// eigenbasis in y, tridiagonal solves in r
class CylQuadraticInverse {
public:
    explicit CylQuadraticInverse(const CylGrid& g) : g_(g) {
        const int n = g.ns, m = g.ny, p = g.nr;
        sin_.resize(static_cast<size_t>(n - 1) * (n - 1));
        for (int q = 1; q < n; ++q)
            for (int k = 1; k < n; ++k)
                sin_[static_cast<size_t>(q - 1) * (n - 1) + (k - 1)] =
                    std::sin(M_PI * q * k / n);
        lam_.resize(n - 1);
        for (int q = 1; q < n; ++q) lam_[q - 1] = (2.0 - 2.0 * std::cos(M_PI * q / n)) / g.ds;

        // generalized eigenpairs of the vertical pencil (K_y, M_y)
        Eigen::MatrixXd S = Eigen::MatrixXd::Zero(m, m);
        std::vector<double> isq(m);
        for (int j = 0; j < m; ++j) isq[j] = 1.0 / std::sqrt(g.ymass[j]);
        for (int j = 0; j < m; ++j) {
            double d = g.ycoef[j] + (j > 0 ? g.ycoef[j - 1] : 0.0);
            S(j, j) = d * isq[j] * isq[j];
            if (j + 1 < m) {
                double o = -g.ycoef[j] * isq[j] * isq[j + 1];
                S(j, j + 1) = o;
                S(j + 1, j) = o;
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
        theta_ = es.eigenvalues();
        psi_ = es.eigenvectors();
        for (int j = 0; j < m; ++j) psi_.row(j) *= isq[j];

        hat_.resize(static_cast<size_t>(n - 1) * (p - 1) * m);
        bhat_.resize(hat_.size());
        cw_.resize(p - 1);
        const double ca = specfun::c_alpha(g.alpha);
        ca_ = ca;
    }

    void apply(const std::vector<double>& r, std::vector<double>& z) {
        const int n = g_.ns, m = g_.ny, p = g_.nr;
        const size_t row = static_cast<size_t>(p - 1) * m;
        // forward sine transform in s
        for (int q = 1; q < n; ++q) {
            const double* srow = &sin_[static_cast<size_t>(q - 1) * (n - 1)];
            for (int i = 1; i < p; ++i) {
                double* out = &hat_[(q - 1) * row + static_cast<size_t>(i - 1) * m];
                std::fill(out, out + m, 0.0);
                for (int k = 1; k < n; ++k) {
                    double w = srow[k - 1];
                    const double* in =
                        &r[(static_cast<size_t>(i) * (n + 1) + k) * (m + 1)];
                    for (int j = 0; j < m; ++j) out[j] += w * in[j];
                }
            }
        }
        // vertical transform: bhat(i,l) = sum_j psi(j,l) hat(i,j)
        for (size_t blk = 0; blk < static_cast<size_t>(n - 1) * (p - 1); ++blk) {
            const double* in = &hat_[blk * m];
            double* out = &bhat_[blk * m];
            for (int l = 0; l < m; ++l) {
                double s = 0.0;
                for (int j = 0; j < m; ++j) s += psi_(j, l) * in[j];
                out[l] = s;
            }
        }
        // tridiagonal solves in r for every (mode, vertical eigenvalue) pair
        for (int q = 1; q < n; ++q)
            for (int l = 0; l < m; ++l) {
                double* b = &bhat_[(q - 1) * row + l];
                auto diag = [&](int i) {
                    return (g_.ds * (g_.redge[i - 1] + g_.redge[i]) +
                            lam_[q - 1] * g_.acoef[i] +
                            g_.ds * theta_[l] * g_.rmass[i]) /
                           ca_;
                };
                auto off = [&](int i) { return -g_.ds * g_.redge[i] / ca_; };
                double piv = diag(1);
                cw_[0] = off(1) / piv;
                b[0] /= piv;
                for (int i = 2; i < p; ++i) {
                    piv = diag(i) - off(i - 1) * cw_[i - 2];
                    if (i < p - 1) cw_[i - 1] = off(i) / piv;
                    b[static_cast<size_t>(i - 1) * m] =
                        (b[static_cast<size_t>(i - 1) * m] -
                         off(i - 1) * b[static_cast<size_t>(i - 2) * m]) /
                        piv;
                }
                for (int i = p - 2; i >= 1; --i)
                    b[static_cast<size_t>(i - 1) * m] -=
                        cw_[i - 1] * b[static_cast<size_t>(i) * m];
            }
        // undo the vertical transform: hat(i,j) = sum_l psi(j,l) bhat(i,l)
        for (size_t blk = 0; blk < static_cast<size_t>(n - 1) * (p - 1); ++blk) {
            const double* in = &bhat_[blk * m];
            double* out = &hat_[blk * m];
            for (int j = 0; j < m; ++j) {
                double s = 0.0;
                for (int l = 0; l < m; ++l) s += psi_(j, l) * in[l];
                out[j] = s;
            }
        }
        // inverse sine transform
        std::fill(z.begin(), z.end(), 0.0);
        const double scale = 2.0 / n;
        for (int i = 1; i < p; ++i)
            for (int k = 1; k < n; ++k) {
                double* out = &z[(static_cast<size_t>(i) * (n + 1) + k) * (m + 1)];
                for (int q = 1; q < n; ++q) {
                    double w = sin_[static_cast<size_t>(q - 1) * (n - 1) + (k - 1)];
                    const double* in = &hat_[(q - 1) * row + static_cast<size_t>(i - 1) * m];
                    for (int j = 0; j < m; ++j) out[j] += w * in[j];
                }
                for (int j = 0; j < m; ++j) out[j] *= scale;
            }
    }

private:
    const CylGrid& g_;
    std::vector<double> sin_, lam_, hat_, bhat_, cw_;
    Eigen::VectorXd theta_;
    Eigen::MatrixXd psi_;
    double ca_ = 1.0;
};

}  // namespace

CylMinimizeResult minimize_cyl(const CylGrid& g, const potential::DoubleWellPotential& pot,
                               const ReducedField& init, CylMinimizeOptions opts) {
    if (init.nr != g.nr || init.ns != g.ns || init.ny != g.ny)
        throw std::invalid_argument("minimize_cyl: init does not match grid");
    double lo = opts.lo, hi = opts.hi;
    if (*std::min_element(init.v.begin(), init.v.end()) >= 0.0) lo = std::max(lo, 0.0);

    ReducedField f = init;
    // enforce the Dirichlet faces and the pinned axis column, clamp the rest
    for (int i = 0; i <= g.nr; ++i)
        for (int k = 0; k <= g.ns; ++k)
            for (int j = 0; j <= g.ny; ++j) {
                bool fixed = i == 0 || i == g.nr || k == 0 || k == g.ns || j == g.ny;
                f.at(i, k, j) = fixed ? 0.0 : clampv(f.at(i, k, j), lo, hi);
            }

    CylQuadraticInverse inv(g);
    std::vector<double> z(f.v.size());
    ReducedField trial = f;

    double energy = energy_cyl(g, f, pot);
    double rel_dec = std::numeric_limits<double>::infinity();
    double residual = 0.0;

    for (int it = 0; it < opts.max_iter; ++it) {
        auto grad = energy_gradient_cyl(g, f, pot);
        residual = 0.0;
        for (int i = 1; i < g.nr; ++i)
            for (int k = 1; k < g.ns; ++k)
                for (int j = 0; j < g.ny; ++j) {
                    size_t idx = (static_cast<size_t>(i) * (g.ns + 1) + k) * (g.ny + 1) + j;
                    residual += std::abs(f.v[idx] - clampv(f.v[idx] - grad[idx], lo, hi));
                }
        if (residual < opts.tol_residual && rel_dec < opts.tol_energy) {
            CylMinimizeResult out;
            out.field = f;
            out.energy = energy;
            out.residual = residual;
            out.iterations = it;
            return out;
        }

        inv.apply(grad, z);
        double t = 1.0;
        bool accepted = false;
        double new_energy = 0.0;
        for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
            double pred = 0.0;
            for (int i = 1; i < g.nr; ++i)
                for (int k = 1; k < g.ns; ++k)
                    for (int j = 0; j < g.ny; ++j) {
                        size_t idx =
                            (static_cast<size_t>(i) * (g.ns + 1) + k) * (g.ny + 1) + j;
                        trial.v[idx] = clampv(f.v[idx] - t * z[idx], lo, hi);
                        pred += grad[idx] * (trial.v[idx] - f.v[idx]);
                    }
            new_energy = energy_cyl(g, trial, pot);
            double slack = 32.0 * std::numeric_limits<double>::epsilon() *
                           (1.0 + std::abs(energy));
            if (new_energy <= energy + 1e-4 * pred + slack) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            if (residual < 10.0 * opts.tol_residual) {
                CylMinimizeResult out;
                out.field = f;
                out.energy = energy;
                out.residual = residual;
                out.iterations = it;
                return out;
            }
            throw NonConvergenceError("minimize_cyl: line search stalled", residual, f.v);
        }
        rel_dec = (energy - new_energy) / (1.0 + std::abs(energy));
        f.v.swap(trial.v);
        energy = new_energy;
    }
    throw NonConvergenceError("minimize_cyl: iteration limit reached", residual, f.v);
}

ReducedField pde_residual(const CylGrid& g, const ReducedField& f) {
    if (f.nr != g.nr || f.ns != g.ns || f.ny != g.ny)
        throw std::invalid_argument("pde_residual: field does not match grid");
    ReducedField out = ReducedField::zero(g);
    const double ang = g.lambda * g.lambda / (M_PI * M_PI);
    for (int i = 1; i < g.nr; ++i) {
        double r = i * g.dr;
        for (int k = 1; k < g.ns; ++k)
            for (int j = 1; j < g.ny; ++j) {
                double hm = g.y[j] - g.y[j - 1];
                double hp = g.y[j + 1] - g.y[j];
                double denom = hm * hp * (hm + hp);
                double d2r = (f.at(i + 1, k, j) - 2.0 * f.at(i, k, j) + f.at(i - 1, k, j)) /
                             (g.dr * g.dr);
                double d1r = (f.at(i + 1, k, j) - f.at(i - 1, k, j)) / (2.0 * g.dr);
                double d2s = (f.at(i, k + 1, j) - 2.0 * f.at(i, k, j) + f.at(i, k - 1, j)) /
                             (g.ds * g.ds);
                double d1y = (hm * hm * f.at(i, k, j + 1) - hp * hp * f.at(i, k, j - 1) +
                              (hp * hp - hm * hm) * f.at(i, k, j)) /
                             denom;
                double d2y = 2.0 *
                             (hm * f.at(i, k, j + 1) + hp * f.at(i, k, j - 1) -
                              (hm + hp) * f.at(i, k, j)) /
                             denom;
                out.at(i, k, j) = d2r + d1r / r + (1.0 + ang / (r * r)) * d2s + d2y +
                                  (1.0 - 2.0 * g.alpha) / g.y[j] * d1y;
            }
    }
    return out;
}

namespace {

double trilinear(const CylGrid& g, const ReducedField& f, double r, double s, double yv) {
    int i = std::min(static_cast<int>(r / g.dr), g.nr - 1);
    double tr = r / g.dr - i;
    int k = std::min(static_cast<int>(s / g.ds), g.ns - 1);
    double ts = s / g.ds - k;
    int j = static_cast<int>(std::upper_bound(g.y.begin(), g.y.end(), yv) - g.y.begin()) - 1;
    j = std::max(0, std::min(j, g.ny - 1));
    double ty = (yv - g.y[j]) / (g.y[j + 1] - g.y[j]);

    double c00 = (1 - tr) * f.at(i, k, j) + tr * f.at(i + 1, k, j);
    double c10 = (1 - tr) * f.at(i, k + 1, j) + tr * f.at(i + 1, k + 1, j);
    double c01 = (1 - tr) * f.at(i, k, j + 1) + tr * f.at(i + 1, k, j + 1);
    double c11 = (1 - tr) * f.at(i, k + 1, j + 1) + tr * f.at(i + 1, k + 1, j + 1);
    return (1 - ty) * ((1 - ts) * c00 + ts * c10) + ty * ((1 - ts) * c01 + ts * c11);
}

}  // namespace

double reconstruct_extension(const CylGrid& g, const ReducedField& f, double x1, double x2,
                             double x3, double yext) {
    double r = std::hypot(x1, x2);
    if (r > g.radius * (1.0 + 1e-12))
        throw std::domain_error("reconstruct: point outside the radial extent");
    if (yext < 0.0 || yext > g.height)
        throw std::domain_error("reconstruct: height outside the box");
    double theta = std::atan2(x2, x1);
    double s = x3 - g.lambda * theta / M_PI;
    s = std::fmod(s, 2.0 * g.lambda);
    if (s < -g.lambda) s += 2.0 * g.lambda;
    if (s >= g.lambda) s -= 2.0 * g.lambda;
    double sign = 1.0;
    if (s < 0.0) {  // odd reflection onto the fundamental domain
        sign = -1.0;
        s = -s;
    }
    return sign * trilinear(g, f, std::min(r, g.radius), std::min(s, g.lambda), yext);
}

double reconstruct_trace(const CylGrid& g, const ReducedField& f, double x1, double x2,
                         double x3) {
    return reconstruct_extension(g, f, x1, x2, x3, 0.0);
}

namespace {

// linear cutoff ramps: 0 on [0,1/2] and [R-1/2,R], 1 on [1,R-1]
double eta_of(double r, double R) {
    if (r <= 0.5 || r >= R - 0.5) return 0.0;
    if (r < 1.0) return 2.0 * (r - 0.5);
    if (r > R - 1.0) return 2.0 * (R - 0.5 - r);
    return 1.0;
}

double eta_prime(double r, double R) {
    if (r > 0.5 && r < 1.0) return 2.0;
    if (r > R - 1.0 && r < R - 0.5) return -2.0;
    return 0.0;
}

}  // namespace

CompetitorBreakdown competitor_energy(const CompetitorParams& p,
                                      const strip1d::StripGrid& sg,
                                      const strip1d::StripField& v0,
                                      const potential::DoubleWellPotential& pot) {
    const double alpha = sg.alpha;
    if (!(p.a > 0.5 && p.a < p.b && p.b < 0.5 / (1.0 - alpha)))
        throw std::domain_error("competitor_energy: exponent window violated");
    if (!(p.radius >= 2.0))
        throw std::domain_error("competitor_energy: radius below the cutoff ramp width");
    if (v0.ns != sg.ns || v0.ny != sg.ny)
        throw std::invalid_argument("competitor_energy: field does not match grid");

    const double R = p.radius;
    const double Rb = std::pow(R, p.b);
    const double Ra = std::pow(R, p.a);
    const double dlog = std::log(Rb) - std::log(Rb - Ra);
    const double ca = specfun::c_alpha(alpha);
    const double ang = sg.lambda * sg.lambda / (M_PI * M_PI);

    auto xi_of = [&](double yv) {
        if (yv <= Rb - Ra) return 1.0;
        if (yv >= Rb) return 0.0;
        return (std::log(Rb) - std::log(yv)) / dlog;
    };

    // vertical sums on the strip nodes; v0 extends by zero beyond its grid
    std::vector<double> xi(sg.ny + 1);
    for (int j = 0; j <= sg.ny; ++j) xi[j] = xi_of(sg.y[j]);
    double node_sq = 0.0, edge_s = 0.0, edge_y = 0.0;
    for (int k = 1; k < sg.ns; ++k)
        for (int j = 0; j <= sg.ny; ++j) {
            double w = xi[j] * v0.at(k, j);
            node_sq += sg.ds * sg.node_mass[j] * w * w;
        }
    for (int j = 0; j <= sg.ny; ++j) {
        double acc = 0.0;
        for (int k = 0; k < sg.ns; ++k) {
            double d = v0.at(k + 1, j) - v0.at(k, j);
            acc += d * d;
        }
        edge_s += sg.node_mass[j] * xi[j] * xi[j] * acc / sg.ds;
    }
    for (int k = 0; k <= sg.ns; ++k)
        for (int j = 0; j < sg.ny; ++j) {
            double d = xi[j + 1] * v0.at(k, j + 1) - xi[j] * v0.at(k, j);
            edge_y += sg.ds * sg.edge_coef[j] * d * d;
        }

    // radial factors, integrated piece by piece
    struct Piece {
        double a, b;
    };
    std::vector<Piece> pieces{{0.5, 1.0}, {R - 1.0, R - 0.5}};
    double A = 0.0, B = 0.0, Cc = 0.0;
    for (const Piece& pc : pieces) {
        A += quad::integrate([&](double r) { double e = eta_prime(r, R); return e * e * r; },
                             pc.a, pc.b);
        B += quad::integrate([&](double r) { double e = eta_of(r, R); return e * e * r; },
                             pc.a, pc.b);
        Cc += quad::integrate([&](double r) { double e = eta_of(r, R); return e * e / r; },
                              pc.a, pc.b);
    }
    B += 0.5 * ((R - 1.0) * (R - 1.0) - 1.0);
    Cc += std::log(R - 1.0);

    CompetitorBreakdown out;
    out.part_radial = A * node_sq / (2.0 * ca);
    out.part_angular = (B + ang * Cc) * edge_s / (2.0 * ca);
    out.part_vertical = B * edge_y / (2.0 * ca);

    // trace integral of F(eta v0); the plateau and the dead zones are exact
    double dead = 0.5 * (0.25 + R * R - (R - 0.5) * (R - 0.5));
    double plateau = 0.5 * ((R - 1.0) * (R - 1.0) - 1.0);
    double tr = pot.F(0.0) * 0.5 * R * R;  // both s-endpoints carry v0 = 0
    for (int k = 1; k < sg.ns; ++k) {
        double v = v0.at(k, 0);
        double node = pot.F(0.0) * dead + pot.F(v) * plateau;
        for (const Piece& pc : pieces)
            node += quad::integrate(
                [&](double r) { return pot.F(eta_of(r, R) * v) * r; }, pc.a, pc.b);
        tr += node;
    }
    out.part_trace = sg.ds * tr;

    // independent pass: pointwise eta at quadrature nodes against the full
    // integrand, with the plateau subdivided geometrically for the 1/r part
    std::vector<Piece> all{{0.5, 1.0}};
    double lo = 1.0;
    while (lo < R - 1.0) {
        double hi = std::min(2.0 * lo, R - 1.0);
        all.push_back({lo, hi});
        lo = hi;
    }
    all.push_back({R - 1.0, R - 0.5});
    double dir = 0.0, tr2 = pot.F(0.0) * sg.ds * 0.5 * R * R;
    for (const Piece& pc : all) {
        dir += quad::integrate(
            [&](double r) {
                double e = eta_of(r, R), ep = eta_prime(r, R);
                return ep * ep * r * node_sq + e * e * (r + ang / r) * edge_s +
                       e * e * r * edge_y;
            },
            pc.a, pc.b);
        double tnode = quad::integrate(
            [&](double r) {
                double e = eta_of(r, R);
                double acc = 0.0;
                for (int k = 1; k < sg.ns; ++k) acc += pot.F(e * v0.at(k, 0));
                return acc * r;
            },
            pc.a, pc.b);
        tr2 += sg.ds * tnode;
    }
    // dead zones of eta contribute F(0) for every interior trace node
    tr2 += pot.F(0.0) * sg.ds * (sg.ns - 1) * dead;
    out.total = dir / (2.0 * ca) + tr2;

    out.bulk = 0.5 * R * R * strip1d::energy_E0(sg, v0, pot);
    out.eta_cost = sg.lambda * (2.0 * R) * std::pow(Rb, 2.0 - 2.0 * alpha) /
                   ((2.0 - 2.0 * alpha) * 2.0 * ca);
    out.xi_cost = sg.lambda * 0.5 * R * R / (dlog * dlog) *
                  (std::pow(Rb - Ra, -2.0 * alpha) - std::pow(Rb, -2.0 * alpha)) /
                  (2.0 * alpha * 2.0 * ca);
    out.eps_margin = std::min(1.0 - 2.0 * p.b * (1.0 - alpha),
                              2.0 * p.a - 2.0 * p.b * (1.0 - alpha));
    out.excess_scaled = (out.total - out.bulk) / std::pow(R, 2.0 - out.eps_margin);
    return out;
}

BarrierReport barrier_check(const BarrierParams& p, double alpha, double lambda, int n) {
    if (!(p.K > 0.0 && p.C > 0.0 && p.eps > 0.0))
        throw std::domain_error("barrier_check: parameters must be positive");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("barrier_check: alpha must lie in (0,1)");
    if (!(lambda > 0.0)) throw std::domain_error("barrier_check: lambda must be positive");
    if (n < 8) throw std::domain_error("barrier_check: need at least 8 samples per axis");

    const double m = M_PI / lambda;
    specfun::ExtensionProfile prof(alpha);

    BarrierReport rep;
    rep.proof_range = p.C > std::exp(2.0);
    rep.max_operator = -std::numeric_limits<double>::infinity();

    auto logspace = [&](double a, double b, int idx) {
        return a * std::pow(b / a, static_cast<double>(idx) / (n - 1));
    };
    const double r_lo = 1e-3 / m, r_hi = 8.0 / m;
    const double y_lo = 1e-3 / m, y_hi = 12.0 / m;

    for (int iy = 0; iy < n; ++iy) {
        double yv = logspace(y_lo, y_hi, iy);
        double ph2 = prof.phi2(m * yv), ph1 = prof.phi1(m * yv);
        double P = ph2 + p.eps * ph1;
        double ypart = m * m * (prof.ddphi2(m * yv) + p.eps * prof.ddphi1(m * yv)) +
                       (1.0 - 2.0 * alpha) / yv * m *
                           (prof.dphi2(m * yv) + p.eps * prof.dphi1(m * yv));
        for (int ir = 0; ir < n; ++ir) {
            double r = logspace(r_lo, r_hi, ir);
            double ep = std::exp(0.5 * m * r), em = p.C * std::exp(-0.5 * m * r);
            double Q = p.eps * (ep + em);
            double rad = p.eps * (0.25 * m * m * (ep + em) + 0.5 * m * (ep - em) / r);
            double shape = rad - m * m * (P + Q) - (P + Q) / (r * r) + ypart;
            for (int is = 1; is < n; ++is) {
                double s = lambda * is / n;
                double val = p.K * std::sin(m * s) * shape;
                if (val > rep.max_operator) {
                    rep.max_operator = val;
                    rep.worst_r = r;
                    rep.worst_s = s;
                    rep.worst_y = yv;
                }
            }
        }
    }
    rep.operator_nonpositive = rep.max_operator <= 1e-10;

    // axis-side step inequality e^{mr/2} - C e^{-mr/2} <= 0 on r < lambda/pi
    rep.step_worst_value = -std::numeric_limits<double>::infinity();
    for (int ir = 0; ir < n; ++ir) {
        double r = logspace(r_lo, (1.0 - 1e-9) / m, ir);
        double v = std::exp(0.5 * m * r) - p.C * std::exp(-0.5 * m * r);
        if (v > rep.step_worst_value) {
            rep.step_worst_value = v;
            rep.step_worst_r = r;
        }
    }
    rep.step_inequality_ok = rep.step_worst_value <= 1e-12;

    // trace domination and the lateral planes
    rep.trace_domination = true;
    for (int ir = 0; ir < n; ++ir) {
        double r = logspace(r_lo, r_hi, ir);
        double Q = p.eps * (std::exp(0.5 * m * r) + p.C * std::exp(-0.5 * m * r));
        for (int is = 1; is < n; ++is) {
            double s = lambda * is / n;
            double w0 = p.K * std::sin(m * s) * (1.0 + Q);
            if (w0 < 0.5 * p.K * std::sin(m * s)) rep.trace_domination = false;
        }
    }
    // evaluate w itself on the two lateral planes at a representative point
    double rq = 1.0 / m, yq = 1.0 / m;
    double bracket = prof.phi2(m * yq) + p.eps * prof.phi1(m * yq) +
                     p.eps * (std::exp(0.5 * m * rq) + p.C * std::exp(-0.5 * m * rq));
    double at0 = p.K * std::sin(0.0) * bracket;
    double atl = p.K * std::sin(m * lambda) * bracket;
    rep.zero_on_s_planes = at0 == 0.0 && std::abs(atl) <= 1e-12 * p.K;
    return rep;
}

DecayFit decay_rate(const CylGrid& g, const ReducedField& f) {
    if (f.nr != g.nr || f.ns != g.ns || f.ny != g.ny)
        throw std::invalid_argument("decay_rate: field does not match grid");
    const double lo = 0.45 * g.height, hi = 0.75 * g.height;
    std::vector<int> idx;
    for (int j = 1; j < g.ny; ++j)
        if (g.y[j] >= lo && g.y[j] <= hi) idx.push_back(j);
    if (idx.size() < 4) throw std::invalid_argument("decay_rate: fit window too thin");

    const int k = g.ns / 2;
    int best = 1;
    double amp = 0.0;
    for (int i = 1; i < g.nr; ++i) {
        double a = std::abs(f.at(i, k, idx.front()));
        if (a > amp) {
            amp = a;
            best = i;
        }
    }
    if (amp < 1e-8) throw std::invalid_argument("decay_rate: field too small");
    for (int j : idx)
        if (std::abs(f.at(best, k, j)) <= 0.0)
            throw std::invalid_argument("decay_rate: field too small");

    auto fit = [&](bool corrected, double* se) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int nn = static_cast<int>(idx.size());
        for (int j : idx) {
            double x = g.y[j];
            double z = std::log(std::abs(f.at(best, k, j)));
            if (corrected) z += (0.5 - g.alpha) * std::log(x);
            sx += x;
            sy += z;
            sxx += x * x;
            sxy += x * z;
        }
        double det = nn * sxx - sx * sx;
        double slope = (nn * sxy - sx * sy) / det;
        double icpt = (sy - slope * sx) / nn;
        if (se) {
            double rss = 0.0;
            for (int j : idx) {
                double x = g.y[j];
                double z = std::log(std::abs(f.at(best, k, j)));
                if (corrected) z += (0.5 - g.alpha) * std::log(x);
                double e = z - (icpt + slope * x);
                rss += e * e;
            }
            double var = rss / std::max(1, nn - 2) / (sxx - sx * sx / nn);
            *se = std::sqrt(var);
        }
        return slope;
    };

    DecayFit out;
    out.rate = -fit(true, &out.stderr_rate);
    out.rate_raw = -fit(false, nullptr);
    out.window_lo = g.y[idx.front()];
    out.window_hi = g.y[idx.back()];
    return out;
}

}  // namespace fracscrew::helicoid3d
