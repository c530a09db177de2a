#pragma once

#include <vector>

#include "fracscrew/potential.hpp"
#include "fracscrew/strip1d.hpp"

namespace fracscrew::helicoid3d {

// Screw-invariant reduction on the cylinder [0,R] x [0,lambda] x [0,L].
// Finite-volume cells carry the measure r dr ds y^(1-2a) dy with every radial
// and vertical weight integrated in closed form, so nothing is ever evaluated
// at r = 0 or y = 0. Screw invariance pins the axis column to zero (the value
// at r = 0 cannot depend on s, and it vanishes with the lateral planes), which
// is also why the logarithmically divergent angular conductance of the axis
// dual cell never enters the assembly.
struct CylGrid {
    double lambda = 0.0;
    double alpha = 0.0;
    double radius = 0.0;
    double height = 0.0;
    double grading = 1.0;
    int nr = 0, ns = 0, ny = 0;
    double dr = 0.0, ds = 0.0;

    std::vector<double> y;      // graded vertical nodes, same law as StripGrid
    std::vector<double> ymass;  // dual cell masses of y^(1-2a) dy
    std::vector<double> ycoef;  // vertical edge conductances (cell mass / dy^2)
    std::vector<double> rmass;  // dual cell masses of r dr (axis cell dr^2/8)
    std::vector<double> redge;  // radial edge conductances, (midpoint r)/dr
    std::vector<double> acoef;  // dual integrals of (1 + lambda^2/(pi^2 r^2)) r dr

    CylGrid(double lambda, double alpha, double radius, int nr, int ns, int ny,
            double height = 0.0);
};

struct ReducedField {
    int nr = 0, ns = 0, ny = 0;
    std::vector<double> v;  // layout ((i * (ns+1)) + k) * (ny+1) + j

    double& at(int i, int k, int j) {
        return v[(static_cast<size_t>(i) * (ns + 1) + k) * (ny + 1) + j];
    }
    double at(int i, int k, int j) const {
        return v[(static_cast<size_t>(i) * (ns + 1) + k) * (ny + 1) + j];
    }
    double sup() const;

    static ReducedField zero(const CylGrid& g);
    // amplitude * sin(pi s/lambda) phi2(pi y/lambda) min(r,1), zero on all
    // Dirichlet faces; the destabilizing direction used for bifurcation runs
    static ReducedField mode(const CylGrid& g, double amplitude);
};

// Cylinder energy: (1/2ca) * weighted Dirichlet form + trace integral of F.
// Evaluates any field that matches the grid; admissibility (zero on the
// r = R, s = 0, s = lambda, y = L faces) is the caller's business.
double energy_cyl(const CylGrid& g, const ReducedField& f,
                  const potential::DoubleWellPotential& pot);

// Gradient with respect to the unknowns (0 < i < nr, 0 < k < ns, j < ny);
// entries on Dirichlet faces and the axis column stay zero.
std::vector<double> energy_gradient_cyl(const CylGrid& g, const ReducedField& f,
                                        const potential::DoubleWellPotential& pot);

struct CylMinimizeOptions {
    double tol_energy = 1e-12;
    double tol_residual = 1e-8;
    int max_iter = 50000;
    double lo = -1.0;
    double hi = 1.0;
};

struct CylMinimizeResult {
    ReducedField field;
    double energy = 0.0;
    double residual = 0.0;
    int iterations = 0;
};

// Projected gradient descent preconditioned by the exact inverse of the
// quadratic part (sine transform in s, weighted eigenbasis in y, tridiagonal
// solve in r). Nonnegative starts keep the box [0,1].
CylMinimizeResult minimize_cyl(const CylGrid& g, const potential::DoubleWellPotential& pot,
                               const ReducedField& init,
                               CylMinimizeOptions opts = CylMinimizeOptions{});

// Strong-form interior operator
//   V_rr + V_r/r + (1 + lambda^2/(pi^2 r^2)) V_ss + V_yy + (1-2a)/y V_y
// on central stencils (nonuniform in y). Zero outside 0<i<nr, 0<k<ns, 0<j<ny.
ReducedField pde_residual(const CylGrid& g, const ReducedField& f);

// Point evaluation of the screw-extended function: u at (x1,x2,x3) for the
// trace, v at ((x1,x2,x3), yext) for the extension. The reduced coordinate is
// s = x3 - lambda*theta/pi folded into [-lambda, lambda) with odd reflection.
// Points with hypot(x1,x2) > R or yext outside [0, L] throw.
double reconstruct_trace(const CylGrid& g, const ReducedField& f, double x1, double x2,
                         double x3);
double reconstruct_extension(const CylGrid& g, const ReducedField& f, double x1,
                             double x2, double x3, double yext);

struct CompetitorParams {
    double a = 0.7;   // vertical cutoff exponent
    double b = 0.9;   // box height exponent, L = R^b
    double radius = 20.0;
};

struct CompetitorBreakdown {
    double total = 0.0;         // direct quadrature of the energy of W
    double part_radial = 0.0;   // (eta')^2 xi^2 v0^2 term
    double part_angular = 0.0;  // (1 + lambda^2/pi^2r^2) eta^2 xi^2 (v0_s)^2 term
    double part_vertical = 0.0; // eta^2 (d/dy (xi v0))^2 term
    double part_trace = 0.0;    // trace integral of F(eta v0)
    double bulk = 0.0;          // (R^2/2) E0(v0)
    double eta_cost = 0.0;      // (1/2ca) integral y^(1-2a) (eta')^2 r, closed form
    double xi_cost = 0.0;       // (1/2ca) integral y^(1-2a) (xi')^2 r, closed form
    double eps_margin = 0.0;    // exponent gap: total - bulk = O(R^(2 - eps_margin))
    double excess_scaled = 0.0; // (total - bulk) / R^(2 - eps_margin)
};

// Energy of the competitor W(r,s,y) = eta(r) xi(y) v0(s,y) on the cylinder
// [0,R] x [0,lambda] x [0,R^b]. eta ramps linearly on [1/2,1] and
// [R-1,R-1/2]; xi is the logarithmic cutoff on (R^b - R^a, R^b]; v0 extends
// by zero above its own grid. Requires 1/2 < a < b < 1/(2(1-alpha)).
CompetitorBreakdown competitor_energy(const CompetitorParams& p,
                                      const strip1d::StripGrid& sg,
                                      const strip1d::StripField& v0,
                                      const potential::DoubleWellPotential& pot);

struct BarrierParams {
    double K = 10.0;
    double C = 8.0;   // axis constant; the comparison argument wants C > e^2
    double eps = 0.01;
};

struct BarrierReport {
    double max_operator = 0.0;  // largest sampled interior operator value
    double worst_r = 0.0, worst_s = 0.0, worst_y = 0.0;
    bool operator_nonpositive = false;
    // step inequality exp(mr/2) - C exp(-mr/2) <= 0 on r < lambda/pi, the
    // axis-side case of the comparison argument
    bool step_inequality_ok = false;
    double step_worst_value = 0.0;
    double step_worst_r = 0.0;
    bool trace_domination = false;  // w(r,s,0) >= (K/2) sin(pi s/lambda)
    bool zero_on_s_planes = false;
    bool proof_range = false;       // C > e^2
};

// Samples the supersolution w = K sin(pi s/lambda) [phi2(pi y/lambda)
// + eps phi1(pi y/lambda) + eps (e^{mr/2} + C e^{-mr/2})] on a logarithmic
// (r, y) x uniform s grid and evaluates the interior operator through the
// analytic derivatives of the profiles.
BarrierReport barrier_check(const BarrierParams& p, double alpha, double lambda,
                            int n = 64);

struct DecayFit {
    double rate = 0.0;      // slope of -log(V y^(1/2 - a)) on the fit window
    double rate_raw = 0.0;  // same without the prefactor correction
    double stderr_rate = 0.0;
    double window_lo = 0.0, window_hi = 0.0;
};

// Exponential decay in y along the midline s = lambda/2, fitted by least
// squares on the window [0.45 L, 0.75 L] in the strongest radial column.
DecayFit decay_rate(const CylGrid& g, const ReducedField& f);

}  // namespace fracscrew::helicoid3d
