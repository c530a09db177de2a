#pragma once

#include <vector>

#include "fracscrew/potential.hpp"

namespace fracscrew::strip1d {

// Tensor grid for the truncated half-strip [0,lambda] x [0,height]:
// uniform s-nodes, graded y-nodes y_j = height (j/ny)^grading. All weighted
// y-integrals (node dual masses, edge conductances) are closed-form, so the
// degenerate weight y^{1-2a} is never sampled at y=0.
struct StripGrid {
    double lambda = 0.0;
    double alpha = 0.0;
    double height = 0.0;
    int ns = 0, ny = 0;
    double grading = 1.0;
    double ds = 0.0;

    std::vector<double> y;         // ny+1 node heights
    std::vector<double> node_mass; // integral of y^{1-2a} over the dual cell of node j
    std::vector<double> edge_coef; // integral over [y_j, y_{j+1}] divided by dy_j^2

    // height <= 0 picks the default 12*lambda/pi (several decay lengths of
    // the slowest extension mode)
    StripGrid(double lambda, double alpha, int ns, int ny, double height = 0.0);
};

// Nodal values on the closed grid; zero rows/columns at s = 0, s = lambda
// and y = height are stored explicitly.
struct StripField {
    int ns = 0, ny = 0;
    std::vector<double> v; // (ns+1)*(ny+1), index i*(ny+1)+j

    double& at(int i, int j) { return v[static_cast<size_t>(i) * (ny + 1) + j]; }
    double at(int i, int j) const { return v[static_cast<size_t>(i) * (ny + 1) + j]; }
    double sup() const;

    static StripField zero(const StripGrid& g);
    // amplitude * sin(pi s/lambda) * phi2(pi y/lambda), the destabilizing direction
    static StripField mode(const StripGrid& g, double amplitude);
};

// (1/(2 c_a)) * finite-volume Dirichlet form + trapezoid trace term of F(V(.,0)).
// Exactly lambda*F(0) for the zero field.
double energy_E0(const StripGrid& g, const StripField& f,
                 const potential::DoubleWellPotential& pot);

// raw nodal gradient of energy_E0 with respect to the interior unknowns
// (i = 1..ns-1, j = 0..ny-1); boundary entries are zero
std::vector<double> energy_gradient(const StripGrid& g, const StripField& f,
                                    const potential::DoubleWellPotential& pot);

struct MinimizeOptions {
    double tol_energy = 1e-12;  // relative energy decrease
    double tol_residual = 1e-8; // L1 norm of the projected gradient
    int max_iter = 50000;
    double lo = -1.0, hi = 1.0; // box; lo is raised to 0 for nonnegative inits
};

struct MinimizeResult {
    StripField field;
    double energy = 0.0;
    double residual = 0.0; // L1 projected-gradient defect at exit
    int iterations = 0;
};

// Projected gradient descent with backtracking line search, preconditioned by
// the exact inverse of the quadratic part (sine transform in s, tridiagonal
// solves in y). Throws NonConvergenceError past max_iter.
MinimizeResult minimize_strip(const StripGrid& g,
                              const potential::DoubleWellPotential& pot,
                              const StripField& init, MinimizeOptions opts = {});

struct ScanRow {
    double lambda = 0.0;
    double sup = 0.0;
    double energy = 0.0;
    double trivial_energy = 0.0; // lambda*F(0)
};

struct ScanResult {
    std::vector<ScanRow> rows;
    bool bracketed = false;
    double crossing_lo = 0.0, crossing_hi = 0.0;
    double crossing = 0.0; // bisection estimate of the bifurcation pitch
};

// Minimize at each pitch, classify trivial vs nontrivial by sup > 0.05, and
// bisect the bracket where the transition happens.
ScanResult threshold_scan(const potential::DoubleWellPotential& pot, double alpha,
                          const std::vector<double>& lambdas, int ns = 96, int ny = 96,
                          int bisection_steps = 12);

struct ExpansionCheck {
    double slope = 0.0;      // fitted coefficient of eps^2
    double quartic = 0.0;    // fitted coefficient of eps^4
    double reference = 0.0;  // (lambda/4)((pi/lambda)^{2a} + F''(0))
    double fit_residual = 0.0;
    bool warning = false;
};

// Fit E0(eps*w) - lambda F(0) = slope*eps^2 + quartic*eps^4 over eps_list.
ExpansionCheck quadratic_expansion_check(const potential::DoubleWellPotential& pot,
                                         double alpha, double lambda,
                                         const std::vector<double>& eps_list,
                                         int ns = 160, int ny = 192);

struct IdentityResult {
    double value = 0.0;     // ds * sum_i w_hat(s_i) (F'(V_i0) + theta * V_i0)
    double theta = 0.0;     // discrete flat-trace rate of the first mode
    double continuum = 0.0; // (pi/lambda)^{2a}
    double value_continuum = 0.0; // same sum with the continuum rate
};

// Pairing of the energy gradient with the discrete first-mode trace eigenfield:
// exactly <grad E(V), w_hat> by summation by parts, so it vanishes at interior
// critical points up to the optimizer residual.
IdentityResult nonexistence_identity(const StripGrid& g, const StripField& f,
                                     const potential::DoubleWellPotential& pot);

} // namespace fracscrew::strip1d
