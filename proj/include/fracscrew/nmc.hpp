#pragma once

#include <array>
#include <functional>
#include <vector>

namespace fracscrew::nmc {

// The two open chambers cut out by the double-sheet screw surface, plus the
// surface itself (detected within a 1e-12 phase band).
enum class RegionLabel { Plus, Minus, Boundary };

struct ScrewSurface {
    double lambda;
    explicit ScrewSurface(double lambda_);
};

// Label by the phase g = (pi x3 / lambda - atan2(x2, x1)) mod 2pi:
// (0, pi) is Plus, (pi, 2pi) is Minus. The axis belongs to the surface.
RegionLabel classify(double x1, double x2, double x3, const ScrewSurface& s);

// The chamber-swapping involution (x1, x2, x3) -> (x1, -x2, -x3). It is a
// rigid motion, preserves distances to any point on the positive x1-axis,
// and exchanges Plus and Minus.
std::array<double, 3> symmetry_map(const std::array<double, 3>& x);

// Set membership for quadrature: +1 inside, -1 outside, 0 on the boundary.
using Classifier = std::function<int(double, double, double)>;

Classifier helicoid_classifier(const ScrewSurface& s);
Classifier halfspace_classifier();              // { x3 < 0 }
Classifier ball_classifier(double radius);      // centered at the origin

// Principal value quadrature controls. The exclusion radii drive the
// Richardson extrapolation of the PV limit; everything integrates over
// spherical shells centered at the evaluation point, where the kernel is
// constant and set asymmetry reduces to signed arcs.
struct PVQuadrature {
    std::vector<double> deltas{0.08, 0.04, 0.02};  // any order; sorted internally
    double rho_max = 64.0;
    int n_azimuth = 64;       // sign-transition scan resolution per circle
    int polar_depth = 24;     // adaptive bisection depth across each shell
    int radial_depth = 32;    // refinement budget of the shell-radius integration
    int box_depth = 24;       // bisection depth when resolving sets into boxes
};

struct NmcResult {
    double value;
    double pv_extrapolation_error;
    double tail_bound;        // 4 pi rho_max^(-2a) / (2a), the full-measure bound
    long node_count;
};

// Nonlocal mean curvature at a boundary point, sign convention: positive
// where the complement dominates (a convex body has positive curvature).
// Requires alpha in (0, 1/2) and cls(x0) == 0.
NmcResult nmc_at(const Classifier& cls, const std::array<double, 3>& x0, double alpha,
                 const PVQuadrature& q);

// The pairing transcription for the screw surface at x0 = (t0, 0, 0): sample
// only the Plus chamber and subtract the kernel at the mapped point. Distances
// agree exactly in floating point, so the sum cancels to rounding regardless
// of resolution. A nonzero lambda_pair builds the paired samples from a
// different pitch, deliberately breaking the cancellation (negative control).
double nmc_helicoid_symmetrized(double t0, double lambda, double alpha,
                                const PVQuadrature& q, double lambda_pair = 0.0);

// Interaction energy of two disjoint intervals under the kernel
// |x-y|^(-1-2a). Touching endpoints are allowed; accuracy near the contact
// degrades as alpha approaches 1/2. Symmetric by canonical argument order.
struct Interval {
    double lo, hi;
};
double interaction_L(const Interval& A, const Interval& B, double alpha);

struct BoxWindow {
    std::array<double, 3> lo, hi;
};

// Interaction of two disjoint sets carved out of enclosing boxes by
// classifiers, kernel |x-y|^(-3-2a). Each set is resolved into pure boxes by
// recursive bisection, then box pairs integrate through the overlap-
// correlation form. Overlapping sets are rejected (sampled check).
double interaction_L(const Classifier& A, const BoxWindow& boxA, const Classifier& B,
                     const BoxWindow& boxB, double alpha, int split_depth = 18);

struct PerimeterResult {
    double value;        // truncated at the rho_max box
    double tail_bound;
    long node_count;
};

// Fractional perimeter of E relative to the window: the interaction of
// E inside the window with the whole complement plus the interaction of E
// outside the window with the complement inside it, both truncated to the
// box [-rho_max, rho_max]^3. Requires alpha in (0, 1/2).
PerimeterResult fractional_perimeter(const Classifier& cls, const BoxWindow& omega,
                                     double alpha, const PVQuadrature& q);

}  // namespace fracscrew::nmc
