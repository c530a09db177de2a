#pragma once

namespace fracscrew::specfun {

// Modified Bessel functions of non-integer order for positive real argument.
//
// bessel_i: ascending series (DLMF 10.25.2) for y <= y_switch, compound
//   large-argument expansion (DLMF 10.40.5) beyond.
// bessel_z: second-kind function K_nu. Reflection series
//   K = pi/(2 sin(pi nu)) (I_{-nu} - I_nu) at small y, Steed's continued
//   fraction (Thompson & Barnett 1987) in the middle band where the
//   reflection cancels too many digits, large-argument expansion beyond
//   y_switch. Orders in (0,2) via the three-term recurrence.
double bessel_i(double nu, double y);
double bessel_z(double nu, double y);

double y_switch(); // series/asymptotic handover point (12)

// Individual evaluation branches, exposed so the agreement of adjacent
// schemes at their handover points can be checked directly.
namespace branches {
double i_series(double nu, double y);
double i_asymptotic(double nu, double y);
double k_reflection(double nu, double y);   // 0 < nu < 1
double k_continued_fraction(double nu, double y);
double k_asymptotic(double nu, double y);
} // namespace branches

// Energy normalization of the degenerate extension: 2^{1-2a} Gamma(1-a)/Gamma(a).
double c_alpha(double alpha);

// Solutions of  phi'' + (1-2a)/y phi' - phi = 0  on (0,inf):
//   phi1(y) = y^a I_a(y)            growing branch, phi1(0) = 0,
//   phi2(y) = y^a K_a(y) / (2^{a-1} Gamma(a))   decaying branch, phi2(0) = 1.
// Derivatives come from (y^a K_a)' = -y^a K_{1-a} and (y^a I_a)' = y^a I_{a-1};
// second derivatives from the K'/I' averaging identities, so the three values
// are assembled from Bessel evaluations at orders a, 1-a, a-1, 2-a.
class ExtensionProfile {
public:
    explicit ExtensionProfile(double alpha);

    double alpha() const { return alpha_; }

    double phi1(double y) const;
    double phi2(double y) const;
    double dphi1(double y) const;
    double dphi2(double y) const;
    double ddphi1(double y) const;
    double ddphi2(double y) const;

    // residual of the rescaled equation
    //   d/dy (y^{1-2a} d/dy phi(mu y)) - y^{1-2a} mu^2 phi(mu y)
    enum class Which { phi1, phi2, one };
    double rescaled_residual(double mu, double y, Which which) const;

private:
    double alpha_;
    double norm_; // 2^{1-a} / Gamma(a)
};

struct TraceResult {
    double value = 0.0;
    double error = 0.0;
    int levels = 0;
};

// Numerical limit -y^{1-2a} phi2'(y) as y -> 0+, Richardson-extrapolated over
// a halving ladder with the exponent ladder {2-2a, 2, 4-2a, 4, ...}.
// Converges to c_alpha(alpha).
TraceResult neumann_trace(double alpha, double y0 = 0.5, int levels = 11);

} // namespace fracscrew::specfun
