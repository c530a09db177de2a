#pragma once

#include <vector>

namespace fracscrew::spectral1d {

// Expansion in the Dirichlet sine basis on (0, lambda),
//   zeta_k(s) = sqrt(2/lambda) sin(k pi s / lambda),  mu_k = (k pi / lambda)^2,
// orthonormal in L^2, so Parseval holds with no extra factors.
struct SineExpansion {
    double lambda = 0.0;
    std::vector<double> coeffs; // a_k for k = 1..K at index k-1

    int modes() const { return static_cast<int>(coeffs.size()); }
    double mu(int k) const; // k-th Dirichlet eigenvalue, k >= 1
};

// samples live on the uniform closed grid s_i = i lambda / N, i = 0..N;
// both endpoint samples must vanish (within 1e-12 of the sample scale).
// analyze returns the full discrete basis K = N-1; exact for band-limited data.
SineExpansion analyze(const std::vector<double>& samples, double lambda);
std::vector<double> synthesize(const SineExpansion& e, int n_intervals);
double synthesize_at(const SineExpansion& e, double s);

// coefficient-wise spectral power: a_k -> mu_k^alpha a_k
SineExpansion frac_laplacian(const SineExpansion& e, double alpha);

// samples of the alpha-harmonic extension sum a_k zeta_k(s) phi2(sqrt(mu_k) y)
// at height y >= 0 on the same uniform grid
std::vector<double> extend(const SineExpansion& e, double alpha, double y,
                           int n_intervals);
double extend_at(const SineExpansion& e, double alpha, double s, double y);

// Dirichlet-to-Neumann route: per mode, Richardson-extrapolate
//   -y^{1-2a} d/dy phi2(sqrt(mu_k) y) / c_alpha  as y -> 0+.
// Agrees with frac_laplacian coefficient-by-coefficient.
SineExpansion neumann_derivative(const SineExpansion& e, double alpha);

} // namespace fracscrew::spectral1d
