#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace fracscrew::quad {

struct GaussRule {
    std::vector<double> x; // nodes on [-1,1]
    std::vector<double> w;
};

// Gauss-Legendre nodes/weights, cached per order.
const GaussRule& gauss_legendre(int n);

// integral of f over [a,b] with an n-point Gauss rule
double integrate(const std::function<double(double)>& f, double a, double b, int n = 16);

// adaptive Simpson, absolute tolerance
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double tol, int max_depth = 40);

struct Extrapolation {
    double value = 0.0;
    double error = 0.0;  // spread of the last Neville column
    int levels = 0;
    bool converged = false;
};

// Generalized Richardson (Neville) extrapolation h -> 0 of g(h) sampled on the
// geometric ladder h_l = h0 / ratio^l, l = 0..n-1, assuming the error model
//   g(h) = g0 + c0 h^{p0} + c1 h^{p1} + ...
// with the exponents supplied in ascending order.
Extrapolation richardson(const std::vector<double>& samples,
                         const std::vector<double>& exponents,
                         double ratio);

} // namespace fracscrew::quad
