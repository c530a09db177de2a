#pragma once

#include <functional>
#include <string>
#include <vector>

namespace fracscrew::potential {

// Even double-well potential F with wells at t = +-1 and a hilltop at t = 0.
// eval_F/eval_dF/eval_ddF are kept as separate callables so tabulated wells
// can be dropped in next to the built-in quartic family c*(1-t^2)^2.
struct DoubleWellPotential {
    std::function<double(double)> F;
    std::function<double(double)> dF;
    std::function<double(double)> ddF;
    std::string description;

    static DoubleWellPotential quartic(double c = 0.25);
    // CSV table with header t,F,dF,ddF; cubic Hermite in between.
    static DoubleWellPotential from_table(const std::string& csv_path);
    // "family=quartic c=0.25" or "family=table file=path.csv"
    static DoubleWellPotential parse(const std::string& text);
};

struct ValidationReport {
    bool ok = true;
    std::vector<std::string> violations;
};

// Checks, on the given t-grid, with tolerance tol:
//   evenness, global minima only near t=+-1, F''(0)<0,
//   F''(0)*t <= F'(t) for t>=0, and FD consistency of dF against F.
ValidationReport validate(const DoubleWellPotential& pot,
                          const std::vector<double>& t_grid, double tol = 1e-10);

// symmetric about 0 and contains +-1 exactly (default step 0.005)
std::vector<double> default_t_grid(int n = 601, double tmax = 1.5);

// Critical pitch lambda* = pi / (-F''(0))^(1/(2*alpha)).
// Requires alpha in (0,1) and F''(0) < 0.
double lambda_star(const DoubleWellPotential& pot, double alpha);

} // namespace fracscrew::potential
