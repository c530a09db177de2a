#include "fracscrew/potential.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace fracscrew::potential {

DoubleWellPotential DoubleWellPotential::quartic(double c) {
    if (!(c > 0.0)) throw std::domain_error("quartic well height must be positive");
    DoubleWellPotential p;
    p.F = [c](double t) { double u = 1.0 - t * t; return c * u * u; };
    p.dF = [c](double t) { return -4.0 * c * t * (1.0 - t * t); };
    p.ddF = [c](double t) { return c * (12.0 * t * t - 4.0); };
    std::ostringstream os;
    os << "quartic c=" << c;
    p.description = os.str();
    return p;
}

namespace {

struct Table {
    std::vector<double> t, F, dF, ddF;
};

Table read_table(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open potential table: " + path);
    Table tab;
    std::string line;
    bool header = true;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        if (header) { header = false; continue; }
        std::istringstream row(line);
        double v[4];
        char comma;
        row >> v[0] >> comma >> v[1] >> comma >> v[2] >> comma >> v[3];
        if (!row) throw std::runtime_error("malformed potential table row: " + line);
        tab.t.push_back(v[0]);
        tab.F.push_back(v[1]);
        tab.dF.push_back(v[2]);
        tab.ddF.push_back(v[3]);
    }
    if (tab.t.size() < 2) throw std::runtime_error("potential table too short");
    for (size_t i = 1; i < tab.t.size(); ++i)
        if (!(tab.t[i] > tab.t[i - 1]))
            throw std::runtime_error("potential table abscissae must increase");
    return tab;
}

// cubic Hermite through (t_i, v_i) with slopes s_i
double hermite(const std::vector<double>& t, const std::vector<double>& v,
               const std::vector<double>& s, double x) {
    if (x <= t.front()) return v.front() + s.front() * (x - t.front());
    if (x >= t.back()) return v.back() + s.back() * (x - t.back());
    size_t i = std::upper_bound(t.begin(), t.end(), x) - t.begin() - 1;
    double h = t[i + 1] - t[i], u = (x - t[i]) / h;
    double h00 = (1 + 2 * u) * (1 - u) * (1 - u), h10 = u * (1 - u) * (1 - u);
    double h01 = u * u * (3 - 2 * u), h11 = u * u * (u - 1);
    return h00 * v[i] + h10 * h * s[i] + h01 * v[i + 1] + h11 * h * s[i + 1];
}

double linear(const std::vector<double>& t, const std::vector<double>& v, double x) {
    if (x <= t.front()) return v.front();
    if (x >= t.back()) return v.back();
    size_t i = std::upper_bound(t.begin(), t.end(), x) - t.begin() - 1;
    double u = (x - t[i]) / (t[i + 1] - t[i]);
    return (1 - u) * v[i] + u * v[i + 1];
}

} // namespace

DoubleWellPotential DoubleWellPotential::from_table(const std::string& csv_path) {
    auto tab = std::make_shared<Table>(read_table(csv_path));
    DoubleWellPotential p;
    p.F = [tab](double x) { return hermite(tab->t, tab->F, tab->dF, x); };
    p.dF = [tab](double x) { return hermite(tab->t, tab->dF, tab->ddF, x); };
    p.ddF = [tab](double x) { return linear(tab->t, tab->ddF, x); };
    p.description = "table " + csv_path;
    return p;
}

DoubleWellPotential DoubleWellPotential::parse(const std::string& text) {
    std::istringstream is(text);
    std::string tok, family, file;
    double c = 0.25;
    while (is >> tok) {
        auto eq = tok.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("potential spec token without '=': " + tok);
        std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
        if (key == "family") family = val;
        else if (key == "c") c = std::stod(val);
        else if (key == "file") file = val;
        else throw std::invalid_argument("unknown potential spec key: " + key);
    }
    if (family == "quartic" || family.empty()) return quartic(c);
    if (family == "table") return from_table(file);
    throw std::invalid_argument("unknown potential family: " + family);
}

std::vector<double> default_t_grid(int n, double tmax) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = -tmax + 2.0 * tmax * i / (n - 1);
    return g;
}

ValidationReport validate(const DoubleWellPotential& pot,
                          const std::vector<double>& t_grid, double tol) {
    ValidationReport rep;
    auto flag = [&rep](const std::string& msg) {
        rep.ok = false;
        rep.violations.push_back(msg);
    };

    for (double t : t_grid) {
        double v = pot.F(t);
        if (!std::isfinite(v) || !std::isfinite(pot.dF(t)) || !std::isfinite(pot.ddF(t))) {
            flag("non-finite value at t=" + std::to_string(t));
            return rep;
        }
        if (std::abs(v - pot.F(-t)) > tol) {
            flag("evenness violated");
            break;
        }
    }

    double F1 = pot.F(1.0);
    bool min_ok = true, well_only = true;
    for (double t : t_grid) {
        double v = pot.F(t);
        if (v < F1 - tol) min_ok = false;
        double dist = std::min(std::abs(t - 1.0), std::abs(t + 1.0));
        if (v <= F1 + tol && dist > 1e-6) well_only = false;
    }
    if (!min_ok) flag("minimum below F(1) found away from the wells");
    if (!well_only) flag("global minimum attained away from t=+-1");

    if (!(pot.ddF(0.0) < -tol)) flag("F''(0)<0 violated");

    double dd0 = pot.ddF(0.0);
    for (double t : t_grid) {
        if (t < 0.0) continue;
        if (dd0 * t > pot.dF(t) + 1e-8) {
            flag("F''(0) t <= F'(t) violated on t>=0");
            break;
        }
    }

    // FD consistency of the derivative chain. Tolerances leave room for the
    // second-order interpolation error of tabulated wells (step ~0.01);
    // closed-form families sit many orders below them.
    const double h = 1e-5;
    for (double t : t_grid) {
        double fd = (pot.F(t + h) - pot.F(t - h)) / (2.0 * h);
        if (std::abs(fd - pot.dF(t)) > 1e-5 * (1.0 + std::abs(pot.dF(t)))) {
            flag("finite difference of F inconsistent with dF");
            break;
        }
    }
    for (double t : t_grid) {
        double fd = (pot.dF(t + h) - pot.dF(t - h)) / (2.0 * h);
        if (std::abs(fd - pot.ddF(t)) > 1e-4 * (1.0 + std::abs(pot.ddF(t)))) {
            flag("finite difference of dF inconsistent with ddF");
            break;
        }
    }
    return rep;
}

double lambda_star(const DoubleWellPotential& pot, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("lambda_star: alpha must lie in (0,1)");
    double dd0 = pot.ddF(0.0);
    if (!(dd0 < 0.0))
        throw std::domain_error("lambda_star: not a double well at the origin (F''(0) >= 0)");
    return M_PI / std::pow(-dd0, 1.0 / (2.0 * alpha));
}

} // namespace fracscrew::potential
