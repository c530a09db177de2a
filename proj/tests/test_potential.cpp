#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "fracscrew/potential.hpp"

using namespace fracscrew::potential;

namespace {

std::vector<double> grid_pm2() {
    std::vector<double> g;
    for (int i = -200; i <= 200; ++i) g.push_back(i * 0.01);
    return g;
}

bool mentions(const ValidationReport& rep, const std::string& needle) {
    return std::any_of(rep.violations.begin(), rep.violations.end(),
                       [&](const std::string& v) { return v.find(needle) != std::string::npos; });
}

} // namespace

TEST_CASE("quartic well passes validation on [-2,2]") {
    auto rep = validate(DoubleWellPotential::quartic(0.25), grid_pm2());
    CHECK(rep.ok);
    CHECK(rep.violations.empty());
}

TEST_CASE("single well t^2 is flagged at the origin") {
    DoubleWellPotential p;
    p.F = [](double t) { return t * t; };
    p.dF = [](double t) { return 2.0 * t; };
    p.ddF = [](double) { return 2.0; };
    auto rep = validate(p, grid_pm2());
    CHECK_FALSE(rep.ok);
    CHECK(mentions(rep, "F''(0)<0 violated"));
}

TEST_CASE("odd perturbation breaks evenness") {
    auto q = DoubleWellPotential::quartic(0.25);
    DoubleWellPotential p = q;
    p.F = [q](double t) { return q.F(t) + 0.1 * t; };
    p.dF = [q](double t) { return q.dF(t) + 0.1; };
    auto rep = validate(p, grid_pm2());
    CHECK_FALSE(rep.ok);
    CHECK(mentions(rep, "evenness violated"));
}

TEST_CASE("non-finite values are rejected") {
    DoubleWellPotential p = DoubleWellPotential::quartic(0.25);
    p.F = [](double t) { return t == 0.0 ? std::nan("") : t * t; };
    auto rep = validate(p, grid_pm2());
    CHECK_FALSE(rep.ok);
    CHECK(mentions(rep, "non-finite"));
}

TEST_CASE("critical pitch for the reference quartic") {
    auto p = DoubleWellPotential::quartic(0.25); // F''(0) = -1
    CHECK(p.ddF(0.0) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(lambda_star(p, 0.5) == doctest::Approx(M_PI).epsilon(1e-14));
    // unit curvature: any alpha gives pi
    for (double a : {0.1, 0.3, 0.77})
        CHECK(lambda_star(p, a) == doctest::Approx(M_PI).epsilon(1e-14));
}

TEST_CASE("critical pitch from the defining formula") {
    DoubleWellPotential p = DoubleWellPotential::quartic(4.0); // F''(0) = -16
    CHECK(p.ddF(0.0) == doctest::Approx(-16.0).epsilon(1e-15));
    CHECK(lambda_star(p, 0.5) == doctest::Approx(M_PI / 16.0).epsilon(1e-14));
    CHECK(lambda_star(p, 0.25) == doctest::Approx(M_PI / 256.0).epsilon(1e-14));
}

TEST_CASE("pitch is monotone decreasing in the well curvature") {
    double prev = 1e300;
    for (double c : {0.1, 0.25, 0.5, 1.0, 2.0, 4.0}) {
        double ls = lambda_star(DoubleWellPotential::quartic(c), 0.4);
        CHECK(ls < prev);
        prev = ls;
        // symbolic differentiation of c(1-t^2)^2 gives F''(0) = -4c
        CHECK(lambda_star(DoubleWellPotential::quartic(c), 0.5) ==
              doctest::Approx(M_PI / (4.0 * c)).epsilon(1e-13));
    }
}

TEST_CASE("lambda_star rejects bad input") {
    DoubleWellPotential p;
    p.F = [](double t) { return t * t; };
    p.dF = [](double t) { return 2.0 * t; };
    p.ddF = [](double) { return 2.0; };
    CHECK_THROWS_AS(lambda_star(p, 0.5), std::domain_error);
    CHECK_THROWS_AS(lambda_star(DoubleWellPotential::quartic(0.25), 1.0), std::domain_error);
    CHECK_THROWS_AS(lambda_star(DoubleWellPotential::quartic(0.25), 0.0), std::domain_error);
}

TEST_CASE("spec strings parse to the right families") {
    auto p = DoubleWellPotential::parse("family=quartic c=0.5");
    CHECK(p.F(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK_THROWS(DoubleWellPotential::parse("family=unknown"));
    CHECK_THROWS(DoubleWellPotential::parse("oops"));
}

TEST_CASE("tabulated potential round-trips the quartic") {
    auto q = DoubleWellPotential::quartic(0.25);
    std::string path = "pot_table_test.csv";
    {
        std::ofstream f(path);
        f.precision(17);
        f << "t,F,dF,ddF\n";
        for (int i = -300; i <= 300; ++i) {
            double t = i * 0.01;
            f << t << "," << q.F(t) << "," << q.dF(t) << "," << q.ddF(t) << "\n";
        }
    }
    auto p = DoubleWellPotential::from_table(path);
    for (double t : {-1.37, -0.5, 0.0, 0.221, 1.0, 1.9}) {
        CHECK(p.F(t) == doctest::Approx(q.F(t)).epsilon(1e-7));
        CHECK(p.dF(t) == doctest::Approx(q.dF(t)).epsilon(1e-6));
    }
    auto rep = validate(p, default_t_grid());
    CHECK(rep.ok);
    std::remove(path.c_str());
}

TEST_CASE("default grid is symmetric and hits the wells") {
    auto g = default_t_grid();
    CHECK(g.front() == doctest::Approx(-g.back()).epsilon(1e-15));
    CHECK(std::any_of(g.begin(), g.end(),
                      [](double t) { return std::abs(t - 1.0) < 1e-12; }));
}
