#include "fracscrew/cli.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fracscrew/errors.hpp"
#include "fracscrew/helicoid3d.hpp"
#include "fracscrew/io.hpp"
#include "fracscrew/nmc.hpp"
#include "fracscrew/potential.hpp"
#include "fracscrew/specfun.hpp"
#include "fracscrew/spectral1d.hpp"
#include "fracscrew/strip1d.hpp"

namespace fracscrew::cli {
namespace {

const double kPi = 3.14159265358979323846;

using clock_type = std::chrono::steady_clock;
using io::format_double;

double seconds_since(clock_type::time_point start) {
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

// `--config path` supplies line-based key=value defaults. A pair is applied
// only when the matching --key is absent from the command line, so explicit
// flags always win over the file.
void merge_config(std::vector<std::string>& args) {
    std::string path;
    for (size_t i = 0; i < args.size();) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size())
                throw std::invalid_argument("--config expects a file path");
            path = args[i + 1];
            args.erase(args.begin() + i, args.begin() + i + 2);
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + i);
        } else {
            ++i;
        }
    }
    if (path.empty()) return;
    std::istringstream in(io::read_file(path));
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        size_t eq = line.find('=');
        std::string key = eq == std::string::npos ? "" : trim(line.substr(0, eq));
        if (key.empty())
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        " is not key=value: " + line);
        std::string flag = "--" + key;
        bool present = false;
        for (const std::string& a : args)
            if (a == flag || a.rfind(flag + "=", 0) == 0) {
                present = true;
                break;
            }
        if (!present) args.push_back(flag + "=" + trim(line.substr(eq + 1)));
    }
}

// ---- output helpers -------------------------------------------------------

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

struct KV {
    std::string key;
    std::string raw;  // already-rendered JSON value
};

std::string json_object(const std::vector<KV>& kvs) {
    std::ostringstream os;
    os << "{\n";
    for (size_t i = 0; i < kvs.size(); ++i)
        os << "  \"" << kvs[i].key << "\": " << kvs[i].raw
           << (i + 1 < kvs.size() ? ",\n" : "\n");
    os << "}\n";
    return os.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << text;
}

void emit_manifest(const std::string& subcommand, const nlohmann::json& params,
                   const nlohmann::json& tols, double wall,
                   const std::vector<std::string>& outputs) {
    io::RunManifest m;
    m.subcommand = subcommand;
    m.parameters = params;
    m.tolerances = tols;
    m.wall_time_s = wall;
    m.outputs = outputs;
    m.write(outputs.front() + ".manifest.json");
}

// modes file: header row, then contiguous rows k,coeff for k = 1,2,...
std::vector<double> read_modes_csv(const std::string& path) {
    std::istringstream in(io::read_file(path));
    std::string line;
    if (!std::getline(in, line))
        throw std::invalid_argument("modes file is empty: " + path);
    std::vector<double> coeffs;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty()) continue;
        size_t comma = line.find(',');
        if (comma == std::string::npos)
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": expected k,coeff");
        int k = std::stoi(line.substr(0, comma));
        double c = std::stod(line.substr(comma + 1));
        if (k != static_cast<int>(coeffs.size()) + 1)
            throw std::invalid_argument(path + ": mode indices must run 1,2,... without gaps");
        coeffs.push_back(c);
    }
    if (coeffs.empty()) throw std::invalid_argument("modes file has no rows: " + path);
    return coeffs;
}

// ---- subcommands ------------------------------------------------------------

struct ValidateOpts {
    std::string potential = "family=quartic c=0.25";
    int n = 601;
    double tmax = 1.5;
    double tol = 1e-10;
    std::string out = "report.json";
};

int run_validate(const ValidateOpts& o) {
    auto start = clock_type::now();
    auto pot = potential::DoubleWellPotential::parse(o.potential);
    auto rep = potential::validate(pot, potential::default_t_grid(o.n, o.tmax), o.tol);
    std::ostringstream viol;
    viol << "[";
    for (size_t i = 0; i < rep.violations.size(); ++i)
        viol << "\"" << json_escape(rep.violations[i]) << "\""
             << (i + 1 < rep.violations.size() ? ", " : "");
    viol << "]";
    double wall = seconds_since(start);
    std::string doc = json_object({{"ok", rep.ok ? "true" : "false"},
                                   {"violations", viol.str()},
                                   {"wall_time", format_double(wall)}});
    write_text(o.out, doc);
    std::cout << doc;
    emit_manifest("validate",
                  {{"potential", o.potential}, {"n", o.n}, {"tmax", o.tmax}, {"out", o.out}},
                  {{"tol", o.tol}}, wall, {o.out});
    return rep.ok ? 0 : 1;
}

struct SpecfunOpts {
    double alpha = 0.0;
    double ymax = 10.0;
    double step = 0.1;
    std::string out = "profile.csv";
};

int run_specfun(const SpecfunOpts& o) {
    auto start = clock_type::now();
    if (!(o.step > 0.0)) throw std::invalid_argument("specfun: step must be positive");
    if (!(o.ymax >= o.step)) throw std::invalid_argument("specfun: ymax must be >= step");
    specfun::ExtensionProfile prof(o.alpha);
    io::CsvWriter csv({"y", "phi1", "phi2", "residual"});
    long n = std::lround(std::floor(o.ymax / o.step + 1e-9));
    for (long i = 1; i <= n; ++i) {
        double y = static_cast<double>(i) * o.step;
        csv.row({y, prof.phi1(y), prof.phi2(y),
                 prof.rescaled_residual(1.0, y, specfun::ExtensionProfile::Which::phi2)});
    }
    csv.write(o.out);
    double wall = seconds_since(start);
    emit_manifest("specfun",
                  {{"alpha", o.alpha}, {"ymax", o.ymax}, {"step", o.step}, {"out", o.out}},
                  nlohmann::json::object(), wall, {o.out});
    std::cout << "specfun: wrote " << n << " rows to " << o.out << "\n";
    return 0;
}

struct Extend1dOpts {
    double alpha = 0.0;
    double lambda = 0.0;
    std::string modes;
    std::vector<double> heights;
    int ns = 128;
    std::string out = "ext.csv";
};

int run_extend1d(const Extend1dOpts& o) {
    auto start = clock_type::now();
    spectral1d::SineExpansion e;
    e.lambda = o.lambda;
    e.coeffs = read_modes_csv(o.modes);
    if (o.heights.empty()) throw std::invalid_argument("extend1d: --heights is empty");
    io::CsvWriter csv({"s", "y", "value"});
    for (double y : o.heights) {
        std::vector<double> vals = spectral1d::extend(e, o.alpha, y, o.ns);
        for (int i = 0; i <= o.ns; ++i)
            csv.row({static_cast<double>(i) * o.lambda / o.ns, y, vals[i]});
    }
    csv.write(o.out);
    double wall = seconds_since(start);
    emit_manifest("extend1d",
                  {{"alpha", o.alpha},
                   {"lambda", o.lambda},
                   {"modes", o.modes},
                   {"heights", o.heights},
                   {"ns", o.ns},
                   {"out", o.out}},
                  nlohmann::json::object(), wall, {o.out});
    std::cout << "extend1d: wrote " << csv.rows.size() << " rows to " << o.out << "\n";
    return 0;
}

struct Minimize1dOpts {
    double alpha = 0.0;
    double lambda = 0.0;
    int ns = 128;
    int ny = 128;
    double height = 0.0;
    double amplitude = 0.5;
    std::string potential = "family=quartic c=0.25";
    std::string out = "field.csv";
    strip1d::MinimizeOptions mo;
};

int run_minimize1d(const Minimize1dOpts& o) {
    auto start = clock_type::now();
    auto pot = potential::DoubleWellPotential::parse(o.potential);
    strip1d::StripGrid g(o.lambda, o.alpha, o.ns, o.ny, o.height);
    auto res = strip1d::minimize_strip(g, pot, strip1d::StripField::mode(g, o.amplitude), o.mo);
    io::CsvWriter csv({"s", "y", "v"});
    for (int i = 0; i <= o.ns; ++i)
        for (int j = 0; j <= o.ny; ++j)
            csv.row({static_cast<double>(i) * g.ds, g.y[j], res.field.at(i, j)});
    csv.write(o.out);
    double wall = seconds_since(start);
    emit_manifest("minimize1d",
                  {{"alpha", o.alpha},
                   {"lambda", o.lambda},
                   {"ns", o.ns},
                   {"ny", o.ny},
                   {"height", g.height},
                   {"amplitude", o.amplitude},
                   {"potential", o.potential},
                   {"out", o.out}},
                  {{"tol_energy", o.mo.tol_energy},
                   {"tol_residual", o.mo.tol_residual},
                   {"max_iter", o.mo.max_iter}},
                  wall, {o.out});
    std::cout << "minimize1d: energy=" << format_double(res.energy)
              << " trivial=" << format_double(o.lambda * pot.F(0.0))
              << " sup=" << format_double(res.field.sup())
              << " residual=" << format_double(res.residual)
              << " iterations=" << res.iterations << "\n";
    return 0;
}

struct ThresholdOpts {
    double alpha = 0.0;
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    int steps = 0;
    int ns = 96;
    int ny = 96;
    int bisection_steps = 12;
    std::string potential = "family=quartic c=0.25";
    std::string out = "scan.csv";
};

int run_threshold(const ThresholdOpts& o) {
    auto start = clock_type::now();
    if (o.steps < 1) throw std::invalid_argument("threshold: steps must be >= 1");
    if (!(o.lambda_max >= o.lambda_min))
        throw std::invalid_argument("threshold: lambda-max must be >= lambda-min");
    auto pot = potential::DoubleWellPotential::parse(o.potential);
    std::vector<double> lambdas;
    for (int i = 0; i < o.steps; ++i)
        lambdas.push_back(o.steps == 1
                              ? o.lambda_min
                              : o.lambda_min +
                                    (o.lambda_max - o.lambda_min) * i / (o.steps - 1));
    auto scan = strip1d::threshold_scan(pot, o.alpha, lambdas, o.ns, o.ny, o.bisection_steps);
    io::CsvWriter csv({"lambda", "sup", "energy", "trivial_energy"});
    for (const auto& r : scan.rows) csv.row({r.lambda, r.sup, r.energy, r.trivial_energy});
    csv.write(o.out);
    double wall = seconds_since(start);
    emit_manifest("threshold",
                  {{"alpha", o.alpha},
                   {"lambda-min", o.lambda_min},
                   {"lambda-max", o.lambda_max},
                   {"steps", o.steps},
                   {"ns", o.ns},
                   {"ny", o.ny},
                   {"bisection-steps", o.bisection_steps},
                   {"potential", o.potential},
                   {"out", o.out}},
                  nlohmann::json::object(), wall, {o.out});
    std::cout << "threshold: wrote " << scan.rows.size() << " rows to " << o.out << "\n";
    if (scan.bracketed)
        std::cout << "threshold: crossing in [" << format_double(scan.crossing_lo) << ", "
                  << format_double(scan.crossing_hi) << "], bisected estimate "
                  << format_double(scan.crossing) << "\n";
    else
        std::cout << "threshold: no trivial/nontrivial crossing inside the scan range\n";
    return 0;
}

struct Minimize3dOpts {
    double alpha = 0.0;
    double lambda = 0.0;
    double R = 0.0;
    int nr = 32;
    int ns = 32;
    int ny = 32;
    double height = 0.0;
    double amplitude = 0.5;
    std::string potential = "family=quartic c=0.25";
    std::string out = "field3d.csv";
    helicoid3d::CylMinimizeOptions mo;
};

int run_minimize3d(const Minimize3dOpts& o) {
    auto start = clock_type::now();
    auto pot = potential::DoubleWellPotential::parse(o.potential);
    helicoid3d::CylGrid g(o.lambda, o.alpha, o.R, o.nr, o.ns, o.ny, o.height);
    auto res = helicoid3d::minimize_cyl(
        g, pot, helicoid3d::ReducedField::mode(g, o.amplitude), o.mo);
    io::CsvWriter csv({"r", "s", "y", "V"});
    for (int i = 0; i <= o.nr; ++i)
        for (int k = 0; k <= o.ns; ++k)
            for (int j = 0; j <= o.ny; ++j)
                csv.row({static_cast<double>(i) * g.dr, static_cast<double>(k) * g.ds,
                         g.y[j], res.field.at(i, k, j)});
    csv.write(o.out);
    auto fit = helicoid3d::decay_rate(g, res.field);
    double wall = seconds_since(start);
    emit_manifest("minimize3d",
                  {{"alpha", o.alpha},
                   {"lambda", o.lambda},
                   {"R", o.R},
                   {"nr", o.nr},
                   {"ns", o.ns},
                   {"ny", o.ny},
                   {"height", g.height},
                   {"amplitude", o.amplitude},
                   {"potential", o.potential},
                   {"out", o.out}},
                  {{"tol_energy", o.mo.tol_energy},
                   {"tol_residual", o.mo.tol_residual},
                   {"max_iter", o.mo.max_iter}},
                  wall, {o.out});
    std::cout << "minimize3d: energy=" << format_double(res.energy)
              << " sup=" << format_double(res.field.sup())
              << " residual=" << format_double(res.residual)
              << " iterations=" << res.iterations
              << " decay_rate=" << format_double(fit.rate) << "\n";
    return 0;
}

struct BarrierOpts {
    double alpha = 0.0;
    double lambda = 0.0;
    helicoid3d::BarrierParams p;
    int n = 64;
    std::string out = "barrier.json";
};

int run_barrier(const BarrierOpts& o) {
    auto start = clock_type::now();
    auto rep = helicoid3d::barrier_check(o.p, o.alpha, o.lambda, o.n);
    double wall = seconds_since(start);
    auto b = [](bool v) { return std::string(v ? "true" : "false"); };
    std::string doc = json_object({{"max_operator", format_double(rep.max_operator)},
                                   {"worst_r", format_double(rep.worst_r)},
                                   {"worst_s", format_double(rep.worst_s)},
                                   {"worst_y", format_double(rep.worst_y)},
                                   {"operator_nonpositive", b(rep.operator_nonpositive)},
                                   {"step_inequality_ok", b(rep.step_inequality_ok)},
                                   {"step_worst_value", format_double(rep.step_worst_value)},
                                   {"step_worst_r", format_double(rep.step_worst_r)},
                                   {"trace_domination", b(rep.trace_domination)},
                                   {"zero_on_s_planes", b(rep.zero_on_s_planes)},
                                   {"proof_range", b(rep.proof_range)},
                                   {"wall_time", format_double(wall)}});
    write_text(o.out, doc);
    std::cout << doc;
    emit_manifest("barrier",
                  {{"alpha", o.alpha},
                   {"lambda", o.lambda},
                   {"K", o.p.K},
                   {"C", o.p.C},
                   {"eps", o.p.eps},
                   {"n", o.n},
                   {"out", o.out}},
                  nlohmann::json::object(), wall, {o.out});
    return 0;
}

struct CompetitorOpts {
    double a = 0.7;
    double b = 0.9;
    std::vector<double> R_list;
    double alpha = 0.5;
    double lambda = 4.0;
    int ns = 96;
    int ny = 96;
    double height = 0.0;
    double amplitude = 0.5;
    std::string potential = "family=quartic c=0.25";
    std::string out = "competitor.csv";
};

int run_competitor(const CompetitorOpts& o) {
    auto start = clock_type::now();
    if (o.R_list.empty()) throw std::invalid_argument("competitor: --R-list is empty");
    auto pot = potential::DoubleWellPotential::parse(o.potential);
    strip1d::StripGrid g(o.lambda, o.alpha, o.ns, o.ny, o.height);
    auto res = strip1d::minimize_strip(g, pot, strip1d::StripField::mode(g, o.amplitude));
    io::CsvWriter csv({"R", "total", "bulk", "excess", "eps_margin", "excess_scaled"});
    for (double R : o.R_list) {
        helicoid3d::CompetitorParams p;
        p.a = o.a;
        p.b = o.b;
        p.radius = R;
        auto part = helicoid3d::competitor_energy(p, g, res.field, pot);
        csv.row({R, part.total, part.bulk, part.total - part.bulk, part.eps_margin,
                 part.excess_scaled});
    }
    csv.write(o.out);
    double wall = seconds_since(start);
    emit_manifest("competitor",
                  {{"a", o.a},
                   {"b", o.b},
                   {"R-list", o.R_list},
                   {"alpha", o.alpha},
                   {"lambda", o.lambda},
                   {"ns", o.ns},
                   {"ny", o.ny},
                   {"amplitude", o.amplitude},
                   {"potential", o.potential},
                   {"out", o.out}},
                  nlohmann::json::object(), wall, {o.out});
    std::cout << "competitor: wrote " << o.R_list.size() << " rows to " << o.out << "\n";
    return 0;
}

struct NmcOpts {
    std::string shape;
    double lambda = kPi;
    double t0 = 1.0;
    double alpha = 0.0;
    double radius = 1.0;
    std::vector<double> deltas;
    double rmax = 64.0;
    std::string out = "nmc.json";
};

int run_nmc(const NmcOpts& o) {
    auto start = clock_type::now();
    nmc::PVQuadrature q;
    q.rho_max = o.rmax;
    if (!o.deltas.empty()) q.deltas = o.deltas;
    nmc::Classifier cls;
    std::array<double, 3> x0{};
    if (o.shape == "helicoid") {
        cls = nmc::helicoid_classifier(nmc::ScrewSurface(o.lambda));
        x0 = {o.t0, 0.0, 0.0};
    } else if (o.shape == "ball") {
        cls = nmc::ball_classifier(o.radius);
        x0 = {0.0, 0.0, o.radius};
    } else {
        cls = nmc::halfspace_classifier();
        x0 = {0.0, 0.0, 0.0};
    }
    auto r = nmc::nmc_at(cls, x0, o.alpha, q);
    double wall = seconds_since(start);
    std::string doc =
        json_object({{"value", format_double(r.value)},
                     {"pv_extrapolation_error", format_double(r.pv_extrapolation_error)},
                     {"tail_bound", format_double(r.tail_bound)},
                     {"node_count", std::to_string(r.node_count)},
                     {"wall_time", format_double(wall)}});
    write_text(o.out, doc);
    std::cout << doc;
    emit_manifest("nmc",
                  {{"shape", o.shape},
                   {"lambda", o.lambda},
                   {"t0", o.t0},
                   {"alpha", o.alpha},
                   {"radius", o.radius},
                   {"deltas", q.deltas},
                   {"rmax", q.rho_max},
                   {"n_azimuth", q.n_azimuth},
                   {"polar_depth", q.polar_depth},
                   {"radial_depth", q.radial_depth},
                   {"out", o.out}},
                  nlohmann::json::object(), wall, {o.out});
    return 0;
}

struct PerimeterOpts {
    std::string shape;
    double alpha = 0.0;
    std::vector<double> window{-0.5, -0.5, -0.5, 0.5, 0.5, 0.5};
    double radius = 1.0;
    double rmax = 64.0;
    int box_depth = 12;
    std::string out = "per.json";
};

int run_perimeter(const PerimeterOpts& o) {
    auto start = clock_type::now();
    if (o.window.size() != 6)
        throw std::invalid_argument("perimeter: --window wants lo1,lo2,lo3,hi1,hi2,hi3");
    nmc::PVQuadrature q;
    q.rho_max = o.rmax;
    q.box_depth = o.box_depth;
    nmc::Classifier cls;
    if (o.shape == "ball")
        cls = nmc::ball_classifier(o.radius);
    else
        cls = nmc::halfspace_classifier();
    nmc::BoxWindow w{{o.window[0], o.window[1], o.window[2]},
                     {o.window[3], o.window[4], o.window[5]}};
    auto r = nmc::fractional_perimeter(cls, w, o.alpha, q);
    double wall = seconds_since(start);
    std::string doc = json_object({{"value", format_double(r.value)},
                                   {"tail_bound", format_double(r.tail_bound)},
                                   {"node_count", std::to_string(r.node_count)},
                                   {"wall_time", format_double(wall)}});
    write_text(o.out, doc);
    std::cout << doc;
    emit_manifest("perimeter",
                  {{"shape", o.shape},
                   {"alpha", o.alpha},
                   {"window", o.window},
                   {"radius", o.radius},
                   {"rmax", q.rho_max},
                   {"box-depth", q.box_depth},
                   {"out", o.out}},
                  nlohmann::json::object(), wall, {o.out});
    return 0;
}

}  // namespace

int dispatch(const std::vector<std::string>& args_in) {
    CLI::App app{"screw-symmetric fractional Allen-Cahn energies and nonlocal minimal surfaces",
                 "fracscrew"};
    app.require_subcommand(1);
    std::string config_doc;
    app.add_option("--config", config_doc,
                   "file of key=value lines filling in flags not given explicitly");

    int rc = 0;

    ValidateOpts vo;
    auto* sc_validate = app.add_subcommand("validate", "check a double-well potential spec");
    sc_validate->add_option("--potential", vo.potential, "potential spec")
        ->capture_default_str();
    sc_validate->add_option("--n", vo.n, "grid points")->capture_default_str();
    sc_validate->add_option("--tmax", vo.tmax, "grid half-width")->capture_default_str();
    sc_validate->add_option("--tol", vo.tol, "violation tolerance")->capture_default_str();
    sc_validate->add_option("--out", vo.out, "report path")->capture_default_str();
    sc_validate->callback([&] { rc = run_validate(vo); });

    SpecfunOpts so;
    auto* sc_specfun = app.add_subcommand("specfun", "tabulate the extension profiles");
    sc_specfun->add_option("--alpha", so.alpha, "fractional power in (0,1)")->required();
    sc_specfun->add_option("--ymax", so.ymax, "last height")->capture_default_str();
    sc_specfun->add_option("--step", so.step, "height increment")->capture_default_str();
    sc_specfun->add_option("--out", so.out, "csv path")->capture_default_str();
    sc_specfun->callback([&] { rc = run_specfun(so); });

    Extend1dOpts eo;
    auto* sc_extend = app.add_subcommand("extend1d", "harmonic extension of a sine expansion");
    sc_extend->add_option("--alpha", eo.alpha, "fractional power in (0,1)")->required();
    sc_extend->add_option("--lambda", eo.lambda, "interval length")->required();
    sc_extend->add_option("--modes", eo.modes, "csv of k,coeff rows")->required();
    sc_extend->add_option("--heights", eo.heights, "comma list of heights")
        ->required()
        ->delimiter(',');
    sc_extend->add_option("--ns", eo.ns, "sample intervals")->capture_default_str();
    sc_extend->add_option("--out", eo.out, "csv path")->capture_default_str();
    sc_extend->callback([&] { rc = run_extend1d(eo); });

    Minimize1dOpts m1;
    auto* sc_min1 = app.add_subcommand("minimize1d", "minimize the strip energy");
    sc_min1->add_option("--alpha", m1.alpha, "fractional power in (0,1)")->required();
    sc_min1->add_option("--lambda", m1.lambda, "pitch")->required();
    sc_min1->add_option("--ns", m1.ns, "horizontal intervals")->capture_default_str();
    sc_min1->add_option("--ny", m1.ny, "vertical intervals")->capture_default_str();
    sc_min1->add_option("--height", m1.height, "strip height (0 = default)")
        ->capture_default_str();
    sc_min1->add_option("--amplitude", m1.amplitude, "initial mode amplitude")
        ->capture_default_str();
    sc_min1->add_option("--potential", m1.potential, "potential spec")->capture_default_str();
    sc_min1->add_option("--max-iter", m1.mo.max_iter, "iteration cap")->capture_default_str();
    sc_min1->add_option("--tol-residual", m1.mo.tol_residual, "gradient tolerance")
        ->capture_default_str();
    sc_min1->add_option("--out", m1.out, "csv path")->capture_default_str();
    sc_min1->callback([&] { rc = run_minimize1d(m1); });

    ThresholdOpts to;
    auto* sc_thresh = app.add_subcommand("threshold", "scan pitches for the bifurcation");
    sc_thresh->add_option("--alpha", to.alpha, "fractional power in (0,1)")->required();
    sc_thresh->add_option("--lambda-min", to.lambda_min, "scan start")->required();
    sc_thresh->add_option("--lambda-max", to.lambda_max, "scan end")->required();
    sc_thresh->add_option("--steps", to.steps, "scan points")->required();
    sc_thresh->add_option("--ns", to.ns, "horizontal intervals")->capture_default_str();
    sc_thresh->add_option("--ny", to.ny, "vertical intervals")->capture_default_str();
    sc_thresh->add_option("--bisection-steps", to.bisection_steps, "bracket refinements")
        ->capture_default_str();
    sc_thresh->add_option("--potential", to.potential, "potential spec")->capture_default_str();
    sc_thresh->add_option("--out", to.out, "csv path")->capture_default_str();
    sc_thresh->callback([&] { rc = run_threshold(to); });

    Minimize3dOpts m3;
    auto* sc_min3 = app.add_subcommand("minimize3d", "minimize the cylinder energy");
    sc_min3->add_option("--alpha", m3.alpha, "fractional power in (0,1)")->required();
    sc_min3->add_option("--lambda", m3.lambda, "pitch")->required();
    sc_min3->add_option("--R", m3.R, "cylinder radius")->required();
    sc_min3->add_option("--nr", m3.nr, "radial intervals")->capture_default_str();
    sc_min3->add_option("--ns", m3.ns, "angular-section intervals")->capture_default_str();
    sc_min3->add_option("--ny", m3.ny, "vertical intervals")->capture_default_str();
    sc_min3->add_option("--height", m3.height, "extension height (0 = default)")
        ->capture_default_str();
    sc_min3->add_option("--amplitude", m3.amplitude, "initial mode amplitude")
        ->capture_default_str();
    sc_min3->add_option("--potential", m3.potential, "potential spec")->capture_default_str();
    sc_min3->add_option("--max-iter", m3.mo.max_iter, "iteration cap")->capture_default_str();
    sc_min3->add_option("--tol-residual", m3.mo.tol_residual, "gradient tolerance")
        ->capture_default_str();
    sc_min3->add_option("--out", m3.out, "csv path")->capture_default_str();
    sc_min3->callback([&] { rc = run_minimize3d(m3); });

    BarrierOpts bo;
    auto* sc_barrier = app.add_subcommand("barrier", "sample the supersolution inequality");
    sc_barrier->add_option("--alpha", bo.alpha, "fractional power in (0,1)")->required();
    sc_barrier->add_option("--lambda", bo.lambda, "pitch")->required();
    sc_barrier->add_option("--K", bo.p.K, "amplitude")->capture_default_str();
    sc_barrier->add_option("--C", bo.p.C, "axis constant")->capture_default_str();
    sc_barrier->add_option("--eps", bo.p.eps, "perturbation size")->capture_default_str();
    sc_barrier->add_option("--n", bo.n, "sample resolution")->capture_default_str();
    sc_barrier->add_option("--out", bo.out, "report path")->capture_default_str();
    sc_barrier->callback([&] { rc = run_barrier(bo); });

    CompetitorOpts co;
    auto* sc_comp = app.add_subcommand("competitor", "scaling of the truncated competitor");
    sc_comp->add_option("--a", co.a, "vertical cutoff exponent")->capture_default_str();
    sc_comp->add_option("--b", co.b, "box height exponent")->capture_default_str();
    sc_comp->add_option("--R-list", co.R_list, "comma list of radii")
        ->required()
        ->delimiter(',');
    sc_comp->add_option("--alpha", co.alpha, "fractional power in (0,1)")
        ->capture_default_str();
    sc_comp->add_option("--lambda", co.lambda, "pitch")->capture_default_str();
    sc_comp->add_option("--ns", co.ns, "horizontal intervals")->capture_default_str();
    sc_comp->add_option("--ny", co.ny, "vertical intervals")->capture_default_str();
    sc_comp->add_option("--amplitude", co.amplitude, "initial mode amplitude")
        ->capture_default_str();
    sc_comp->add_option("--potential", co.potential, "potential spec")->capture_default_str();
    sc_comp->add_option("--out", co.out, "csv path")->capture_default_str();
    sc_comp->callback([&] { rc = run_competitor(co); });

    NmcOpts no;
    auto* sc_nmc = app.add_subcommand("nmc", "principal-value nonlocal mean curvature");
    sc_nmc->add_option("--shape", no.shape, "surface to probe")
        ->required()
        ->check(CLI::IsMember({"helicoid", "ball", "halfspace"}));
    sc_nmc->add_option("--lambda", no.lambda, "helicoid pitch")->capture_default_str();
    sc_nmc->add_option("--t0", no.t0, "helicoid evaluation radius")->capture_default_str();
    sc_nmc->add_option("--alpha", no.alpha, "half the kernel order, in (0,1/2)")->required();
    sc_nmc->add_option("--radius", no.radius, "ball radius")->capture_default_str();
    sc_nmc->add_option("--deltas", no.deltas, "comma list of exclusion radii")->delimiter(',');
    sc_nmc->add_option("--rmax", no.rmax, "truncation radius")->capture_default_str();
    sc_nmc->add_option("--out", no.out, "json path")->capture_default_str();
    sc_nmc->callback([&] { rc = run_nmc(no); });

    PerimeterOpts po;
    auto* sc_per = app.add_subcommand("perimeter", "truncated fractional perimeter in a window");
    sc_per->add_option("--shape", po.shape, "set whose perimeter is measured")
        ->required()
        ->check(CLI::IsMember({"halfspace", "ball"}));
    sc_per->add_option("--alpha", po.alpha, "half the kernel order, in (0,1/2)")->required();
    sc_per->add_option("--window", po.window, "lo1,lo2,lo3,hi1,hi2,hi3")->delimiter(',');
    sc_per->add_option("--radius", po.radius, "ball radius")->capture_default_str();
    sc_per->add_option("--rmax", po.rmax, "truncation radius")->capture_default_str();
    sc_per->add_option("--box-depth", po.box_depth,
                       "set-resolution depth (curved shapes grow ~4^depth boxes)")
        ->capture_default_str();
    sc_per->add_option("--out", po.out, "json path")->capture_default_str();
    sc_per->callback([&] { rc = run_perimeter(po); });

    if (args_in.empty()) {
        std::cerr << app.help();
        return 1;
    }

    std::vector<std::string> args = args_in;
    try {
        merge_config(args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    std::vector<const char*> argv;
    argv.push_back("fracscrew");
    for (const std::string& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const NonConvergenceError& e) {
        std::cerr << "error: non-convergence: " << e.what() << " (residual "
                  << format_double(e.residual) << ")\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return rc;
}

}  // namespace fracscrew::cli
