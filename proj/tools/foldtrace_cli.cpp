// foldtrace: trace implicit curves through turning points.
//
//   foldtrace trace --problem circle --start 1,0 --dir -y --step 0.05 --csv out.csv --svg out.svg
//   foldtrace verify --r-factors 0.0001,1,100 --k 1,5,10 --n 4,8,10
//   foldtrace lubrication --epsilon 1e-3 --m 128 --svg diagram.svg
//
// Exit status: 0 success, 1 configuration error, 2 trace failure.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "foldtrace/foldtrace.hpp"

namespace ft = foldtrace;

namespace {

constexpr int kConfigError = 1;
constexpr int kTraceFailure = 2;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    if (text.empty()) {
        return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        out.push_back(item);
    }
    return out;
}

double to_double(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size() || !std::isfinite(v)) {
            throw std::invalid_argument(s);
        }
        return v;
    } catch (const std::exception&) {
        throw ConfigError(what + ": not a number: '" + s + "'");
    }
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    for (const std::string& s : split(text, ',')) {
        out.push_back(to_double(s, what));
    }
    return out;
}

std::vector<int> parse_int_list(const std::string& text, const std::string& what) {
    std::vector<int> out;
    for (double v : parse_list(text, what)) {
        if (v != std::floor(v)) {
            throw ConfigError(what + ": expected integers");
        }
        out.push_back(static_cast<int>(v));
    }
    return out;
}

ft::Point2 parse_point(const std::string& text, const std::string& what) {
    const auto v = parse_list(text, what);
    if (v.size() != 2) {
        throw ConfigError(what + ": expected x,y");
    }
    return {v[0], v[1]};
}

ft::Box parse_box(const std::string& text) {
    const auto v = parse_list(text, "--box");
    if (v.size() != 4 || !(v[0] < v[1]) || !(v[2] < v[3])) {
        throw ConfigError("--box: expected xmin,xmax,ymin,ymax with min < max");
    }
    return {v[0], v[1], v[2], v[3]};
}

ft::StepDirection parse_dir(const std::string& text) {
    const auto d = ft::parse_direction(text);
    if (!d) {
        throw ConfigError("--dir: expected one of +x, -x, +y, -y");
    }
    return *d;
}

template <class Write>
void write_file(const std::string& path, Write&& write) {
    if (path.empty()) {
        return;
    }
    std::ofstream os(path);
    if (!os) {
        throw ConfigError("cannot open '" + path + "' for writing");
    }
    write(os);
}

void check_writable(const std::string& path) {
    if (path.empty()) {
        return;
    }
    std::ofstream os(path, std::ios::app);
    if (!os) {
        throw ConfigError("cannot open '" + path + "' for writing");
    }
}

void print_summary(const ft::TraceResult& r, bool failed) {
    std::cout << "points: " << r.path.size() << '\n';
    std::cout << "turning_points: " << r.events.size() << '\n';
    for (const ft::TurningEvent& e : r.events) {
        const ft::Point2 p = r.path.points[e.index];
        std::cout << "event: index=" << e.index << " kind=" << ft::to_string(e.kind) << " at=" << p.x << ',' << p.y
                  << " candidates=" << e.candidates
                  << " next=" << (e.new_direction ? ft::to_string(*e.new_direction) : std::string("none")) << '\n';
    }
    std::cout << "termination: " << (failed ? std::string("failure") : ft::to_string(r.termination)) << '\n';
}

// trace ------------------------------------------------------------------------

struct TraceOptions {
    std::string problem = "circle";
    std::string expression;
    std::string start;
    std::string dir;
    std::optional<double> step;
    std::optional<double> step_x;
    std::optional<double> step_y;
    double radius = 0.0;
    int scan_n = 8;
    int lag = 5;
    double tol = 1e-10;
    std::size_t max_points = 100000;
    std::string box;
    std::optional<double> closure_tol;
    std::optional<double> bracket;
    std::string csv;
    std::string svg;
};

struct LubricationOptions {
    double epsilon = 1e-3;
    int m = 128;
    double seed_m = 2.0 * std::numbers::pi;
    std::string dir = "-y";
    double step_q = 5e-5;
    double step_m = 0.025;
    double steep_switch = 5.0;
    std::size_t max_points = 20000;
    std::string box = "0,1,1,80";
    std::string csv;
    std::string states_csv;
    std::string svg;
};

int run_lubrication(const LubricationOptions& o);

int run_trace(const TraceOptions& o) {
    if (o.problem == "lubrication") {
        LubricationOptions lo;
        lo.csv = o.csv;
        lo.svg = o.svg;
        return run_lubrication(lo);
    }
    if ((o.problem == "expression") != !o.expression.empty()) {
        throw ConfigError("--expr is required with --problem expression and not allowed otherwise");
    }

    std::unique_ptr<ft::ResidualField> field;
    ft::Point2 start{0.0, 0.0};
    ft::StepDirection dir{ft::Axis::X, ft::Sign::Plus};
    if (o.problem == "circle") {
        field = std::make_unique<decltype(ft::unit_circle_field())>(ft::unit_circle_field());
        start = {1.0, 0.0};
        dir = {ft::Axis::Y, ft::Sign::Minus};
    } else if (o.problem == "astroid") {
        field = std::make_unique<decltype(ft::astroid_field())>(ft::astroid_field());
        start = {0.0, 1.0};
    } else if (o.problem == "expression") {
        try {
            field = std::make_unique<ft::ExpressionField>(o.expression);
        } catch (const ft::ParseError& e) {
            throw ConfigError(std::string("--expr: ") + e.what());
        }
    } else {
        throw ConfigError("--problem: expected circle, astroid, expression or lubrication");
    }
    if (!o.start.empty()) {
        start = parse_point(o.start, "--start");
    }
    if (!o.dir.empty()) {
        dir = parse_dir(o.dir);
    }

    ft::TraceConfig cfg;
    const double step = o.step.value_or(0.01);
    cfg.step_x = o.step_x.value_or(step);
    cfg.step_y = o.step_y.value_or(step);
    cfg.scan.radius = o.radius;
    cfg.scan.mesh_count = o.scan_n;
    cfg.scan.reference_lag = o.lag;
    cfg.scan.residual_tol = o.tol;
    cfg.max_points = o.max_points;
    cfg.closure_tol = o.closure_tol;
    cfg.slice_bracket = o.bracket;
    if (!o.box.empty()) {
        cfg.domain_box = parse_box(o.box);
    }
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    check_writable(o.csv);
    check_writable(o.svg);

    ft::TraceResult result;
    int status = 0;
    try {
        result = ft::trace(*field, start, dir, cfg);
    } catch (const ft::TraceFailure& e) {
        std::cerr << "foldtrace: trace failed: " << e.what() << '\n';
        result = e.partial();
        status = kTraceFailure;
    } catch (const ft::FieldEvaluationError& e) {
        throw ConfigError(std::string("start point: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    write_file(o.csv, [&](std::ostream& os) { ft::write_points_csv(os, result.path); });
    write_file(o.svg, [&](std::ostream& os) { ft::write_svg(os, result.path); });
    print_summary(result, status != 0);
    return status;
}

// verify -----------------------------------------------------------------------

struct VerifyOptions {
    std::string r_factors = "0.0001,1,100";
    std::string k = "1,5,10";
    std::string n = "4,8,10";
    double step = 0.01;
    std::string csv;
    bool strict = false;
};

bool in_validated_region(const ft::SweepResult& s) {
    return s.r_factor >= 1e-4 && s.r_factor <= 100.0 && s.k >= 1 && s.k <= 10 && s.n >= 4 && s.n <= 10;
}

int run_verify(const VerifyOptions& o, const CLI::App& app) {
    const auto r = parse_list(o.r_factors, "--r-factors");
    const auto k = parse_int_list(o.k, "--k");
    const auto n = parse_int_list(o.n, "--n");
    if (r.empty() || k.empty() || n.empty()) {
        std::cerr << "foldtrace verify: parameter lists must be nonempty\n" << app.help();
        return kConfigError;
    }
    for (double v : r) {
        if (!(v > 0.0)) throw ConfigError("--r-factors: values must be positive");
    }
    for (int v : k) {
        if (v < 1) throw ConfigError("--k: values must be >= 1");
    }
    for (int v : n) {
        if (v < 1) throw ConfigError("--n: values must be >= 1");
    }
    if (!(o.step > 0.0)) {
        throw ConfigError("--step: must be positive");
    }
    check_writable(o.csv);

    const auto rows = ft::run_sweep(r, k, n, o.step);
    write_file(o.csv, [&](std::ostream& os) { ft::write_sweep_csv(os, rows); });

    std::size_t validated = 0, validated_pass = 0, failed = 0;
    for (const ft::SweepResult& s : rows) {
        const bool pass = ft::sweep_passes(s);
        const bool region = in_validated_region(s);
        validated += region ? 1 : 0;
        validated_pass += region && pass ? 1 : 0;
        failed += pass ? 0 : 1;
        std::cout << "r_factor=" << s.r_factor << " k=" << s.k << " n=" << s.n << " max_pe=" << s.max_pe
                  << " navigated=" << (s.navigated_all_cusps ? "true" : "false") << " points=" << s.points
                  << " termination=" << s.termination << " status=" << (pass ? "pass" : "FAILED")
                  << (region ? "" : " (outside validated region)") << '\n';
    }
    std::cout << "validated: " << validated_pass << '/' << validated << " passed\n";
    std::cout << "failed: " << failed << '/' << rows.size() << '\n';
    if (validated_pass != validated) {
        return kTraceFailure;
    }
    if (o.strict && failed > 0) {
        return kTraceFailure;
    }
    return 0;
}

// lubrication ------------------------------------------------------------------

int run_lubrication(const LubricationOptions& o) {
    ft::DiagramConfig cfg;
    cfg.epsilon = o.epsilon;
    cfg.m = o.m;
    cfg.seed_mass = o.seed_m;
    cfg.direction = parse_dir(o.dir);
    cfg.step_Q = o.step_q;
    cfg.step_M = o.step_m;
    cfg.steep_switch = o.steep_switch > 0.0 ? std::optional<double>(o.steep_switch) : std::nullopt;
    cfg.max_points = o.max_points;
    cfg.box = parse_box(o.box);
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    check_writable(o.csv);
    check_writable(o.states_csv);
    check_writable(o.svg);

    ft::Diagram diagram;
    int status = 0;
    try {
        diagram = ft::trace_diagram(cfg);
    } catch (const ft::TraceFailure& e) {
        std::cerr << "foldtrace: trace failed: " << e.what() << '\n';
        diagram.trace = e.partial();
        status = kTraceFailure;
    } catch (const ft::Error& e) {
        std::cerr << "foldtrace: no seed state at M = " << o.seed_m << ": " << e.what() << '\n';
        return kTraceFailure;
    }

    write_file(o.csv, [&](std::ostream& os) { ft::write_points_csv(os, diagram.trace.path); });
    write_file(o.states_csv, [&](std::ostream& os) { ft::write_states_csv(os, diagram.states); });
    ft::SvgStyle style;
    style.x_label = "Q";
    style.y_label = "M";
    write_file(o.svg, [&](std::ostream& os) { ft::write_svg(os, diagram.trace.path, style); });

    std::cout << "seed: Q=" << diagram.seed.Q << " M=" << diagram.seed.M << '\n';
    print_summary(diagram.trace, status != 0);
    if (status == 0) {
        const ft::SpectralGrid grid(cfg.m);
        double worst = 0.0;
        for (const auto& s : diagram.states) {
            worst = std::max(worst, ft::residual_norm(s, grid));
        }
        std::cout << "max_state_residual: " << worst << '\n';
    }
    return status;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Trace implicit curves f(x, y) = 0 through turning points"};
    app.require_subcommand(1);

    TraceOptions t;
    auto* trace = app.add_subcommand("trace", "Trace a built-in or user-supplied curve");
    trace->add_option("--problem", t.problem, "circle, astroid, expression or lubrication")
        ->check(CLI::IsMember({"circle", "astroid", "expression", "lubrication"}));
    trace->add_option("--expr", t.expression, "f(x, y) for --problem expression");
    trace->add_option("--start", t.start, "start point x,y (must lie on the curve)");
    trace->add_option("--dir", t.dir, "initial direction: +x, -x, +y or -y");
    trace->add_option("--step", t.step, "step size for both axes (default 0.01)");
    trace->add_option("--step-x", t.step_x, "step size along x");
    trace->add_option("--step-y", t.step_y, "step size along y");
    trace->add_option("--radius", t.radius, "scan radius; 0 uses the stalled axis step");
    trace->add_option("--scan-n", t.scan_n, "samples on the scan half-circle");
    trace->add_option("--lag", t.lag, "steps back to the reference point");
    trace->add_option("--tol", t.tol, "residual tolerance");
    trace->add_option("--max-points", t.max_points, "stop after this many points");
    trace->add_option("--box", t.box, "domain xmin,xmax,ymin,ymax");
    trace->add_option("--closure-tol", t.closure_tol, "closure distance (default: smaller step)");
    trace->add_option("--bracket", t.bracket, "max transverse move per step (default: 10 steps)");
    trace->add_option("--csv", t.csv, "points CSV output");
    trace->add_option("--svg", t.svg, "SVG plot output");

    VerifyOptions v;
    auto* verify = app.add_subcommand("verify", "Astroid accuracy sweep over scan parameters");
    verify->add_option("--r-factors", v.r_factors, "scan radii as multiples of the step, comma separated");
    verify->add_option("--k", v.k, "reference lags, comma separated");
    verify->add_option("--n", v.n, "mesh sizes, comma separated");
    verify->add_option("--step", v.step, "step size");
    verify->add_option("--csv", v.csv, "sweep CSV output");
    verify->add_flag("--strict", v.strict, "also fail on rows outside the validated region");

    LubricationOptions l;
    auto* lub = app.add_subcommand("lubrication", "Trace the (Q, M) diagram of the thin-film problem");
    lub->add_option("--epsilon", l.epsilon, "surface tension parameter");
    lub->add_option("--m", l.m, "grid size (even, >= 8)");
    lub->add_option("--seed-m", l.seed_m, "mass of the seed state");
    lub->add_option("--dir", l.dir, "initial direction in (Q, M)");
    lub->add_option("--step-q", l.step_q, "step in Q");
    lub->add_option("--step-m", l.step_m, "step in M");
    lub->add_option("--steep-switch", l.steep_switch, "slope (in steps) that switches the stepping axis; 0 disables");
    lub->add_option("--max-points", l.max_points, "stop after this many points");
    lub->add_option("--box", l.box, "domain Qmin,Qmax,Mmin,Mmax");
    lub->add_option("--csv", l.csv, "(Q, M) points CSV output");
    lub->add_option("--states-csv", l.states_csv, "converged states CSV output");
    lub->add_option("--svg", l.svg, "SVG diagram output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }

    try {
        if (trace->parsed()) {
            return run_trace(t);
        }
        if (verify->parsed()) {
            return run_verify(v, *verify);
        }
        return run_lubrication(l);
    } catch (const ConfigError& e) {
        std::cerr << "foldtrace: " << e.what() << '\n';
        return kConfigError;
    }
}
