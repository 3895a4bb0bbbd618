#include "dbench/scenario.hpp"

#include "dbench/audit.hpp"
#include "dbench/corpus.hpp"
#include "dbench/l2solve.hpp"
#include "dbench/spectral.hpp"
#include "dbench/transversality.hpp"
#include "dbench/weights.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <regex>
#include <set>
#include <sstream>

namespace dbench {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

// ---------------------------------------------------------------- schema

[[noreturn]] void schema_fail(const std::string& path, const std::string& what) {
    throw SchemaError("scenario" + path + ": " + what);
}

void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) schema_fail(path, "must be an object");
}

void check_keys(const json& j, const std::string& path, const std::set<std::string>& allowed,
                const std::set<std::string>& required = {}) {
    require_object(j, path);
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k)) schema_fail(path, "unknown key \"" + k + "\"");
    for (const auto& k : required)
        if (!j.contains(k)) schema_fail(path, "missing key \"" + k + "\"");
}

double get_num(const json& j, const std::string& key, const std::string& path, double def,
               double lo = -std::numeric_limits<double>::infinity(),
               double hi = std::numeric_limits<double>::infinity()) {
    if (!j.contains(key)) return def;
    const json& v = j.at(key);
    if (!v.is_number()) schema_fail(path + "." + key, "must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x) || x < lo || x > hi) schema_fail(path + "." + key, "out of range");
    return x;
}

long long get_int(const json& j, const std::string& key, const std::string& path, long long def,
                  long long lo = std::numeric_limits<long long>::min(),
                  long long hi = std::numeric_limits<long long>::max()) {
    if (!j.contains(key)) return def;
    const json& v = j.at(key);
    if (!v.is_number_integer()) schema_fail(path + "." + key, "must be an integer");
    const long long x = v.get<long long>();
    if (x < lo || x > hi) schema_fail(path + "." + key, "out of range");
    return x;
}

std::string get_str(const json& j, const std::string& key, const std::string& path, const std::string& def,
                    const std::set<std::string>& choices = {}) {
    if (!j.contains(key)) return def;
    const json& v = j.at(key);
    if (!v.is_string()) schema_fail(path + "." + key, "must be a string");
    const std::string s = v.get<std::string>();
    if (!choices.empty() && !choices.count(s)) schema_fail(path + "." + key, "unsupported value \"" + s + "\"");
    return s;
}

bool get_bool(const json& j, const std::string& key, const std::string& path, bool def) {
    if (!j.contains(key)) return def;
    if (!j.at(key).is_boolean()) schema_fail(path + "." + key, "must be a boolean");
    return j.at(key).get<bool>();
}

RVec get_samples(const json& v, const std::string& path, std::size_t n) {
    if (!v.is_array()) schema_fail(path, "must be an array");
    if (v.size() != n) schema_fail(path, "expected " + std::to_string(n) + " samples");
    RVec out;
    out.reserve(n);
    for (const auto& x : v) {
        if (!x.is_number() || !std::isfinite(x.get<double>())) schema_fail(path, "samples must be finite numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

struct GeometrySpec {
    double L1 = 2 * kPi, L2 = 2 * kPi;
    int N1 = 32, N2 = 32;
    std::string u_kind = "zero";
    double u_amp = 0;
    RVec u_samples;
};

struct BundleSpec {
    int rank = 1;
    int c1 = 0;
    std::string mode = "constant";
    double roughness = 0;
    std::uint64_t seed = 1;
};

struct WeightSpec {
    std::string mode = "zero";
    std::string lambda = "S";
    double amplitude = 0.5;
    RVec values;
};

struct TaskSpec {
    std::string type;
    json params;
};

struct Scenario {
    std::uint64_t seed = 1;
    GeometrySpec geometry;
    BundleSpec bundle;
    WeightSpec weight;
    double tol = 1e-9;
    int max_iter = 4000;
    std::optional<double> c_tol;
    std::string out_dir = "dirac-bench-out";
    bool plot_data = true;
    std::vector<TaskSpec> tasks;
};

const std::set<std::string> kTaskTypes = {"spectrum", "bounds", "solve", "bochner", "cylinder-weight",
                                          "transversality"};

void parse_u(const json& v, GeometrySpec& g, const std::string& path) {
    if (v.is_array()) {
        g.u_kind = "samples";
        g.u_samples = get_samples(v, path, static_cast<std::size_t>(g.N1) * g.N2);
        return;
    }
    if (!v.is_string()) schema_fail(path, "must be a named expression or a sample array");
    const std::string s = v.get<std::string>();
    if (s == "zero") {
        g.u_kind = "zero";
        return;
    }
    static const std::regex expr(R"(^(cos_x|cos_x_sin_y|random)\(\s*([-+]?[0-9]*\.?[0-9]+([eE][-+]?[0-9]+)?)\s*\)$)");
    std::smatch m;
    if (!std::regex_match(s, m, expr)) schema_fail(path, "unknown expression \"" + s + "\"");
    g.u_kind = m[1];
    g.u_amp = std::stod(m[2]);
    if (std::abs(g.u_amp) > 2.0) schema_fail(path, "amplitude must lie in [-2, 2]");
}

void validate_task(const TaskSpec& t, const Scenario& sc, const std::string& path) {
    const json& p = t.params;
    if (t.type == "spectrum") {
        check_keys(p, path, {"type", "operator", "k"});
        get_str(p, "operator", path, "DmDp",
                {"DmDp", "DpDm", "D2", "laplace_beltrami", "connection_laplacian_plus",
                 "connection_laplacian_minus", "schrodinger"});
        get_int(p, "k", path, 6, 1, 200);
    } else if (t.type == "bounds") {
        check_keys(p, path, {"type"});
    } else if (t.type == "solve") {
        check_keys(p, path, {"type", "operator", "rhs", "rhs_seed", "smooth", "file"});
        get_str(p, "operator", path, "Dplus", {"D", "Dplus", "Dminus"});
        const std::string rhs = get_str(p, "rhs", path, "image-of-random", {"image-of-random", "random", "from-file"});
        get_int(p, "rhs_seed", path, 1, 0);
        get_bool(p, "smooth", path, true);
        if (rhs == "from-file" && !p.contains("file")) schema_fail(path, "from-file needs \"file\"");
        get_str(p, "file", path, "");
    } else if (t.type == "bochner") {
        check_keys(p, path, {"type", "refine", "grading", "k", "min_order"});
        if (sc.geometry.u_kind == "samples") schema_fail(path, "refinement needs a named conformal factor");
        if (p.contains("refine")) {
            const json& r = p.at("refine");
            if (!r.is_array() || r.size() < 2) schema_fail(path + ".refine", "need at least two grid sizes");
            int prev = 0;
            for (const auto& x : r) {
                if (!x.is_number_integer() || x.get<int>() < 8 || x.get<int>() > 512 || x.get<int>() <= prev)
                    schema_fail(path + ".refine", "grid sizes must increase and lie in [8, 512]");
                prev = x.get<int>();
            }
        }
        get_str(p, "grading", path, "both", {"plus", "minus", "both"});
        get_int(p, "k", path, 0, 0, 64);
        get_num(p, "min_order", path, 0.9);
    } else if (t.type == "cylinder-weight") {
        check_keys(p, path, {"type", "T", "Nt", "cross_N", "alpha", "beta", "beta_fraction", "gamma", "eps",
                             "delta", "n", "expect"});
        get_num(p, "T", path, 8.0, 4.0, 1e3);
        get_int(p, "Nt", path, 64, 8, 4096);
        get_int(p, "cross_N", path, 16, 4, 256);
        get_num(p, "alpha", path, 1.0, 1e-12);
        if (p.contains("beta") && p.contains("beta_fraction")) schema_fail(path, "give beta or beta_fraction, not both");
        get_num(p, "beta", path, 0.0, 0.0);
        get_num(p, "beta_fraction", path, 0.5, 0.0);
        get_num(p, "gamma", path, 0.1, 1e-12, 1.0 - 1e-12);
        get_num(p, "eps", path, 100.0, 1e-12);
        get_num(p, "delta", path, 0.05, 0.0);
        get_int(p, "n", path, 3, 3, 64);
        get_str(p, "expect", path, "success", {"success", "failure"});
    } else if (t.type == "transversality") {
        check_keys(p, path, {"type", "euler"});
        get_int(p, "euler", path, 0);
    }
}

Scenario parse_scenario(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("scenario: not valid JSON (") + e.what() + ")");
    }
    Scenario sc;
    check_keys(j, "", {"seed", "geometry", "bundle", "weight", "solver", "output", "tasks"}, {"geometry", "tasks"});
    sc.seed = static_cast<std::uint64_t>(get_int(j, "seed", "", 1, 0));

    const json& g = j.at("geometry");
    check_keys(g, ".geometry", {"L1", "L2", "N1", "N2", "u"});
    sc.geometry.L1 = get_num(g, "L1", ".geometry", 2 * kPi, 1e-12);
    sc.geometry.L2 = get_num(g, "L2", ".geometry", 2 * kPi, 1e-12);
    sc.geometry.N1 = static_cast<int>(get_int(g, "N1", ".geometry", 32, 8, 4096));
    sc.geometry.N2 = static_cast<int>(get_int(g, "N2", ".geometry", 32, 8, 4096));
    if (g.contains("u")) parse_u(g.at("u"), sc.geometry, ".geometry.u");

    if (j.contains("bundle")) {
        const json& b = j.at("bundle");
        check_keys(b, ".bundle", {"rank", "c1", "mode", "roughness", "seed"});
        sc.bundle.rank = static_cast<int>(get_int(b, "rank", ".bundle", 1, 1, 4));
        sc.bundle.c1 = static_cast<int>(get_int(b, "c1", ".bundle", 0, -1000000, 1000000));
        sc.bundle.mode = get_str(b, "mode", ".bundle", "constant", {"constant", "random", "trivial"});
        sc.bundle.roughness = get_num(b, "roughness", ".bundle", 0.0, 0.0);
        sc.bundle.seed = static_cast<std::uint64_t>(get_int(b, "seed", ".bundle", 1, 0));
        if (sc.bundle.mode == "constant" && sc.bundle.rank != 1)
            schema_fail(".bundle", "constant mode needs rank 1");
        if (sc.bundle.mode == "trivial" && sc.bundle.c1 != 0) schema_fail(".bundle", "trivial mode needs c1 = 0");
    }

    if (j.contains("weight")) {
        const json& w = j.at("weight");
        check_keys(w, ".weight", {"mode", "lambda", "amplitude", "values"});
        sc.weight.mode = get_str(w, "mode", ".weight", "zero", {"zero", "poisson", "samples", "random"});
        sc.weight.lambda = get_str(w, "lambda", ".weight", "S", {"S", "S+", "S-"});
        sc.weight.amplitude = get_num(w, "amplitude", ".weight", 0.5, 0.0, 10.0);
        if (sc.weight.mode == "samples") {
            if (!w.contains("values")) schema_fail(".weight", "samples mode needs \"values\"");
            sc.weight.values = get_samples(w.at("values"), ".weight.values",
                                           static_cast<std::size_t>(sc.geometry.N1) * sc.geometry.N2);
        } else if (w.contains("values")) {
            schema_fail(".weight", "\"values\" only applies to samples mode");
        }
    }

    if (j.contains("solver")) {
        const json& s = j.at("solver");
        check_keys(s, ".solver", {"tol", "max_iter", "c_tol"});
        sc.tol = get_num(s, "tol", ".solver", 1e-9, 1e-15, 1e-2);
        sc.max_iter = static_cast<int>(get_int(s, "max_iter", ".solver", 4000, 1, 10000000));
        if (s.contains("c_tol")) sc.c_tol = get_num(s, "c_tol", ".solver", 0.0, 0.0);
    }

    if (j.contains("output")) {
        const json& o = j.at("output");
        check_keys(o, ".output", {"dir", "plot_data"});
        sc.out_dir = get_str(o, "dir", ".output", sc.out_dir);
        sc.plot_data = get_bool(o, "plot_data", ".output", true);
    }

    const json& tasks = j.at("tasks");
    if (!tasks.is_array() || tasks.empty()) schema_fail(".tasks", "must be a nonempty array");
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const std::string path = ".tasks[" + std::to_string(i) + "]";
        TaskSpec t;
        if (tasks[i].is_string()) {
            t.type = tasks[i].get<std::string>();
            t.params = json::object();
            t.params["type"] = t.type;
        } else {
            require_object(tasks[i], path);
            t.type = get_str(tasks[i], "type", path, "");
            t.params = tasks[i];
        }
        if (!kTaskTypes.count(t.type)) schema_fail(path, "unknown task \"" + t.type + "\"");
        validate_task(t, sc, path);
        sc.tasks.push_back(std::move(t));
    }
    return sc;
}

// ---------------------------------------------------------------- helpers

std::function<double(double, double)> u_function(const GeometrySpec& gs) {
    const double a = gs.u_amp, L1 = gs.L1, L2 = gs.L2;
    if (gs.u_kind == "cos_x") return [=](double x, double) { return a * std::cos(2 * kPi * x / L1); };
    if (gs.u_kind == "cos_x_sin_y")
        return [=](double x, double y) { return a * std::cos(2 * kPi * x / L1) * std::sin(2 * kPi * y / L2); };
    return [](double, double) { return 0.0; };
}

TorusGeometry make_geometry(const GeometrySpec& gs, int N1, int N2, std::uint64_t seed) {
    if (gs.u_kind == "samples") return build_torus(gs.L1, gs.L2, N1, N2, gs.u_samples);
    if (gs.u_kind == "random")
        return build_torus(gs.L1, gs.L2, N1, N2, random_smooth_field(N1, N2, gs.L1, gs.L2, gs.u_amp, seed));
    return build_torus(gs.L1, gs.L2, N1, N2, u_function(gs));
}

HermitianBundle make_bundle(const BundleSpec& bs, const TorusGeometry& g) {
    if (bs.mode == "trivial") return trivial_bundle(g, bs.rank);
    if (bs.mode == "constant") return constant_curvature_bundle(g, bs.c1, 1);
    return random_bundle(g, bs.c1, bs.roughness, bs.seed, bs.rank);
}

const ScalarField& pick_lambda(const CurvatureData& cd, const std::string& which) {
    if (which == "S+") return cd.lambdaSplus;
    if (which == "S-") return cd.lambdaSminus;
    return cd.lambdaS;
}

double shift_for(const TorusGeometry& g) { return 16.0 * kPi * kPi / g.volume; }

// Preconditioner for stacked (plus, minus) vectors: one FFT inverse per half.
Operator stacked_preconditioner(const TorusGeometry& g, int rank) {
    const Operator half = fourier_preconditioner(g, rank, Symbol::Dirac, shift_for(g));
    const std::size_t n = static_cast<std::size_t>(g.sites()) * rank;
    return [half, n](const CVec& x, CVec& y) {
        CVec a(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n)), b(x.begin() + static_cast<std::ptrdiff_t>(n), x.end());
        CVec ya, yb;
        half(a, ya);
        half(b, yb);
        y = std::move(ya);
        y.insert(y.end(), yb.begin(), yb.end());
    };
}

json vec_json(const RVec& v) {
    json a = json::array();
    for (double x : v) a.push_back(x);
    return a;
}

struct Output {
    std::map<std::string, std::string> files;  // name -> content, written at the end
};

std::string fmt(double x) {
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

struct Context {
    const Scenario& sc;
    const fs::path& base;
    TorusGeometry g;
    HermitianBundle b;
    CurvatureData cd;
    WeightFunction w;
    std::string weight_desc;
    EigenOptions eig;
    std::optional<double> c_tol_value;
    Output out;

    // Calibrated on first use; only bound and solve tasks need it.
    double c_tol() {
        if (!c_tol_value) c_tol_value = sc.c_tol ? *sc.c_tol : calibrate_c_tol(24);
        return *c_tol_value;
    }
};

// ---------------------------------------------------------------- tasks

json task_spectrum(Context& cx, const json& p) {
    const std::string op = p.value("operator", std::string("DmDp"));
    const int k = p.value("k", 6);
    const TorusGeometry& g = cx.g;
    const HermitianBundle& b = cx.b;
    json r;
    r["operator"] = op;
    std::ostringstream csv;
    csv << "series,index,eigenvalue\n";
    if (op == "DmDp" || op == "DpDm") {
        EigenOptions o = cx.eig;
        o.preconditioner = fourier_preconditioner(g, b.rank, Symbol::Dirac, shift_for(g));
        const LinearMap dp = dplus(g, b), dm = adjoint(dp);
        const SpeciesSpectrum sp =
            species_spectrum(op == "DmDp" ? compose(dm, dp) : compose(dp, dm), taste_operator(g, b), k, o);
        r["raw"] = vec_json(sp.raw);
        r["physical"] = vec_json(sp.physical);
        r["doubler"] = vec_json(sp.doubler);
        r["raw_kernel"] = sp.raw_kernel;
        r["physical_kernel"] = sp.physical_kernel;
        r["scale"] = sp.scale;
        r["threshold"] = sp.threshold;
        const std::pair<const char*, const RVec*> series[] = {{"raw", &sp.raw}, {"physical", &sp.physical},
                                                              {"doubler", &sp.doubler}};
        for (const auto& [name, v] : series)
            for (std::size_t i = 0; i < v->size(); ++i) csv << name << "," << i << "," << fmt((*v)[i]) << "\n";
    } else {
        LinearMap a;
        EigenOptions o = cx.eig;
        if (op == "D2") {
            const LinearMap d = full_dirac(g, b);
            a = compose(d, d);
            o.preconditioner = stacked_preconditioner(g, b.rank);
        } else if (op == "laplace_beltrami") {
            a = scaled(laplace_beltrami(g), -1.0);
            o.preconditioner = fourier_preconditioner(g, 1, Symbol::Laplacian, shift_for(g));
        } else if (op == "schrodinger") {
            a = schrodinger_L(g, cx.cd.lambdaS, 2);
            o.preconditioner = fourier_preconditioner(g, 1, Symbol::Laplacian, shift_for(g));
        } else {
            a = connection_laplacian(g, b, op == "connection_laplacian_plus" ? Grading::Plus : Grading::Minus);
            o.preconditioner = fourier_preconditioner(g, b.rank, Symbol::Laplacian, shift_for(g));
        }
        const SpectralResult sr = smallest_eigenpairs(a, k, o);
        r["eigenvalues"] = vec_json(sr.eigenvalues);
        r["residuals"] = vec_json(sr.residuals);
        r["iterations"] = sr.iterations;
        for (std::size_t i = 0; i < sr.eigenvalues.size(); ++i)
            csv << "eigenvalue," << i << "," << fmt(sr.eigenvalues[i]) << "\n";
    }
    const std::string file = "spectrum_" + op + ".csv";
    cx.out.files[file] = csv.str();
    r["csv"] = file;
    r["pass"] = true;
    return r;
}

json task_bounds(Context& cx) {
    EigenOptions o = cx.eig;
    const BoundReport rep = bound_report(cx.g, cx.b, cx.c_tol(), o);
    json r;
    r["h"] = rep.h;
    r["volume"] = rep.volume;
    r["c_tol"] = cx.c_tol();
    r["chern_number"] = rep.chern;
    r["euler"] = rep.euler;
    r["lambda_min_D2"] = rep.lambda_min_D2;
    r["lambda_min_DpDm"] = rep.lambda_min_DpDm;
    r["lambda_min_DmDp"] = rep.lambda_min_DmDp;
    r["raw_lambda_min_DpDm"] = rep.raw_lambda_min_DpDm;
    r["raw_lambda_min_DmDp"] = rep.raw_lambda_min_DmDp;
    r["lambda_min_L"] = rep.lambda_min_L;
    r["lambda_min_Lplus"] = rep.lambda_min_Lplus;
    r["lambda_min_Lminus"] = rep.lambda_min_Lminus;
    r["integral_lambdaS"] = rep.int_lambdaS;
    r["integral_lambdaSplus"] = rep.int_lambdaSplus;
    r["integral_lambdaSminus"] = rep.int_lambdaSminus;
    r["integral_theta"] = rep.int_theta;
    r["integral_Theta"] = rep.int_Theta;
    json recs = json::array();
    for (const auto& x : rep.records)
        recs.push_back({{"name", x.name}, {"lhs", x.lhs}, {"rhs", x.rhs}, {"slack", x.slack}, {"tol", x.tol},
                        {"pass", x.pass}});
    r["records"] = recs;
    r["pass"] = rep.all_pass();
    return r;
}

CVec read_complex_file(const fs::path& p, std::size_t n) {
    std::ifstream in(p);
    if (!in) throw PreconditionError("solve: cannot read right-hand side file " + p.string());
    CVec v;
    double re = 0, im = 0;
    while (in >> re >> im) v.emplace_back(re, im);
    if (v.size() != n) throw PreconditionError("solve: right-hand side file has " + std::to_string(v.size()) +
                                               " samples, expected " + std::to_string(n));
    return v;
}

json task_solve(Context& cx, const json& p) {
    const TorusGeometry& g = cx.g;
    const HermitianBundle& b = cx.b;
    const std::string op = p.value("operator", std::string("Dplus"));
    const std::string rhs = p.value("rhs", std::string("image-of-random"));
    const int r = b.rank;
    const LinearMap dp = dplus(g, b);
    LinearMap d;
    const ScalarField* lam = nullptr;
    if (op == "D") {
        d = full_dirac(g, b);
        lam = &cx.cd.lambdaS;
    } else if (op == "Dplus") {
        d = dp;
        lam = &cx.cd.lambdaSminus;
    } else {
        d = adjoint(dp);
        lam = &cx.cd.lambdaSplus;
    }
    const ScalarField& phi = cx.w.phi;
    SolveOptions so;
    so.tol = std::min(1e-10, cx.sc.tol);
    so.max_iter = std::max(20000, cx.sc.max_iter);
    so.eig = cx.eig;
    so.kernel_hint = (std::abs(chern_number(g, b)) + 1) * r * (op == "D" ? 2 : 1);
    so.eig.preconditioner = op == "D" ? stacked_preconditioner(g, r)
                                      : fourier_preconditioner(g, r, Symbol::Dirac, shift_for(g));
    // The stacked vector of D holds plus then minus, so for D the weight and the
    // denominator fields are listed twice.
    ScalarField phi_solve = phi;
    if (op == "D") {
        phi_solve.resize(2 * phi.size());
        std::copy(phi.begin(), phi.end(), phi_solve.begin() + static_cast<std::ptrdiff_t>(phi.size()));
    }
    ScalarField den(phi.size());
    for (std::size_t i = 0; i < den.size(); ++i) den[i] = cx.w.lap[i] + 2.0 * (*lam)[i];
    ScalarField den_solve = den;
    if (op == "D") {
        den_solve.resize(2 * den.size());
        std::copy(den.begin(), den.end(), den_solve.begin() + static_cast<std::ptrdiff_t>(den.size()));
    }

    const std::uint64_t seed = cx.sc.seed * 1000003ULL + static_cast<std::uint64_t>(p.value("rhs_seed", 1));
    const bool smooth = p.value("smooth", true);
    const std::size_t n = static_cast<std::size_t>(d.dim_dom());
    const auto source = [&] {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        CVec v(n);
        if (!smooth) {
            for (auto& z : v) z = cplx(normal(rng), normal(rng));
            return v;
        }
        const std::size_t per = static_cast<std::size_t>(g.sites()) * r;
        for (std::size_t block = 0; block * per < n; ++block)
            for (int a = 0; a < r; ++a) {
                const ScalarField re = random_smooth_field(g, 1.0, rng());
                const ScalarField im = random_smooth_field(g, 1.0, rng());
                for (int s = 0; s < g.sites(); ++s) v[block * per + s * r + a] = cplx(re[s], im[s]);
            }
        return v;
    };
    CVec f;
    if (rhs == "image-of-random") f = image_of(d, source(), phi_solve, r, so);
    else if (rhs == "random") f = source();
    else f = read_complex_file(cx.base / p.value("file", std::string()), n);

    SolveReport rep = solve_min_norm(d, f, phi_solve, r, so);
    attach_denominator(rep, den_solve, cx.c_tol() * g.h());
    const EstimateStatus st = verify_estimate(rep);
    json out;
    out["operator"] = op;
    out["rhs"] = rhs;
    out["weight"] = cx.weight_desc;
    out["solvable"] = rep.solvable;
    out["obstruction"] = rep.obstruction;
    out["cokernel_dim"] = rep.cokernel_dim;
    out["kernel_dim"] = rep.kernel_dim;
    out["residual"] = rep.residual;
    out["minimality"] = rep.minimality;
    out["iterations"] = rep.iterations;
    out["lhs"] = rep.lhs;
    out["rhs_bound"] = rep.rhs;
    out["denominator_min"] = rep.denominator_min;
    out["tol_h"] = rep.tol_h;
    out["estimate"] = to_string(st);
    out["pass"] = rep.solvable && st != EstimateStatus::Fail;
    return out;
}

json task_bochner(Context& cx, const json& p) {
    const Scenario& sc = cx.sc;
    std::vector<int> grids = {16, 32, 64};
    if (p.contains("refine")) grids = p.at("refine").get<std::vector<int>>();
    const std::string which = p.value("grading", std::string("both"));
    const double min_order = p.value("min_order", 0.9);
    const int c1 = sc.bundle.c1, r = sc.bundle.rank;
    int k = p.value("k", 0);
    if (k == 0) k = (c1 == 0 ? 5 : 2 * std::abs(c1)) * r;
    std::vector<Grading> grs;
    if (which != "minus") grs.push_back(Grading::Plus);
    if (which != "plus") grs.push_back(Grading::Minus);
    json out;
    out["k"] = k;
    out["grids"] = grids;
    bool pass = true;
    json studies = json::array();
    for (Grading gr : grs) {
        const std::string name = gr == Grading::Plus ? "plus" : "minus";
        RVec hs, res, orders;
        for (int N : grids) {
            const int N2 = static_cast<int>(std::lround(static_cast<double>(N) * sc.geometry.N2 / sc.geometry.N1));
            const TorusGeometry g = make_geometry(sc.geometry, N, std::max(8, N2), sc.seed);
            const HermitianBundle b = make_bundle(sc.bundle, g);
            const LowModeDefect d = bochner_lowmode_defect(g, b, gr, k, cx.eig);
            hs.push_back(g.h());
            res.push_back(d.residual);
        }
        for (std::size_t i = 1; i < res.size(); ++i) orders.push_back(std::log(res[i - 1] / res[i]) / std::log(hs[i - 1] / hs[i]));
        const bool exact = *std::max_element(res.begin(), res.end()) <= 1e-12;
        const double worst_order = orders.empty() ? 0.0 : *std::min_element(orders.begin(), orders.end());
        const bool ok = exact || worst_order >= min_order;
        pass = pass && ok;
        json st;
        st["grading"] = name;
        st["h"] = vec_json(hs);
        st["residual"] = vec_json(res);
        st["order"] = exact ? json::array() : vec_json(orders);
        st["exact"] = exact;
        st["pass"] = ok;
        if (sc.plot_data) {
            std::ostringstream dat;
            dat << "# h residual\n";
            for (std::size_t i = 0; i < hs.size(); ++i) dat << fmt(hs[i]) << " " << fmt(res[i]) << "\n";
            const std::string file = "bochner_" + name + ".dat";
            cx.out.files[file] = dat.str();
            st["plot_data"] = file;
        }
        studies.push_back(st);
    }
    out["studies"] = studies;
    out["pass"] = pass;
    return out;
}

json task_cylinder(Context& cx, const json& p) {
    const double T = p.value("T", 8.0);
    const int Nt = p.value("Nt", 64), Nc = p.value("cross_N", 16), n = p.value("n", 3);
    const double alpha = p.value("alpha", 1.0), gamma = p.value("gamma", 0.1), eps = p.value("eps", 100.0),
                 delta = p.value("delta", 0.05);
    const std::string expect = p.value("expect", std::string("success"));
    const CylinderGrid c = build_cylinder(T, Nt, Nc, {delta});
    double beta = 0, cap = 0;
    const GroundState gs = dirichlet_ground_state(c);
    cap = gamma * gs.mu / (2.0 - 4.0 / n);
    beta = p.contains("beta") ? p.at("beta").get<double>() : p.value("beta_fraction", 0.5) * cap;
    ScalarField lam(static_cast<std::size_t>(c.sites()));
    for (int s = 0; s < c.sites(); ++s) lam[s] = c.in_K(s) ? -beta : alpha;
    const CylinderWeightResult res = cylinder_weight(c, lam, alpha, n, eps, gamma, delta);
    json out;
    out["T"] = T;
    out["Nt"] = Nt;
    out["cross_N"] = Nc;
    out["mu"] = res.params.mu;
    out["beta"] = beta;
    out["beta_cap"] = res.params.beta_cap;
    out["A"] = res.params.A;
    out["success"] = res.success;
    out["alpha1"] = res.alpha1;
    out["worst_site"] = res.worst_site;
    out["worst_tau"] = res.worst_tau;
    out["worst_in_K"] = res.worst_in_K;
    out["worst_terms"] = {{"laplacian", res.worst_lap}, {"gradient", res.worst_grad_term},
                          {"curvature", res.worst_curv_term}};
    out["diagnosis"] = res.diagnosis;
    out["expect"] = expect;
    if (cx.sc.plot_data) {
        std::ostringstream dat;
        dat << "# tau min_margin\n";
        const int cs = c.cross_sites();
        for (int k2 = 0; k2 < c.Nt; ++k2) {
            double m = std::numeric_limits<double>::infinity();
            for (int a = 0; a < cs; ++a) m = std::min(m, res.margin[k2 * cs + a]);
            dat << fmt(c.tau_of_layer(k2)) << " " << fmt(m) << "\n";
        }
        cx.out.files["cylinder_margin.dat"] = dat.str();
        out["plot_data"] = "cylinder_margin.dat";
    }
    out["pass"] = res.success == (expect == "success");
    return out;
}

json task_transversality(Context& cx, const json& p) {
    std::optional<int> euler;
    if (p.contains("euler")) euler = p.at("euler").get<int>();
    const TransversalityVerdict v = transversality_sampled(cx.g, cx.b, euler);
    json out;
    out["integral_theta"] = v.integral_theta;
    out["euler"] = v.euler;
    out["euler_term"] = v.euler_term;
    out["margin"] = v.margin;
    out["verdict"] = v.verdict();
    out["reason"] = v.reason;
    out["pass"] = true;
    return out;
}

}  // namespace

void validate_scenario(const std::string& json_text) { (void)parse_scenario(json_text); }

RunOutcome run_scenario_text(const std::string& json_text, const std::string& base_dir, const RunOverrides& ov) {
    RunOutcome outcome;
    Scenario sc;
    try {
        sc = parse_scenario(json_text);
    } catch (const SchemaError& e) {
        outcome.exit_code = kExitSchema;
        outcome.message = e.what();
        return outcome;
    }
    if (ov.seed) sc.seed = *ov.seed;
    if (ov.tol) sc.tol = *ov.tol;
    if (ov.out_dir) sc.out_dir = *ov.out_dir;
    const fs::path base = base_dir.empty() ? fs::path(".") : fs::path(base_dir);

    json report;
    report["seed"] = sc.seed;
    json tasks = json::array();
    int code = kExitOk;
    Context c{sc, base, {}, {}, {}, {}, {}, {}, std::nullopt, {}};
    try {
        c.g = make_geometry(sc.geometry, sc.geometry.N1, sc.geometry.N2, sc.seed);
        c.b = make_bundle(sc.bundle, c.g);
        c.cd = curvature_data(c.g, c.b);
        c.eig.tol = sc.tol;
        c.eig.max_iter = sc.max_iter;
        c.eig.seed = 12345 + sc.seed;
        ScalarField phi(static_cast<std::size_t>(c.g.sites()), 0.0);
        c.weight_desc = sc.weight.mode;
        if (sc.weight.mode == "poisson") {
            phi = poisson_weight(c.g, pick_lambda(c.cd, sc.weight.lambda)).w.phi;
            c.weight_desc += "(" + sc.weight.lambda + ")";
        } else if (sc.weight.mode == "samples") {
            phi = sc.weight.values;
        } else if (sc.weight.mode == "random") {
            phi = random_smooth_field(c.g, sc.weight.amplitude, sc.seed + 31);
        }
        c.w = make_weight(c.g, phi);

        report["geometry"] = {{"L1", sc.geometry.L1}, {"L2", sc.geometry.L2}, {"N1", c.g.N1}, {"N2", c.g.N2},
                              {"u", sc.geometry.u_kind}, {"u_amplitude", sc.geometry.u_amp},
                              {"volume", c.g.volume}, {"h", c.g.h()}};
        report["bundle"] = {{"rank", c.b.rank}, {"c1", sc.bundle.c1}, {"mode", sc.bundle.mode},
                            {"chern_number", chern_number(c.g, c.b)}};
        report["weight"] = {{"mode", c.weight_desc},
                            {"positivity_margin_lambdaS", positivity_margin(c.w, c.cd.lambdaS, 2, 100.0)}};
        for (const auto& t : sc.tasks) {
            json r;
            if (t.type == "spectrum") r = task_spectrum(c, t.params);
            else if (t.type == "bounds") r = task_bounds(c);
            else if (t.type == "solve") r = task_solve(c, t.params);
            else if (t.type == "bochner") r = task_bochner(c, t.params);
            else if (t.type == "cylinder-weight") r = task_cylinder(c, t.params);
            else r = task_transversality(c, t.params);
            json entry;
            entry["type"] = t.type;
            for (auto& [k, v] : r.items()) entry[k] = v;
            if (!entry["pass"].get<bool>()) code = kExitViolation;
            tasks.push_back(entry);
        }
    } catch (const SolverError& e) {
        code = kExitSolver;
        report["error"] = {{"kind", "solver"}, {"message", e.what()}, {"best_residual", e.best_residual()}};
    } catch (const GaugeError& e) {
        code = kExitSolver;
        report["error"] = {{"kind", "gauge"}, {"message", e.what()}};
    } catch (const PreconditionError& e) {
        outcome.exit_code = kExitSchema;
        outcome.message = e.what();
        return outcome;
    }
    if (c.c_tol_value) report["c_tol"] = *c.c_tol_value;
    report["tasks"] = tasks;
    report["exit_code"] = code;
    outcome.exit_code = code;
    outcome.report = report.dump(2) + "\n";

    fs::create_directories(sc.out_dir);
    const auto write = [&](const std::string& name, const std::string& content) {
        const fs::path p = fs::path(sc.out_dir) / name;
        std::ofstream f(p, std::ios::binary);
        f << content;
        outcome.written.push_back(p.string());
    };
    write("report.json", outcome.report);
    for (const auto& [name, content] : c.out.files) write(name, content);
    if (code == kExitSolver) outcome.message = report["error"]["message"].get<std::string>();
    return outcome;
}

RunOutcome run_scenario(const std::string& path, const RunOverrides& ov) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        RunOutcome o;
        o.exit_code = kExitSchema;
        o.message = "cannot read scenario " + path;
        return o;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return run_scenario_text(ss.str(), fs::path(path).parent_path().string(), ov);
}

TransversalityVerdict scenario_transversality(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot read scenario " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    const Scenario sc = parse_scenario(ss.str());
    const TorusGeometry g = make_geometry(sc.geometry, sc.geometry.N1, sc.geometry.N2, sc.seed);
    return transversality_sampled(g, make_bundle(sc.bundle, g));
}

}  // namespace dbench
