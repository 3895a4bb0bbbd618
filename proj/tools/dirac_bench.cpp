#include "dbench/audit.hpp"
#include "dbench/corpus.hpp"
#include "dbench/scenario.hpp"
#include "dbench/transversality.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

using namespace dbench;
using json = nlohmann::ordered_json;

namespace {

json verdict_json(const TransversalityVerdict& v) {
    json j;
    j["integral_theta"] = v.integral_theta;
    j["euler"] = v.euler;
    j["euler_term"] = v.euler_term;
    j["margin"] = v.margin;
    if (v.exact) j["margin_over_2pi"] = v.margin_units;
    j["exact"] = v.exact;
    j["verdict"] = v.verdict();
    j["reason"] = v.reason;
    return j;
}

json record_json(const AuditRecord& r) {
    json j;
    j["label"] = r.label;
    j["index"] = r.index;
    j["c1"] = r.c1;
    j["rank"] = r.rank;
    j["roughness"] = r.roughness;
    j["amplitude"] = r.amplitude;
    j["h"] = r.h;
    j["weight"] = r.weight_kind;
    json recs = json::array();
    for (const auto& x : r.bounds.records)
        recs.push_back({{"name", x.name}, {"lhs", x.lhs}, {"rhs", x.rhs}, {"slack", x.slack}, {"tol", x.tol},
                        {"pass", x.pass}});
    j["bounds"] = recs;
    const auto ineq = [](const InequalitySummary& s) {
        return json{{"tested", s.tested}, {"violations", s.violations}, {"worst_scaled_slack", s.worst_scaled_slack},
                    {"worst_kind", s.worst_kind}};
    };
    j["inequality"] = ineq(r.ungraded);
    j["graded_inequality"] = ineq(r.graded);
    json solves = json::array();
    for (const auto& s : r.solves)
        solves.push_back({{"side", s.side}, {"rhs", s.rhs_kind}, {"estimate", to_string(s.status)}, {"lhs", s.lhs},
                          {"rhs_bound", s.rhs}, {"residual", s.residual}, {"minimality", s.minimality},
                          {"denominator_min", s.denominator_min}});
    j["solves"] = solves;
    j["pass"] = r.pass();
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    par::set_threads_from_env();
    CLI::App app{"Dirac operator bound workbench"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run a scenario file");
    std::string scenario_path;
    std::uint64_t seed = 0;
    std::string out_dir;
    double tol = 0;
    run->add_option("scenario", scenario_path, "Scenario JSON")->required();
    auto* seed_opt = run->add_option("--seed", seed, "Override the scenario seed");
    auto* out_opt = run->add_option("--out", out_dir, "Output directory");
    auto* tol_opt = run->add_option("--tol", tol, "Solver residual target")->check(CLI::PositiveNumber);

    auto* trans = app.add_subcommand("transversality", "Curvature-integral transversality audit");
    int c1 = 0, rank = 1, genus = 0;
    std::string trans_scenario;
    auto* c1_opt = trans->add_option("--c1", c1, "First Chern number");
    trans->add_option("--rank", rank, "Bundle rank")->check(CLI::PositiveNumber);
    trans->add_option("--genus", genus, "Genus of the surface")->check(CLI::NonNegativeNumber);
    auto* sc_opt = trans->add_option("--scenario", trans_scenario, "Sampled form from a scenario file");
    c1_opt->excludes(sc_opt);

    auto* corpus = app.add_subcommand("corpus", "Randomized invariant corpus");
    int count = 200, grid = 24, sections = 100;
    std::uint64_t corpus_seed = 2026;
    double c_tol = -1;
    std::string corpus_out = "dirac-bench-corpus";
    corpus->add_option("--count", count, "Number of instances")->check(CLI::PositiveNumber);
    corpus->add_option("--seed", corpus_seed, "Corpus seed");
    corpus->add_option("--grid", grid, "Grid size per axis")->check(CLI::Range(8, 512));
    corpus->add_option("--sections", sections, "Random sections per instance")->check(CLI::PositiveNumber);
    corpus->add_option("--c-tol", c_tol, "Discretization allowance (calibrated when omitted)");
    corpus->add_option("--out", corpus_out, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitSchema;
    }

    try {
        if (*run) {
            RunOverrides ov;
            if (*seed_opt) ov.seed = seed;
            if (*out_opt) ov.out_dir = out_dir;
            if (*tol_opt) ov.tol = tol;
            const RunOutcome o = run_scenario(scenario_path, ov);
            if (!o.message.empty()) std::cerr << "dirac-bench: " << o.message << "\n";
            for (const auto& f : o.written) std::cout << "wrote " << f << "\n";
            return o.exit_code;
        }
        if (*trans) {
            TransversalityVerdict v;
            if (*sc_opt) {
                v = scenario_transversality(trans_scenario);
            } else {
                if (!*c1_opt) {
                    std::cerr << "dirac-bench: transversality needs --c1 or --scenario\n";
                    return kExitSchema;
                }
                v = transversality_summary(c1, rank, genus);
            }
            std::cout << verdict_json(v).dump(2) << "\n";
            return kExitOk;
        }
        if (*corpus) {
            if (c_tol < 0) c_tol = calibrate_c_tol(grid);
            AuditOptions opt;
            opt.c_tol = c_tol;
            opt.sections = sections;
            json doc;
            doc["seed"] = corpus_seed;
            doc["count"] = count;
            doc["grid"] = grid;
            doc["c_tol"] = c_tol;
            json recs = json::array();
            int failures = 0;
            for (int i = 0; i < count; ++i) {
                const AuditRecord r = audit_instance(corpus_instance(corpus_seed, i, grid), opt);
                if (!r.pass()) ++failures;
                std::cout << (r.pass() ? "pass " : "FAIL ") << r.label << "\n";
                recs.push_back(record_json(r));
            }
            doc["failures"] = failures;
            doc["instances"] = recs;
            std::filesystem::create_directories(corpus_out);
            const auto path = std::filesystem::path(corpus_out) / "corpus.json";
            std::ofstream(path) << doc.dump(2) << "\n";
            std::cout << "wrote " << path.string() << "\n";
            return failures ? kExitViolation : kExitOk;
        }
    } catch (const SchemaError& e) {
        std::cerr << "dirac-bench: " << e.what() << "\n";
        return kExitSchema;
    } catch (const SolverError& e) {
        std::cerr << "dirac-bench: " << e.what() << " (best residual " << e.best_residual() << ")\n";
        return kExitSolver;
    } catch (const GaugeError& e) {
        std::cerr << "dirac-bench: " << e.what() << "\n";
        return kExitSolver;
    } catch (const PreconditionError& e) {
        std::cerr << "dirac-bench: " << e.what() << "\n";
        return kExitSchema;
    }
    return kExitOk;
}
