#include "mrws/cli.hpp"

#include <CLI11.hpp>
#include <Eigen/Core>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>

#include "mrws/calibration.hpp"
#include "mrws/io.hpp"
#include "mrws/least_gradient.hpp"
#include "mrws/paper_examples.hpp"
#include "mrws/plap.hpp"
#include "mrws/poincare.hpp"
#include "mrws/rws_core.hpp"

namespace mrws {

namespace {

constexpr const char* kVersion = "0.1.0";

std::string iso_now() {
    std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

Json provenance(const std::string& command, const std::vector<std::string>& inputs) {
    Json p;
    p["version"] = kVersion;
    p["command"] = command;
    Json digests = Json::object();
    for (const auto& in : inputs) digests[in] = file_digest(in);
    p["inputs"] = std::move(digests);
    p["timestamp"] = iso_now();
    return p;
}

Json field_to_json(const RandomWalkSpace& rws, const ScalarField& full) {
    Json u = Json::object();
    for (int i = 0; i < rws.n(); ++i) u[rws.space.labels[i]] = full[i];
    return u;
}

std::string field_to_csv(const RandomWalkSpace& rws, const ScalarField& full) {
    std::string csv = "state,u\n";
    for (int i = 0; i < rws.n(); ++i)
        csv += rws.space.labels[i] + "," + Json(full[i]).dump() + "\n";
    return csv;
}

void emit(const Json& report, const std::string& out, const std::string& csv_path,
          const std::string& csv) {
    if (out.empty())
        std::cout << report.dump(2) << "\n";
    else
        write_json_atomic(report, out);
    if (!csv_path.empty()) write_text_atomic(csv, csv_path);
}

Json certificate_to_json(const CertificateReport& c) {
    return Json{{"pass", c.pass},
                {"kind", c.kind},
                {"max_residual", c.max_residual},
                {"tolerance", c.tolerance},
                {"detail", c.detail}};
}

Json calibration_to_json(const CalibrationCertificate& c) {
    return Json{{"feasible", c.feasible},
                {"pass", c.pass},
                {"sup_defect", c.sup_defect},
                {"antisymmetry_defect", c.antisymmetry_defect},
                {"sign_defect", c.sign_defect},
                {"divergence_defect", c.divergence_defect},
                {"tolerance", c.tolerance}};
}

Json median_to_json(const RandomWalkSpace& rws, const MedianReport& m) {
    Json states = Json::array();
    for (const auto& e : m.entries)
        states.push_back(Json{{"state", rws.space.labels[e.state]},
                              {"m_plus", e.m_plus},
                              {"m_minus", e.m_minus},
                              {"m_zero", e.m_zero},
                              {"ok", e.ok}});
    return Json{{"pass", m.pass}, {"tau", m.tau}, {"states", std::move(states)}};
}

PairField g_from_json(const RandomWalkSpace& rws, const Json& j) {
    PairField g = PairField::zeros_like(rws.walk);
    for (const auto& t : j.at("g")) {
        int x = label_to_index(rws.space, t.at(0).get<std::string>());
        int y = label_to_index(rws.space, t.at(1).get<std::string>());
        const auto& row = rws.walk.rows[x];
        bool found = false;
        for (size_t k = 0; k < row.size(); ++k)
            if (row[k].to == y) {
                g.values[x][k] = t.at(2).get<double>();
                found = true;
            }
        if (!found) throw SupportMismatch("pair (" + t.at(0).get<std::string>() + ", " +
                                          t.at(1).get<std::string>() + ") is not on the support");
    }
    return g;
}

struct CommonArgs {
    std::string input, out, csv;
};

int cmd_validate(const std::string& path, const CommonArgs& args) {
    RandomWalkSpace rws = load_space(path);
    CertificateReport inv = validate_invariance(rws);
    CertificateReport rev = validate_reversibility(rws);
    ErgodicityResult erg = is_ergodic(rws);

    Json rep;
    rep["provenance"] = provenance("validate", {path});
    rep["invariance"] = certificate_to_json(inv);
    rep["reversibility"] = certificate_to_json(rev);
    rep["ergodic"] = erg.ergodic;
    emit(rep, args.out, "", "");
    return (inv.pass && rev.pass && erg.ergodic) ? 0 : 2;
}

int cmd_solve(const std::string& path, const std::string& tie, const CommonArgs& args) {
    LoadedProblem lp = load_problem(path);
    TieBreak tb = tie == "max" ? TieBreak::Maximal : TieBreak::Minimal;
    SolveReport sr = solve_exact(lp.problem, tb);

    Json rep;
    rep["provenance"] = provenance("solve", {path});
    rep["method"] = sr.method;
    rep["tie_break"] = sr.tie_break;
    rep["energy"] = sr.energy;
    rep["u"] = field_to_json(lp.problem.rws, sr.u);
    emit(rep, args.out, args.csv, field_to_csv(lp.problem.rws, sr.u));
    return 0;
}

int cmd_plap(const std::string& path, std::vector<double> schedule, double tol,
             const CommonArgs& args) {
    LoadedProblem lp = load_problem(path);
    if (schedule.empty())
        schedule = lp.options.schedule.empty() ? default_schedule() : lp.options.schedule;
    ContinuationOptions opts;
    if (tol > 0) opts.tol = tol;
    ContinuationResult res = continuation_to_one(lp.problem, schedule, opts);

    Json rep;
    rep["provenance"] = provenance("plap", {path});
    rep["converged"] = res.converged;
    rep["clip_magnitude"] = res.clip_magnitude;
    ScalarField u_omega;
    for (int x : lp.problem.decomp.omega) u_omega.push_back(res.u[x]);
    rep["energy"] = relaxed_energy(lp.problem, u_omega);
    Json trace = Json::array();
    for (const auto& t : res.p_trace)
        trace.push_back(Json{{"p", t.p},
                             {"energy_fp", t.energy_fp},
                             {"energy_j", t.energy_j},
                             {"residual_norm", t.residual_norm}});
    rep["trace"] = std::move(trace);
    rep["u"] = field_to_json(lp.problem.rws, res.u);
    emit(rep, args.out, args.csv, field_to_csv(lp.problem.rws, res.u));
    return res.converged ? 0 : 2;
}

int cmd_calibrate(const std::string& path, const std::string& g_file, double tol,
                  const CommonArgs& args) {
    LoadedProblem lp = load_problem(path);
    SolveReport sr = solve_exact(lp.problem);
    CalibrationCertificate cert;
    std::vector<std::string> inputs{path};
    if (g_file.empty()) {
        cert = find_calibration(lp.problem, sr.u, tol);
    } else {
        inputs.push_back(g_file);
        std::ifstream gin(g_file);
        if (!gin) throw Error("cannot open " + g_file);
        Json gj = Json::parse(gin);
        cert = verify_calibration(lp.problem, sr.u, g_from_json(lp.problem.rws, gj), tol);
    }

    Json rep;
    rep["provenance"] = provenance("calibrate", inputs);
    rep["energy"] = sr.energy;
    rep["certificate"] = calibration_to_json(cert);
    rep["u"] = field_to_json(lp.problem.rws, sr.u);
    emit(rep, args.out, args.csv, field_to_csv(lp.problem.rws, sr.u));
    return (cert.feasible && cert.pass) ? 0 : 2;
}

int cmd_median(const std::string& path, double tau, const CommonArgs& args) {
    LoadedProblem lp = load_problem(path);
    SolveReport sr = solve_exact(lp.problem);
    MedianReport m = median_value_check(lp.problem, sr.u, tau);

    Json rep;
    rep["provenance"] = provenance("median", {path});
    rep["energy"] = sr.energy;
    rep["median"] = median_to_json(lp.problem.rws, m);
    rep["u"] = field_to_json(lp.problem.rws, sr.u);
    emit(rep, args.out, args.csv, field_to_csv(lp.problem.rws, sr.u));
    return m.pass ? 0 : 2;
}

int cmd_poincare(const std::string& path, double q, const std::string& shells,
                 const CommonArgs& args) {
    LoadedProblem lp = load_problem(path);
    PoincareEstimate upper = best_constant(lp.problem, q);
    ShellMetric metric;
    if (shells.rfind("width=", 0) == 0) {
        metric.use_metric = true;
        metric.width = std::stod(shells.substr(6));
    } else if (shells != "hop") {
        throw CLI::ValidationError("--shells must be 'hop' or 'width=W'");
    }
    PoincareEstimate lower = layered_lower_bound(lp.problem, q, metric);

    Json rep;
    rep["provenance"] = provenance("poincare", {path});
    rep["q"] = q;
    rep["lambda_upper"] = upper.lambda_upper;
    rep["lambda_lower"] = lower.lambda_lower;
    Json shells_json = Json::array();
    for (size_t j = 0; j < lower.shells.shells.size(); ++j) {
        Json ids = Json::array();
        for (int x : lower.shells.shells[j]) ids.push_back(lp.problem.rws.space.labels[x]);
        shells_json.push_back(Json{{"states", std::move(ids)},
                                   {"alpha", lower.shells.alphas[j]},
                                   {"c", lower.shells.coefficients[j]}});
    }
    rep["shells"] = std::move(shells_json);
    Json witness = Json::object();
    for (size_t i = 0; i < lp.problem.decomp.omega.size(); ++i)
        witness[lp.problem.rws.space.labels[lp.problem.decomp.omega[i]]] = upper.witness_u[i];
    rep["witness_u"] = std::move(witness);
    ScalarField witness_full(lp.problem.rws.n(), 0.0);
    for (size_t i = 0; i < lp.problem.decomp.omega.size(); ++i)
        witness_full[lp.problem.decomp.omega[i]] = upper.witness_u[i];
    emit(rep, args.out, args.csv, field_to_csv(lp.problem.rws, witness_full));
    return lower.lambda_lower <= upper.lambda_upper + 1e-8 ? 0 : 2;
}

int cmd_paper_examples(const std::string& which, int n, const CommonArgs& args) {
    GeneratedExample ex;
    if (which == "markov")
        ex = gen_markov_counterexample(n);
    else if (which == "tworow")
        ex = gen_tworow_counterexample(n);
    else
        throw CLI::ValidationError("--which must be 'markov' or 'tworow'");

    std::string out = args.out.empty() ? which + "_" + std::to_string(n) + ".json" : args.out;
    save_problem(ex.problem, "", out);
    Json note;
    note["written"] = out;
    note["truncation"] = Json{{"depth", ex.trunc.depth},
                              {"tail_policy", ex.trunc.tail_policy},
                              {"tail_bound", ex.trunc.tail_bound}};
    std::cout << note.dump(2) << "\n";
    return 0;
}

int cmd_report(const std::string& path, const CommonArgs& args) {
    LoadedProblem lp = load_problem(path);
    SolveReport sr = solve_exact(lp.problem);
    ContinuationResult cont = continuation_to_one(
        lp.problem, lp.options.schedule.empty() ? default_schedule() : lp.options.schedule);
    CalibrationCertificate cert = find_calibration(lp.problem, sr.u);
    MedianReport med = median_value_check(lp.problem, sr.u, lp.options.tau);
    PoincareEstimate upper = best_constant(lp.problem, lp.options.q);
    PoincareEstimate lower = layered_lower_bound(lp.problem, lp.options.q);

    Json rep;
    rep["provenance"] = provenance("report", {path});
    rep["exact"] = Json{{"energy", sr.energy}, {"u", field_to_json(lp.problem.rws, sr.u)}};
    ScalarField cont_omega;
    for (int x : lp.problem.decomp.omega) cont_omega.push_back(cont.u[x]);
    rep["continuation"] = Json{{"converged", cont.converged},
                               {"energy", relaxed_energy(lp.problem, cont_omega)},
                               {"u", field_to_json(lp.problem.rws, cont.u)}};
    rep["calibration"] = calibration_to_json(cert);
    rep["median"] = median_to_json(lp.problem.rws, med);
    rep["poincare"] = Json{{"q", lp.options.q},
                           {"lambda_upper", upper.lambda_upper},
                           {"lambda_lower", lower.lambda_lower}};
    emit(rep, args.out, args.csv, field_to_csv(lp.problem.rws, sr.u));
    bool pass = cert.feasible && cert.pass && med.pass &&
                lower.lambda_lower <= upper.lambda_upper + 1e-8;
    return pass ? 0 : 2;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    if (const char* threads = std::getenv("MRWS_THREADS")) {
        int t = std::atoi(threads);
        if (t > 0) Eigen::setNbThreads(t);
    }

    CLI::App app{"finite metric random walk spaces: nonlocal least-gradient toolbox"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string tie = "min", g_file, shells = "hop", which = "markov";
    std::vector<double> schedule;
    double tol = 1e-9, plap_tol = 0, tau = 1e-9, q = 2;
    int n = 8;

    auto add_common = [&](CLI::App* sub, bool needs_input = true) {
        if (needs_input) sub->add_option("input", args.input, "input file")->required();
        sub->add_option("--out", args.out, "write a JSON report here");
        sub->add_option("--csv", args.csv, "write the flat u table here");
    };

    auto* validate_cmd = app.add_subcommand("validate", "check space invariants");
    add_common(validate_cmd);
    auto* solve_cmd = app.add_subcommand("solve", "exact least-gradient solve");
    add_common(solve_cmd);
    solve_cmd->add_option("--tie-break", tie, "min or max")
        ->check(CLI::IsMember({"min", "max"}));
    auto* plap_cmd = app.add_subcommand("plap", "p-Laplacian continuation to p = 1");
    add_common(plap_cmd);
    plap_cmd->add_option("--schedule", schedule, "decreasing p values");
    plap_cmd->add_option("--tol", plap_tol, "continuation stall tolerance");
    auto* cal_cmd = app.add_subcommand("calibrate", "find or verify a calibration");
    add_common(cal_cmd);
    cal_cmd->add_option("--g-file", g_file, "verify this pair field instead of searching");
    cal_cmd->add_option("--tol", tol, "sign dead-band and certificate tolerance");
    auto* med_cmd = app.add_subcommand("median", "median value property check");
    add_common(med_cmd);
    med_cmd->add_option("--tau", tau, "dead-band for ties");
    auto* poi_cmd = app.add_subcommand("poincare", "Poincare constant estimates");
    add_common(poi_cmd);
    poi_cmd->add_option("--q", q, "exponent");
    poi_cmd->add_option("--shells", shells, "hop or width=W");
    auto* gen_cmd = app.add_subcommand("paper-examples", "generate counterexample truncations");
    add_common(gen_cmd, false);
    gen_cmd->add_option("--which", which, "markov or tworow")
        ->check(CLI::IsMember({"markov", "tworow"}));
    gen_cmd->add_option("--n", n, "truncation depth");
    auto* rep_cmd = app.add_subcommand("report", "run the full pipeline");
    add_common(rep_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(validate_cmd)) return cmd_validate(args.input, args);
        if (app.got_subcommand(solve_cmd)) return cmd_solve(args.input, tie, args);
        if (app.got_subcommand(plap_cmd)) return cmd_plap(args.input, schedule, plap_tol, args);
        if (app.got_subcommand(cal_cmd)) return cmd_calibrate(args.input, g_file, tol, args);
        if (app.got_subcommand(med_cmd)) return cmd_median(args.input, tau, args);
        if (app.got_subcommand(poi_cmd)) return cmd_poincare(args.input, q, shells, args);
        if (app.got_subcommand(gen_cmd)) return cmd_paper_examples(which, n, args);
        if (app.got_subcommand(rep_cmd)) return cmd_report(args.input, args);
    } catch (const ValidationFailed& e) {
        Json rep;
        rep["error"] = "ValidationFailed";
        rep["certificate"] = certificate_to_json(e.certificate);
        std::cout << rep.dump(2) << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

}  // namespace mrws
