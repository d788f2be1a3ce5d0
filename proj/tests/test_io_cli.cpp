#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "mrws/cli.hpp"
#include "mrws/io.hpp"

using namespace mrws;
using namespace mrws::testutil;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path dir;
    TempDir() {
        dir = fs::temp_directory_path() / ("mrws_test_" + std::to_string(::getpid()));
        fs::create_directories(dir);
    }
    ~TempDir() { fs::remove_all(dir); }
    std::string path(const std::string& name) const { return (dir / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run(std::vector<std::string> args) {
    std::vector<const char*> argv{"mrws"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

void write_p3_graph_file(const std::string& path) {
    Json j;
    j["format_version"] = 1;
    j["states"] = Json::array({Json{{"id", "a"}}, Json{{"id", "b"}}, Json{{"id", "c"}}});
    j["walk"] = Json{{"type", "graph"},
                     {"edges", Json::array({Json::array({"a", "b", 1.0}),
                                            Json::array({"b", "c", 1.0})})}};
    write_json_atomic(j, path);
}

void write_p3_problem_file(const std::string& path, const std::string& space_ref) {
    Json j;
    j["format_version"] = 1;
    j["space"] = space_ref;
    j["omega"] = Json::array({"b"});
    j["psi"] = Json{{"a", 0.0}, {"c", 1.0}};
    write_json_atomic(j, path);
}

}  // namespace

TEST_CASE("load_space reads the graph variant") {
    TempDir tmp;
    write_p3_graph_file(tmp.path("p3.json"));
    auto rws = load_space(tmp.path("p3.json"));
    auto ref = p3_space();
    REQUIRE(rws.n() == 3);
    for (int i = 0; i < 3; ++i) {
        CHECK(rws.space.labels[i] == ref.space.labels[i]);
        CHECK(rws.nu(i) == ref.nu(i));
    }
    CHECK(rws.walk.prob(1, 0) == 0.5);
    CHECK(rws.flags.reversibility_ok == Tri::True);
}

TEST_CASE("load_space rejects a non-stochastic rows variant") {
    TempDir tmp;
    Json j;
    j["format_version"] = 1;
    j["states"] = Json::array({Json{{"id", "a"}, {"nu", 1.0}}, Json{{"id", "b"}, {"nu", 1.0}}});
    j["walk"] = Json{
        {"type", "rows"},
        {"rows", Json::array({Json{{"from", "a"}, {"to", Json::array({Json::array({"b", 0.9})})}},
                              Json{{"from", "b"}, {"to", Json::array({Json::array({"a", 1.0})})}}})}};
    write_json_atomic(j, tmp.path("bad.json"));
    try {
        load_space(tmp.path("bad.json"));
        FAIL("expected ValidationFailed");
    } catch (const ValidationFailed& e) {
        CHECK(e.certificate.kind == "NotStochastic");
        CHECK(e.certificate.max_residual == doctest::Approx(0.1).epsilon(1e-12));
    }
}

TEST_CASE("load_space reports parse positions and schema versions") {
    TempDir tmp;
    write_text_atomic("{\n  \"format_version\": 1,\n  oops\n}\n", tmp.path("broken.json"));
    try {
        load_space(tmp.path("broken.json"));
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 3);
    }

    write_text_atomic("{\"states\": []}\n", tmp.path("nover.json"));
    CHECK_THROWS_AS(load_space(tmp.path("nover.json")), SchemaVersionUnsupported);
    write_text_atomic("{\"format_version\": 99, \"states\": []}\n", tmp.path("v99.json"));
    CHECK_THROWS_AS(load_space(tmp.path("v99.json")), SchemaVersionUnsupported);
}

TEST_CASE("canonical save round-trips byte for byte") {
    TempDir tmp;
    save_space(p3_space(), tmp.path("one.json"));
    auto rws = load_space(tmp.path("one.json"));
    save_space(rws, tmp.path("two.json"));
    CHECK(slurp(tmp.path("one.json")) == slurp(tmp.path("two.json")));
}

TEST_CASE("problem files resolve relative space paths") {
    TempDir tmp;
    write_p3_graph_file(tmp.path("p3.json"));
    write_p3_problem_file(tmp.path("problem.json"), "p3.json");
    auto lp = load_problem(tmp.path("problem.json"));
    CHECK(lp.problem.decomp.omega == std::vector<int>{1});
    CHECK(lp.problem.psi_at(2) == 1.0);
    CHECK_FALSE(lp.space_path.empty());
}

TEST_CASE("save_problem embeds the space inline") {
    TempDir tmp;
    save_problem(p3_problem(), "", tmp.path("inline.json"));
    auto lp = load_problem(tmp.path("inline.json"));
    CHECK(lp.space_path.empty());
    CHECK(lp.problem.decomp.omega == std::vector<int>{1});
    CHECK(solve_exact(lp.problem).energy == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("problem options are parsed") {
    TempDir tmp;
    Json j;
    j["format_version"] = 1;
    j["space"] = space_to_json(p3_space());
    j["omega"] = Json::array({"b"});
    j["psi"] = Json{{"a", 0.0}, {"c", 1.0}};
    j["options"] = Json{{"q", 1.0}, {"tie_break", "max"}, {"tau", 1e-6}};
    write_json_atomic(j, tmp.path("opt.json"));
    auto lp = load_problem(tmp.path("opt.json"));
    CHECK(lp.options.q == 1.0);
    CHECK(lp.options.tie_break == "max");
    CHECK(lp.options.tau == 1e-6);
}

TEST_CASE("file_digest is content addressed") {
    TempDir tmp;
    write_text_atomic("hello\n", tmp.path("x"));
    write_text_atomic("hello\n", tmp.path("y"));
    write_text_atomic("other\n", tmp.path("z"));
    CHECK(file_digest(tmp.path("x")) == file_digest(tmp.path("y")));
    CHECK(file_digest(tmp.path("x")) != file_digest(tmp.path("z")));
    CHECK(file_digest(tmp.path("x")).size() == 16);
}

TEST_CASE("cli: validate") {
    TempDir tmp;
    write_p3_graph_file(tmp.path("p3.json"));
    CHECK(run({"validate", tmp.path("p3.json"), "--out", tmp.path("v.json")}) == 0);
    Json rep = Json::parse(slurp(tmp.path("v.json")));
    CHECK(rep["invariance"]["pass"] == true);
    CHECK(rep["reversibility"]["pass"] == true);
    CHECK(rep["ergodic"] == true);
    CHECK(rep["provenance"]["version"] == "0.1.0");

    // disconnected space: exit 2
    auto rws = build_from_symmetric_weights(named_states({"a", "b", "c", "d"}),
                                            {{0, 1, 1.0}, {2, 3, 1.0}});
    save_space(rws, tmp.path("disc.json"));
    CHECK(run({"validate", tmp.path("disc.json")}) == 2);
}

TEST_CASE("cli: solve with both tie breaks") {
    TempDir tmp;
    write_p3_graph_file(tmp.path("p3.json"));
    write_p3_problem_file(tmp.path("problem.json"), "p3.json");
    CHECK(run({"solve", tmp.path("problem.json"), "--out", tmp.path("s.json"), "--csv",
               tmp.path("s.csv")}) == 0);
    Json rep = Json::parse(slurp(tmp.path("s.json")));
    CHECK(rep["energy"] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(rep["u"]["b"] == 0.0);
    CHECK(slurp(tmp.path("s.csv")).rfind("state,u\n", 0) == 0);

    CHECK(run({"solve", tmp.path("problem.json"), "--tie-break", "max", "--out",
               tmp.path("s2.json")}) == 0);
    Json rep2 = Json::parse(slurp(tmp.path("s2.json")));
    CHECK(rep2["u"]["b"] == 1.0);
}

TEST_CASE("cli: plap, calibrate, median, poincare") {
    TempDir tmp;
    write_p3_graph_file(tmp.path("p3.json"));
    write_p3_problem_file(tmp.path("problem.json"), "p3.json");

    CHECK(run({"plap", tmp.path("problem.json"), "--out", tmp.path("p.json")}) == 0);
    Json prep = Json::parse(slurp(tmp.path("p.json")));
    CHECK(prep["converged"] == true);
    CHECK(prep["energy"] == doctest::Approx(1.0).epsilon(1e-8));

    CHECK(run({"calibrate", tmp.path("problem.json"), "--out", tmp.path("c.json")}) == 0);
    Json crep = Json::parse(slurp(tmp.path("c.json")));
    CHECK(crep["certificate"]["pass"] == true);

    CHECK(run({"median", tmp.path("problem.json"), "--out", tmp.path("m.json")}) == 0);
    CHECK(run({"poincare", tmp.path("problem.json"), "--out", tmp.path("q.json")}) == 0);
    Json qrep = Json::parse(slurp(tmp.path("q.json")));
    CHECK(qrep["lambda_upper"] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(qrep["lambda_lower"] == 0.25);
}

TEST_CASE("cli: verify a user-provided pair field") {
    TempDir tmp;
    write_p3_graph_file(tmp.path("p3.json"));
    write_p3_problem_file(tmp.path("problem.json"), "p3.json");
    Json g;
    g["g"] = Json::array({Json::array({"a", "b", 1.0}), Json::array({"b", "a", -1.0}),
                          Json::array({"b", "c", 1.0}), Json::array({"c", "b", -1.0})});
    write_json_atomic(g, tmp.path("g.json"));
    CHECK(run({"calibrate", tmp.path("problem.json"), "--g-file", tmp.path("g.json"), "--out",
               tmp.path("cv.json")}) == 0);

    Json bad;
    bad["g"] = Json::array({Json::array({"b", "a", 0.5})});
    write_json_atomic(bad, tmp.path("gbad.json"));
    CHECK(run({"calibrate", tmp.path("problem.json"), "--g-file", tmp.path("gbad.json"),
               "--out", tmp.path("cb.json")}) == 2);
}

TEST_CASE("cli: report runs the whole pipeline") {
    TempDir tmp;
    save_problem(cycle4_problem(), "", tmp.path("cycle.json"));
    CHECK(run({"report", tmp.path("cycle.json"), "--out", tmp.path("r.json")}) == 0);
    Json rep = Json::parse(slurp(tmp.path("r.json")));
    CHECK(rep["exact"]["energy"] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(rep["continuation"]["converged"] == true);
    CHECK(rep["calibration"]["pass"] == true);
    CHECK(rep["median"]["pass"] == true);
    double lo = rep["poincare"]["lambda_lower"].get<double>();
    double hi = rep["poincare"]["lambda_upper"].get<double>();
    CHECK(lo <= hi + 1e-8);
}

TEST_CASE("cli: paper-examples generator") {
    TempDir tmp;
    CHECK(run({"paper-examples", "--which", "markov", "--n", "4", "--out",
               tmp.path("m4.json")}) == 0);
    auto lp = load_problem(tmp.path("m4.json"));
    CHECK(lp.problem.rws.n() == 5);
    CHECK(validate_reversibility(lp.problem.rws, 1e-12).pass);
}

TEST_CASE("cli: exit codes for bad input") {
    TempDir tmp;
    CHECK(run({"frobnicate"}) == 1);
    write_text_atomic("not json", tmp.path("junk.json"));
    CHECK(run({"solve", tmp.path("junk.json")}) == 1);
    CHECK(run({"solve", tmp.path("missing.json")}) == 2);
}
