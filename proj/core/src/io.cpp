#include "mrws/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mrws/rws_core.hpp"

namespace mrws {

namespace {

constexpr int kFormatVersion = 1;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Json parse_document(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        int line = 1, col = 1;
        for (size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ParseError(e.what(), line, col);
    }
}

void check_version(const Json& j, const std::string& what) {
    if (!j.contains("format_version") || !j["format_version"].is_number_integer())
        throw SchemaVersionUnsupported(what + " lacks a format_version");
    if (j["format_version"].get<int>() != kFormatVersion)
        throw SchemaVersionUnsupported(what + " format_version " +
                                       j["format_version"].dump() + " is unsupported");
}

}  // namespace

int label_to_index(const StateSpace& space, const std::string& label) {
    for (int i = 0; i < space.n; ++i)
        if (space.labels[i] == label) return i;
    throw Error("unknown state id '" + label + "'");
}

Json space_to_json(const RandomWalkSpace& rws) {
    Json j;
    j["format_version"] = kFormatVersion;
    j["states"] = Json::array();
    for (int i = 0; i < rws.n(); ++i) {
        Json s;
        s["id"] = rws.space.labels[i];
        if (rws.space.coords) s["coords"] = (*rws.space.coords)[i];
        s["nu"] = rws.nu(i);
        j["states"].push_back(std::move(s));
    }
    Json walk;
    walk["type"] = "rows";
    walk["rows"] = Json::array();
    for (int x = 0; x < rws.n(); ++x) {
        Json row;
        row["from"] = rws.space.labels[x];
        row["to"] = Json::array();
        for (const auto& e : rws.walk.rows[x])
            row["to"].push_back(Json::array({rws.space.labels[e.to], e.p}));
        walk["rows"].push_back(std::move(row));
    }
    j["walk"] = std::move(walk);
    if (rws.space.metric) {
        Json table = Json::array();
        for (int i = 0; i < rws.n(); ++i) {
            Json row = Json::array();
            for (int k = 0; k < rws.n(); ++k) row.push_back(rws.space.dist(i, k));
            table.push_back(std::move(row));
        }
        j["metric"] = Json{{"table", std::move(table)}};
    }
    return j;
}

RandomWalkSpace space_from_json(const Json& j) {
    check_version(j, "space file");
    if (!j.contains("states") || !j["states"].is_array() || j["states"].empty())
        throw Error("space file needs a non-empty states array");

    StateSpace sp;
    sp.n = static_cast<int>(j["states"].size());
    std::vector<double> nu;
    bool any_coords = false;
    for (const auto& s : j["states"]) {
        sp.labels.push_back(s.at("id").get<std::string>());
        nu.push_back(s.contains("nu") ? s["nu"].get<double>() : std::nan(""));
        if (s.contains("coords")) any_coords = true;
    }
    if (any_coords) {
        std::vector<std::vector<double>> coords;
        for (const auto& s : j["states"])
            coords.push_back(s.at("coords").get<std::vector<double>>());
        sp.coords = std::move(coords);
    }

    const Json& walk = j.at("walk");
    std::string type = walk.at("type").get<std::string>();
    RandomWalkSpace rws;
    if (type == "graph") {
        std::vector<WeightTriple> triples;
        for (const auto& e : walk.at("edges"))
            triples.push_back({label_to_index(sp, e.at(0).get<std::string>()),
                               label_to_index(sp, e.at(1).get<std::string>()),
                               e.at(2).get<double>()});
        rws = build_from_symmetric_weights(std::move(sp), triples);
    } else if (type == "rows") {
        for (double w : nu)
            if (!std::isfinite(w) || w <= 0)
                throw Error("rows variant requires a positive nu per state");
        rws.nu.weights = std::move(nu);
        rws.walk.rows.resize(sp.n);
        for (const auto& row : walk.at("rows")) {
            int x = label_to_index(sp, row.at("from").get<std::string>());
            double sum = 0;
            for (const auto& pair : row.at("to")) {
                double p = pair.at(1).get<double>();
                rws.walk.rows[x].push_back({label_to_index(sp, pair.at(0).get<std::string>()), p});
                sum += p;
            }
            std::sort(rws.walk.rows[x].begin(), rws.walk.rows[x].end(),
                      [](const auto& a, const auto& b) { return a.to < b.to; });
            if (std::abs(sum - 1.0) > 1e-9) {
                CertificateReport cert{false, "NotStochastic", std::abs(sum - 1.0), 1e-9,
                                       "row '" + sp.labels[x] + "' sums to " + std::to_string(sum)};
                throw ValidationFailed(std::move(cert));
            }
        }
        rws.space = std::move(sp);
        validate(rws);
    } else {
        throw Error("unknown walk type '" + type + "'");
    }

    if (j.contains("metric")) {
        const Json& m = j["metric"];
        if (m.is_string() && m.get<std::string>() == "coords-euclidean") {
            if (!rws.space.coords) throw MissingMetric("coords-euclidean needs state coords");
            const auto& c = *rws.space.coords;
            std::vector<double> table(static_cast<size_t>(rws.n()) * rws.n(), 0.0);
            for (int a = 0; a < rws.n(); ++a)
                for (int b = 0; b < rws.n(); ++b) {
                    double d2 = 0;
                    for (size_t dd = 0; dd < c[a].size(); ++dd)
                        d2 += (c[a][dd] - c[b][dd]) * (c[a][dd] - c[b][dd]);
                    table[static_cast<size_t>(a) * rws.n() + b] = std::sqrt(d2);
                }
            rws.space.metric = std::move(table);
        } else if (m.is_object() && m.contains("table")) {
            std::vector<double> table;
            for (const auto& row : m["table"])
                for (const auto& v : row) table.push_back(v.get<double>());
            if (table.size() != static_cast<size_t>(rws.n()) * rws.n())
                throw Error("metric table has the wrong shape");
            rws.space.metric = std::move(table);
        } else {
            throw Error("unknown metric specification");
        }
    }
    return rws;
}

RandomWalkSpace load_space(const std::string& path) {
    return space_from_json(parse_document(read_file(path)));
}

void save_space(const RandomWalkSpace& rws, const std::string& path) {
    write_json_atomic(space_to_json(rws), path);
}

LoadedProblem load_problem(const std::string& path) {
    Json j = parse_document(read_file(path));
    check_version(j, "problem file");

    LoadedProblem lp;
    RandomWalkSpace rws;
    const Json& sref = j.at("space");
    if (sref.is_string()) {
        std::filesystem::path p(sref.get<std::string>());
        if (p.is_relative()) p = std::filesystem::path(path).parent_path() / p;
        lp.space_path = p.string();
        rws = load_space(lp.space_path);
    } else {
        rws = space_from_json(sref);
    }

    std::vector<int> omega;
    for (const auto& id : j.at("omega"))
        omega.push_back(label_to_index(rws.space, id.get<std::string>()));
    BoundaryData psi;
    for (const auto& [id, v] : j.at("psi").items())
        psi.emplace_back(label_to_index(rws.space, id), v.get<double>());
    std::sort(psi.begin(), psi.end());
    lp.problem = make_problem(std::move(rws), sorted_unique(std::move(omega)), std::move(psi));

    if (j.contains("options")) {
        const Json& o = j["options"];
        if (o.contains("q")) lp.options.q = o["q"].get<double>();
        if (o.contains("schedule")) lp.options.schedule = o["schedule"].get<std::vector<double>>();
        if (o.contains("tol")) lp.options.tol = o["tol"].get<double>();
        if (o.contains("tie_break")) lp.options.tie_break = o["tie_break"].get<std::string>();
        if (o.contains("tau")) lp.options.tau = o["tau"].get<double>();
    }
    return lp;
}

void save_problem(const DomainProblem& problem, const std::string& space_ref,
                  const std::string& path) {
    Json j;
    j["format_version"] = kFormatVersion;
    if (space_ref.empty())
        j["space"] = space_to_json(problem.rws);
    else
        j["space"] = space_ref;
    j["omega"] = Json::array();
    for (int x : problem.decomp.omega) j["omega"].push_back(problem.rws.space.labels[x]);
    Json psi = Json::object();
    for (const auto& [b, v] : problem.psi) psi[problem.rws.space.labels[b]] = v;
    j["psi"] = std::move(psi);
    write_json_atomic(j, path);
}

void write_text_atomic(const std::string& text, const std::string& path) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp);
        out << text;
    }
    std::filesystem::rename(tmp, path);
}

void write_json_atomic(const Json& j, const std::string& path) {
    write_text_atomic(j.dump(2) + "\n", path);
}

std::string file_digest(const std::string& path) {
    std::string data = read_file(path);
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace mrws
