#pragma once

#include <nlohmann/json.hpp>

#include "mrws/least_gradient.hpp"
#include "mrws/types.hpp"

namespace mrws {

using Json = nlohmann::ordered_json;

struct ParseError : Error {
    int line, column;
    ParseError(const std::string& what, int l, int c)
        : Error(what + " at line " + std::to_string(l) + ", column " + std::to_string(c)),
          line(l), column(c) {}
};
struct SchemaVersionUnsupported : Error {
    using Error::Error;
};
struct ValidationFailed : Error {
    CertificateReport certificate;
    explicit ValidationFailed(CertificateReport c)
        : Error("validation failed: " + c.kind + " (" + c.detail + ")"),
          certificate(std::move(c)) {}
};

struct SolverOptions {
    double q = 2;
    std::vector<double> schedule;  // empty = default
    double tol = 1e-9;
    std::string tie_break = "min";
    double tau = 1e-9;
};

struct LoadedProblem {
    DomainProblem problem;
    SolverOptions options;
    std::string space_path;  // empty when the space was inline
};

RandomWalkSpace load_space(const std::string& path);
void save_space(const RandomWalkSpace& rws, const std::string& path);

LoadedProblem load_problem(const std::string& path);
/// space_ref: path written into the file; empty embeds the space inline.
void save_problem(const DomainProblem& problem, const std::string& space_ref,
                  const std::string& path);

Json space_to_json(const RandomWalkSpace& rws);
RandomWalkSpace space_from_json(const Json& j);

/// Atomic write (temp file + rename), 2-space indentation, trailing newline.
void write_json_atomic(const Json& j, const std::string& path);
void write_text_atomic(const std::string& text, const std::string& path);

/// FNV-1a hash of the file bytes, hex encoded; used for report provenance.
std::string file_digest(const std::string& path);

int label_to_index(const StateSpace& space, const std::string& label);

}  // namespace mrws
