#pragma once

// Field and report exporters: CSV (canonical interchange, byte-stable
// round-trip), legacy ASCII VTK STRUCTURED_POINTS (visualization), and JSON
// reports with a provenance block.  No timestamps anywhere: identical inputs
// produce identical bytes.

#include <string>

#include "ldg/asymptotics.hpp"
#include "ldg/config.hpp"
#include "ldg/field.hpp"
#include "ldg/solve.hpp"

namespace ldg {

inline constexpr const char* kVersion = "1.0.0";

// One row per node, x fastest:
// i,j,k,x,y,z,q1..q5,S,R,beta,ftilde,ev1,ev2,ev3  (ev = leading eigenvector).
void export_field_csv(const QField& f, const MaterialParams& p, const std::string& path);

// Rebuilds the grid (dimensions, origin, spacing) and the five coefficients;
// derived columns are ignored.  Exporting the imported field reproduces the
// file byte for byte.
QField import_field_csv(const std::string& path);

// Scalars S, R, beta, ftilde, qnorm plus the leading-eigenvector field.
void export_field_vtk(const QField& f, const MaterialParams& p, const std::string& path);

// format: "csv" or "vtk-structured-points".
void export_field(const QField& f, const MaterialParams& p, const std::string& path,
                  const std::string& format);

std::string report_to_json(const ConvergenceReport& rep, const RunConfig& cfg);
std::string solve_report_to_json(const SolveReport& rep, const RunConfig& cfg);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace ldg
