#include "ldg/export.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ldg/errors.hpp"

namespace ldg {

namespace {

std::string fmt(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, p);
}

double parse_double_tok(const std::string& tok, int line) {
    double out;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    if (ec != std::errc{} || p != tok.data() + tok.size())
        throw io_error("csv line " + std::to_string(line) + ": bad number '" + tok + "'");
    return out;
}

constexpr const char* kCsvHeader = "i,j,k,x,y,z,q1,q2,q3,q4,q5,S,R,beta,ftilde,ev1,ev2,ev3";

}  // namespace

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open for writing: " + path);
    out << text;
    if (!out) throw io_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void export_field_csv(const QField& f, const MaterialParams& p, const std::string& path) {
    const Grid3& g = f.grid;
    std::string out;
    out.reserve(g.n_nodes() * 160);
    out += kCsvHeader;
    out += '\n';
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const QTensor& q = f.v[g.idx(i, j, k)];
                Vec3 x = g.pos(i, j, k);
                SRCapRep sr = decompose_SR(q);
                Vec3 ev = eigen(q).vec[0];
                out += std::to_string(i);
                out += ',';
                out += std::to_string(j);
                out += ',';
                out += std::to_string(k);
                for (int a = 0; a < 3; ++a) {
                    out += ',';
                    out += fmt(x[a]);
                }
                for (int a = 0; a < 5; ++a) {
                    out += ',';
                    out += fmt(q.a[a]);
                }
                out += ',';
                out += fmt(sr.S);
                out += ',';
                out += fmt(sr.R);
                out += ',';
                out += fmt(biaxiality(q));
                out += ',';
                out += fmt(f_bulk_shifted(q, p));
                for (int a = 0; a < 3; ++a) {
                    out += ',';
                    out += fmt(ev[a]);
                }
                out += '\n';
            }
    write_text_file(path, out);
}

QField import_field_csv(const std::string& path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    if (!std::getline(in, line)) throw io_error("csv: empty file: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader) throw io_error("csv: unexpected header: " + path);

    struct Row {
        int i, j, k;
        Vec3 x;
        QTensor q;
    };
    std::vector<Row> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> tok;
        std::string cur;
        for (char ch : line) {
            if (ch == ',') {
                tok.push_back(cur);
                cur.clear();
            } else {
                cur += ch;
            }
        }
        tok.push_back(cur);
        if (tok.size() != 18)
            throw io_error("csv line " + std::to_string(lineno) + ": expected 18 columns, got " +
                           std::to_string(tok.size()));
        Row r;
        r.i = static_cast<int>(parse_double_tok(tok[0], lineno));
        r.j = static_cast<int>(parse_double_tok(tok[1], lineno));
        r.k = static_cast<int>(parse_double_tok(tok[2], lineno));
        for (int a = 0; a < 3; ++a) r.x[a] = parse_double_tok(tok[3 + a], lineno);
        for (int a = 0; a < 5; ++a) r.q.a[a] = parse_double_tok(tok[6 + a], lineno);
        rows.push_back(r);
    }
    if (rows.empty()) throw io_error("csv: no data rows: " + path);

    int nx = 0, ny = 0, nz = 0;
    for (const Row& r : rows) {
        if (r.i < 0 || r.j < 0 || r.k < 0) throw io_error("csv: negative node index: " + path);
        nx = std::max(nx, r.i + 1);
        ny = std::max(ny, r.j + 1);
        nz = std::max(nz, r.k + 1);
    }
    if (rows.size() != static_cast<std::size_t>(nx) * ny * nz)
        throw io_error("csv: row count does not fill the grid: " + path);

    Vec3 origin{0, 0, 0};
    double h = 0;
    bool have_origin = false, have_h = false;
    for (const Row& r : rows) {
        if (r.i == 0 && r.j == 0 && r.k == 0) {
            origin = r.x;
            have_origin = true;
        }
        if (r.i == 1 && r.j == 0 && r.k == 0) {
            h = r.x[0];
            have_h = true;
        }
    }
    if (!have_origin || !have_h) throw io_error("csv: missing origin/spacing rows: " + path);
    h -= origin[0];
    if (!(h > 0)) throw io_error("csv: non-positive spacing: " + path);

    QField f = make_qfield(make_grid(nx, ny, nz, h, origin));
    std::vector<char> filled(f.v.size(), 0);
    for (const Row& r : rows) {
        if (r.i >= nx || r.j >= ny || r.k >= nz) throw io_error("csv: index out of range: " + path);
        std::size_t c = f.grid.idx(r.i, r.j, r.k);
        if (filled[c]) throw io_error("csv: duplicate node: " + path);
        filled[c] = 1;
        f.v[c] = r.q;
    }
    return f;
}

void export_field_vtk(const QField& f, const MaterialParams& p, const std::string& path) {
    const Grid3& g = f.grid;
    std::string out;
    out.reserve(g.n_nodes() * 120);
    out += "# vtk DataFile Version 3.0\n";
    out += "Landau-de Gennes Q-tensor field\n";
    out += "ASCII\n";
    out += "DATASET STRUCTURED_POINTS\n";
    out += "DIMENSIONS " + std::to_string(g.nx) + " " + std::to_string(g.ny) + " " +
           std::to_string(g.nz) + "\n";
    out += "ORIGIN " + fmt(g.origin[0]) + " " + fmt(g.origin[1]) + " " + fmt(g.origin[2]) + "\n";
    out += "SPACING " + fmt(g.h) + " " + fmt(g.h) + " " + fmt(g.h) + "\n";
    out += "POINT_DATA " + std::to_string(g.n_nodes()) + "\n";

    auto scalars = [&](const char* name, auto value) {
        out += "SCALARS ";
        out += name;
        out += " double 1\nLOOKUP_TABLE default\n";
        for (int k = 0; k < g.nz; ++k)
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i) {
                    out += fmt(value(f.v[g.idx(i, j, k)]));
                    out += '\n';
                }
    };
    scalars("S", [](const QTensor& q) { return decompose_SR(q).S; });
    scalars("R", [](const QTensor& q) { return decompose_SR(q).R; });
    scalars("beta", [](const QTensor& q) { return biaxiality(q); });
    scalars("ftilde", [&](const QTensor& q) { return f_bulk_shifted(q, p); });
    scalars("qnorm", [](const QTensor& q) { return norm(q); });

    out += "VECTORS director double\n";
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                Vec3 ev = eigen(f.v[g.idx(i, j, k)]).vec[0];
                out += fmt(ev[0]);
                out += ' ';
                out += fmt(ev[1]);
                out += ' ';
                out += fmt(ev[2]);
                out += '\n';
            }
    write_text_file(path, out);
}

void export_field(const QField& f, const MaterialParams& p, const std::string& path,
                  const std::string& format) {
    if (format == "csv")
        export_field_csv(f, p, path);
    else if (format == "vtk-structured-points" || format == "vtk")
        export_field_vtk(f, p, path);
    else
        throw validation_error("unknown export format: " + format);
}

namespace {

nlohmann::json provenance_block(const RunConfig& cfg) {
    return {{"config_hash", config_hash(cfg)},
            {"version", kVersion},
            {"config", serialize_config(cfg)}};
}

nlohmann::json record_to_json(const ConvergenceRecord& r) {
    return {{"L", r.L},
            {"energy", r.energy},
            {"elastic", r.elastic},
            {"bulk_integral", r.bulk_integral},
            {"q0_energy", r.q0_energy},
            {"w12_dist_to_Q0", r.w12_dist_to_Q0},
            {"sup_K_dist", r.sup_K_dist},
            {"sup_K_bulk", r.sup_K_bulk},
            {"sup_boundary_collar_bulk", r.sup_boundary_collar_bulk},
            {"max_beta_K", r.max_beta_K},
            {"max_eig_err_sq_K", r.max_eig_err_sq_K},
            {"max_qnorm_dev_K", r.max_qnorm_dev_K},
            {"omega_star_measure", r.omega_star_measure},
            {"omega_lambda_measure", r.omega_lambda_measure},
            {"boundary_normal_deriv_sq", r.boundary_normal_deriv_sq},
            {"monotonicity_violation", r.monotonicity_violation},
            {"boundary_mono_slope", r.boundary_mono_slope},
            {"max_q_norm", r.max_q_norm},
            {"solver_converged", r.solver_converged},
            {"iterations", r.iterations}};
}

double json_safe(double v) { return std::isfinite(v) ? v : 0.0; }

}  // namespace

std::string report_to_json(const ConvergenceReport& rep, const RunConfig& cfg) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["provenance"] = provenance_block(cfg);
    j["scenario"] = scenario_name(rep.config.scenario);
    j["reference_energy"] = rep.reference_energy;
    j["director_converged"] = rep.director_converged;
    j["complete"] = rep.complete;
    j["compact_set_size"] = rep.compact_set_size;
    j["slopes_valid"] = rep.slopes_valid;
    j["slope_sup_K_bulk"] = json_safe(rep.slope_sup_K_bulk);
    j["slope_max_beta_K"] = json_safe(rep.slope_max_beta_K);
    j["slope_max_eig_err_sq_K"] = json_safe(rep.slope_max_eig_err_sq_K);
    j["slope_qnorm_dev"] = json_safe(rep.slope_qnorm_dev);
    j["sup_K_bulk_monotone"] = rep.sup_K_bulk_monotone;
    j["sup_K_dist_monotone"] = rep.sup_K_dist_monotone;
    j["w12_monotone"] = rep.w12_monotone;
    j["records"] = nlohmann::json::array();
    for (const auto& r : rep.records) j["records"].push_back(record_to_json(r));
    return j.dump(2) + "\n";
}

std::string solve_report_to_json(const SolveReport& rep, const RunConfig& cfg) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["provenance"] = provenance_block(cfg);
    j["iterations"] = rep.iterations;
    j["final_energy"] = rep.final_energy;
    j["final_residual"] = rep.final_residual;
    j["converged"] = rep.converged;
    j["max_q_norm"] = rep.max_q_norm;
    j["energy_trace"] = nlohmann::json::array();
    for (const auto& [it, e] : rep.energy_trace)
        j["energy_trace"].push_back({{"iter", it}, {"energy", e}});
    return j.dump(2) + "\n";
}

}  // namespace ldg
