#include "affine/json_io.hpp"

#include <fstream>
#include <sstream>

namespace affine {

namespace {

[[noreturn]] void bad(const std::string& what) { throw std::invalid_argument("json: " + what); }

double num(const Json& j, const char* field) {
    if (!j.contains(field) || !j[field].is_number()) bad(std::string("missing number '") + field + "'");
    return j[field].get<double>();
}

}  // namespace

Json to_json(const SymMat& x) {
    Json j;
    j["dim"] = x.dim();
    j["upper"] = x.packed();
    return j;
}

SymMat symmat_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("dim") || !j.contains("upper")) bad("SymMat needs {dim, upper}");
    const int d = j["dim"].get<int>();
    if (d < 0) bad("SymMat dim must be nonnegative");
    SymMat x(d);
    const auto& u = j["upper"];
    if (!u.is_array() || u.size() != x.packed_size()) bad("SymMat upper has wrong length");
    for (size_t i = 0; i < x.packed_size(); ++i) x.packed()[i] = u[i].get<double>();
    if (!x.all_finite()) bad("SymMat entries must be finite");
    return x;
}

Json to_json(const ScalarAtomMeasure& m) {
    Json atoms = Json::array();
    for (const ScalarAtom& a : m.atoms()) {
        Json ja;
        ja["xi"] = to_json(a.xi);
        ja["w"] = a.weight;
        atoms.push_back(std::move(ja));
    }
    Json j;
    j["scalar_atoms"] = std::move(atoms);
    return j;
}

ScalarAtomMeasure scalar_measure_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("scalar_atoms")) bad("measure needs 'scalar_atoms'");
    std::vector<ScalarAtom> atoms;
    for (const Json& ja : j["scalar_atoms"])
        atoms.push_back({symmat_from_json(ja.at("xi")), num(ja, "w")});
    return ScalarAtomMeasure(std::move(atoms));
}

Json to_json(const MatrixAtomMeasure& mu) {
    Json atoms = Json::array();
    for (const MatrixAtom& a : mu.atoms()) {
        Json ja;
        ja["xi"] = to_json(a.xi);
        ja["W"] = to_json(a.weight);
        atoms.push_back(std::move(ja));
    }
    Json j;
    j["matrix_atoms"] = std::move(atoms);
    return j;
}

MatrixAtomMeasure matrix_measure_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("matrix_atoms")) bad("measure needs 'matrix_atoms'");
    std::vector<MatrixAtom> atoms;
    for (const Json& ja : j["matrix_atoms"])
        atoms.push_back({symmat_from_json(ja.at("xi")), symmat_from_json(ja.at("W"))});
    return MatrixAtomMeasure(std::move(atoms));
}

Json to_json(const AffineParams& p) {
    Json j;
    j["schema"] = "affine-psd/1";
    j["dim"] = p.dim;
    j["alpha"] = to_json(p.alpha);
    j["b"] = to_json(p.b);
    Json beta = Json::array();
    for (int i = 0; i < p.dim; ++i)
        for (int jj = i; jj < p.dim; ++jj)
            beta.push_back(Json::array({i + 1, jj + 1, to_json(p.drift.beta(i, jj))}));
    j["beta"] = std::move(beta);
    j["c"] = p.c;
    j["gamma"] = to_json(p.gamma);
    j["m"] = to_json(p.m);
    j["mu"] = to_json(p.mu);
    return j;
}

AffineParams params_from_json(const Json& j) {
    if (!j.is_object()) bad("parameter set must be an object");
    AffineParams p;
    p.dim = j.at("dim").get<int>();
    if (p.dim < 1) bad("dim must be positive");
    p.alpha = symmat_from_json(j.at("alpha"));
    p.b = symmat_from_json(j.at("b"));
    p.c = num(j, "c");
    p.gamma = symmat_from_json(j.at("gamma"));
    p.drift = LinearDrift::zero(p.dim);
    if (j.contains("beta")) {
        for (const Json& entry : j["beta"]) {
            if (!entry.is_array() || entry.size() != 3) bad("beta entries are [i, j, SymMat]");
            const int bi = entry[0].get<int>(), bj = entry[1].get<int>();
            if (bi < 1 || bj < 1 || bi > p.dim || bj > p.dim) bad("beta index out of range");
            p.drift.set_beta(bi - 1, bj - 1, symmat_from_json(entry[2]));
        }
    }
    if (j.contains("m")) p.m = scalar_measure_from_json(j["m"]);
    if (j.contains("mu")) p.mu = matrix_measure_from_json(j["mu"]);
    if (p.alpha.dim() != p.dim || p.b.dim() != p.dim || p.gamma.dim() != p.dim)
        bad("field dimensions disagree with dim");
    if (!p.m.empty() && p.m.dim() != p.dim) bad("m dimension mismatch");
    if (!p.mu.empty() && p.mu.dim() != p.dim) bad("mu dimension mismatch");
    return p;
}

Json to_json(const ValidationReport& r) {
    Json conds = Json::array();
    for (const ConditionReport& c : r.conditions) {
        Json jc;
        jc["id"] = c.id;
        jc["what"] = c.what;
        jc["pass"] = c.pass;
        jc["slack"] = c.slack;
        if (!c.note.empty()) jc["note"] = c.note;
        conds.push_back(std::move(jc));
    }
    Json j;
    j["schema"] = "affine-psd/1";
    j["conditions"] = std::move(conds);
    j["worst_drift_slack"] = r.worst_drift_slack;
    j["pass"] = r.pass;
    return j;
}

Json to_json(const CompareReport& r) {
    Json entries = Json::array();
    for (const CompareEntry& e : r.entries) {
        Json je;
        je["t"] = e.t;
        je["u"] = to_json(e.u);
        je["mc_estimate"] = e.mc;
        je["mc_stderr"] = e.mc_stderr;
        je["riccati_value"] = e.riccati;
        if (e.closed_form) je["closed_form_value"] = *e.closed_form;
        je["z_score"] = e.z_score;
        je["pass"] = e.pass;
        entries.push_back(std::move(je));
    }
    Json table = Json::array();
    for (const ConvergenceRow& row : r.convergence) {
        Json jr;
        jr["dt"] = row.dt;
        jr["abs_err"] = row.abs_err;
        jr["bias_budget"] = row.bias_budget;
        jr["clamp_mass"] = row.clamp_mass;
        table.push_back(std::move(jr));
    }
    Json j;
    j["schema"] = "affine-psd/1";
    j["entries"] = std::move(entries);
    j["convergence"] = std::move(table);
    j["pass"] = r.pass;
    return j;
}

Json to_json(const AuditReport& r) {
    Json j;
    j["schema"] = "affine-psd/1";
    j["jump_support"] = {{"pass", r.jump_support_pass}, {"worst_slack", r.worst_jump_support}};
    j["sigma_tangential"] = {{"pass", r.sigma_normal_pass}, {"worst_defect", r.worst_sigma_normal}};
    j["inward_drift"] = {{"pass", r.drift_pass}, {"worst_slack", r.worst_drift_slack}};
    j["pass"] = r.pass;
    return j;
}

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    Json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("malformed JSON in " + path + ": " + e.what());
    }
    return j;
}

void save_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

AffineParams load_params_file(const std::string& path) {
    try {
        return params_from_json(load_json_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("bad parameter file " + path + ": " + e.what());
    }
}

SymMat load_symmat_file(const std::string& path) {
    try {
        return symmat_from_json(load_json_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("bad matrix file " + path + ": " + e.what());
    }
}

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open " + path);
    uint64_t h = 14695981039346656037ull;
    char c;
    while (in.get(c)) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

}  // namespace affine
