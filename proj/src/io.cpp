#include "carfin/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace carfin {

namespace {

using nlohmann::json;

json parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(path + ": JSON parse error: " + e.what());
    }
    return j;
}

}  // namespace

State load_state(const std::string& path, double tol) {
    json j = parse_file(path);
    if (!j.contains("n_modes") || !j["n_modes"].is_number_integer())
        throw std::invalid_argument(path + ": missing integer field 'n_modes'");
    if (!j.contains("density") || !j["density"].is_array())
        throw std::invalid_argument(path + ": missing array field 'density'");
    State phi;
    phi.n = j["n_modes"].get<int>();
    if (phi.n < 1 || phi.n > kMaxModes)
        throw std::invalid_argument(path + ": n_modes outside 1.." + std::to_string(kMaxModes));
    Eigen::Index d = pow2(phi.n);
    const auto& rows = j["density"];
    if (Eigen::Index(rows.size()) != d)
        throw std::invalid_argument(path + ": density must have 2^n rows");
    phi.density = Mat(d, d);
    for (Eigen::Index r = 0; r < d; ++r) {
        const auto& row = rows[std::size_t(r)];
        if (!row.is_array() || Eigen::Index(row.size()) != d)
            throw std::invalid_argument(path + ": density row " + std::to_string(r) +
                                        " must have 2^n entries");
        for (Eigen::Index c = 0; c < d; ++c) {
            const auto& ent = row[std::size_t(c)];
            if (!ent.is_array() || ent.size() != 2 || !ent[0].is_number() || !ent[1].is_number())
                throw std::invalid_argument(path + ": density entries must be [re, im] pairs");
            phi.density(r, c) = cx(ent[0].get<double>(), ent[1].get<double>());
        }
    }
    try {
        validate_state(phi, tol);
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
    return phi;
}

void save_state(const State& phi, const std::string& path) {
    json rows = json::array();
    Eigen::Index d = phi.density.rows();
    for (Eigen::Index r = 0; r < d; ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < d; ++c)
            row.push_back({phi.density(r, c).real(), phi.density(r, c).imag()});
        rows.push_back(std::move(row));
    }
    json j;
    j["n_modes"] = phi.n;
    j["density"] = std::move(rows);
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write " + path);
    out << j.dump(1) << "\n";
}

std::string format_decimal(double value) {
    if (value == 0.0) return "0.000000000000";
    int magnitude = int(std::floor(std::log10(std::abs(value))));
    // 12 decimals carries 12 significant digits down to 0.1; smaller values
    // need one extra decimal per leading zero
    int decimals = (magnitude < 0) ? 11 - magnitude : 12;
    decimals = std::min(decimals, 24);
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(decimals);
    os << value;
    return os.str();
}

MixingMeasure load_measure(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("mu,weight", 0) != 0)
        throw std::invalid_argument(path + ": expected header 'mu,weight'");
    MixingMeasure measure;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string mu_s, w_s;
        if (!std::getline(ls, mu_s, ',') || !std::getline(ls, w_s))
            throw std::invalid_argument(path + ": line " + std::to_string(lineno) +
                                        ": expected 'mu,weight'");
        try {
            measure.atoms.push_back({std::stod(mu_s), std::stod(w_s)});
        } catch (const std::exception&) {
            throw std::invalid_argument(path + ": line " + std::to_string(lineno) +
                                        ": malformed number");
        }
    }
    try {
        measure.validate();
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
    return measure;
}

void save_measure(const MixingMeasure& measure, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write " + path);
    out << "mu,weight\n";
    for (const auto& atom : measure.atoms)
        out << format_decimal(atom.mu) << "," << format_decimal(atom.weight) << "\n";
}

}  // namespace carfin
