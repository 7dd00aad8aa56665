#include "symtwirl/serialization.hpp"

#include "symtwirl/version.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace symtwirl {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

double json_number(const Json& j, const char* what) {
    if (!j.is_number()) throw std::invalid_argument(std::string(what) + ": expected a number");
    return j.get<double>();
}

}  // namespace

// ============================================================================
// Matrices
// ============================================================================

Json matrix_to_json(const Matrix& m) {
    Json entries = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            entries.push_back({m(i, j).real(), m(i, j).imag()});
        }
    }
    return Json{{"dim", m.rows()}, {"entries", entries}};
}

Matrix matrix_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("dim") || !j.contains("entries")) {
        throw std::invalid_argument("matrix_from_json: expected {dim, entries}");
    }
    const Eigen::Index d = j.at("dim").get<Eigen::Index>();
    const Json& entries = j.at("entries");
    if (!entries.is_array() || static_cast<Eigen::Index>(entries.size()) != d * d) {
        throw std::invalid_argument("matrix_from_json: entries must hold dim^2 [re, im] pairs");
    }
    Matrix m(d, d);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index jj = 0; jj < d; ++jj, ++k) {
            const Json& e = entries.at(static_cast<std::size_t>(k));
            if (!e.is_array() || e.size() != 2) {
                throw std::invalid_argument("matrix_from_json: entry is not an [re, im] pair");
            }
            m(i, jj) = Complex(e.at(0).get<double>(), e.at(1).get<double>());
        }
    }
    return m;
}

// ============================================================================
// Named specs
// ============================================================================

DensityMatrix parse_state(const Json& spec) {
    if (spec.is_object()) return DensityMatrix(matrix_from_json(spec));
    if (!spec.is_string()) throw std::invalid_argument("parse_state: expected string or matrix");
    const std::string s = spec.get<std::string>();
    const auto parts = split(s, ':');
    if (parts[0] == "dicke" && parts.size() == 3) {
        return dicke_state(std::stoi(parts[1]), std::stoi(parts[2]));
    }
    if (parts[0] == "ghz" && parts.size() == 2) {
        return ghz_state(std::stoi(parts[1]));
    }
    if (parts[0] == "mixed" && parts.size() == 2) {
        return DensityMatrix::maximally_mixed(std::stoll(parts[1]));
    }
    throw std::invalid_argument("parse_state: unknown state spec '" + s + "'");
}

GroupRepresentation parse_group(const Json& spec) {
    if (!spec.is_object() || !spec.contains("kind")) {
        throw std::invalid_argument("parse_group: expected {kind, ...}");
    }
    const std::string kind = spec.at("kind").get<std::string>();
    if (kind == "symmetric") {
        return GroupRepresentation::symmetric_qubits(spec.at("n").get<int>());
    }
    if (kind == "generated") {
        std::vector<Matrix> gens;
        for (const Json& g : spec.at("generators")) gens.push_back(matrix_from_json(g));
        const int max_order = spec.value("max_order", 1024);
        return GroupRepresentation::generate(gens, max_order);
    }
    if (kind == "explicit") {
        std::vector<Matrix> elements;
        for (const Json& e : spec.at("elements")) elements.push_back(matrix_from_json(e));
        return GroupRepresentation::from_elements(std::move(elements));
    }
    throw std::invalid_argument("parse_group: unknown kind '" + kind + "'");
}

NoiseModelSpec parse_noise(const Json& spec) {
    if (!spec.is_object() || !spec.contains("kind")) {
        throw std::invalid_argument("parse_noise: expected {kind, ...}");
    }
    const std::string kind = spec.at("kind").get<std::string>();
    NoiseModelSpec out;
    if (kind == "dephasing") {
        out.kind = NoiseModelSpec::Kind::Dephasing;
        out.strength = json_number(spec.at("p"), "parse_noise: p");
        out.qubits = spec.value("qubits", 1);
        if (out.strength < 0.0 || out.strength >= 1.0) {
            throw std::invalid_argument("parse_noise: dephasing p must be in [0, 1)");
        }
        return out;
    }
    if (kind == "depolarizing") {
        out.kind = NoiseModelSpec::Kind::Depolarizing;
        out.strength = json_number(spec.at("lambda"), "parse_noise: lambda");
        out.dim = spec.value("dim", 2);
        out.qubits = spec.value("qubits", 1);
        if (out.strength < 0.0 || out.strength >= 1.0) {
            throw std::invalid_argument("parse_noise: depolarizing lambda must be in [0, 1)");
        }
        return out;
    }
    if (kind == "kraus") {
        out.kind = NoiseModelSpec::Kind::Kraus;
        for (const Json& k : spec.at("matrices")) out.kraus.push_back(matrix_from_json(k));
        return out;
    }
    if (kind == "tensor") {
        out.kind = NoiseModelSpec::Kind::Tensor;
        for (const Json& f : spec.at("factors")) out.factors.push_back(parse_noise(f));
        return out;
    }
    throw std::invalid_argument("parse_noise: unknown kind '" + kind + "'");
}

HermitianOperator parse_observable(const Json& spec) {
    if (spec.is_object()) return HermitianOperator(matrix_from_json(spec));
    if (!spec.is_string()) {
        throw std::invalid_argument("parse_observable: expected string or matrix");
    }
    const std::string s = spec.get<std::string>();
    const auto parts = split(s, ':');
    if (parts[0] == "pauli" && parts.size() == 2) {
        return pauli_observable(parts[1]);
    }
    if (parts[0] == "random" && parts.size() == 3) {
        return random_observable(std::stoll(parts[1]),
                                 static_cast<std::uint64_t>(std::stoull(parts[2])));
    }
    throw std::invalid_argument("parse_observable: unknown observable spec '" + s + "'");
}

// ============================================================================
// Experiment configuration
// ============================================================================

std::vector<double> PGrid::values() const {
    std::vector<double> out;
    if (points < 1) return out;
    if (points == 1) {
        out.push_back(min);
        return out;
    }
    out.reserve(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        out.push_back(min + (max - min) * static_cast<double>(i) /
                                static_cast<double>(points - 1));
    }
    return out;
}

ExperimentConfig parse_config(const Json& j) {
    ExperimentConfig cfg;
    cfg.raw = j;
    if (j.contains("state")) cfg.state = j.at("state");
    if (j.contains("group")) cfg.group = j.at("group");
    if (j.contains("channel")) cfg.channel = j.at("channel");
    if (j.contains("observable")) cfg.observable = j.at("observable");
    if (j.contains("p_grid")) {
        PGrid grid;
        grid.min = j.at("p_grid").value("min", 0.01);
        grid.max = j.at("p_grid").value("max", 0.99);
        grid.points = j.at("p_grid").value("points", 20);
        if (grid.min < 0.0 || grid.max >= 1.0 || grid.min > grid.max) {
            throw std::invalid_argument("parse_config: p_grid must lie inside [0, 1)");
        }
        cfg.p_grid = grid;
    }
    if (j.contains("p")) cfg.p_override = json_number(j.at("p"), "parse_config: p");
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.out_dir = j.value("out", std::string("."));
    if (j.contains("solver")) {
        const Json& s = j.at("solver");
        cfg.solver.gap_abs = s.value("gap_abs", cfg.solver.gap_abs);
        cfg.solver.gap_rel = s.value("gap_rel", cfg.solver.gap_rel);
        cfg.solver.mu = s.value("mu", cfg.solver.mu);
        cfg.solver.max_newton = s.value("max_newton", cfg.solver.max_newton);
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_config: cannot open '" + path + "'");
    Json j;
    in >> j;
    return parse_config(j);
}

// ============================================================================
// Reports
// ============================================================================

namespace {

Json nan_safe(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}

}  // namespace

Json diagnostics_to_json(const DiagnosticReport& rep) {
    Json j{{"oracle_value", rep.oracle_value},
           {"sld_residuals", rep.sld_residuals},
           {"support_rank", rep.support_rank}};
    j["J"] = rep.j ? Json(*rep.j) : Json(nullptr);
    j["one_over_J"] = rep.one_over_j ? Json(*rep.one_over_j) : Json(nullptr);
    Json pairing = Json::array();
    for (double v : rep.delta_pairing) pairing.push_back(nan_safe(v));
    j["delta_checks"] = Json{{"zero_mean", rep.delta_zero_mean}, {"sld_pairing", pairing}};
    if (!rep.sld_failure.empty()) j["sld_failure"] = rep.sld_failure;
    return j;
}

Json measurement_to_json(const OptimalMeasurement& m) {
    Json outcomes = Json::array();
    for (std::size_t k = 0; k < m.measurement.eigenvalues.size(); ++k) {
        outcomes.push_back(m.measurement.eigenvalues[k]);
    }
    return Json{{"Y0", matrix_to_json(m.y0.mat())},
                {"outcomes", outcomes},
                {"variance", m.predicted_variance},
                {"value", m.achieved_value},
                {"path", m.path},
                {"unbiasedness_residual", m.unbiasedness_residual}};
}

Json estimator_to_json(const EstimatorReport& rep) {
    return Json{{"N", rep.samples},
                {"mean", rep.mean},
                {"variance", nan_safe(rep.variance)},
                {"stderr", nan_safe(rep.standard_error)},
                {"variance_defined", rep.variance_defined},
                {"target", rep.target},
                {"predicted_variance", rep.predicted_variance},
                {"mean_flagged", rep.mean_flagged}};
}

Json comparison_to_json(const ComparisonReport& rep) {
    auto strategy = [](const StrategyReport& s) {
        Json j = estimator_to_json(s.estimator);
        j["strategy"] = s.name;
        j["bias"] = s.bias;
        return j;
    };
    return Json{{"optimal", strategy(rep.optimal)},
                {"customary", strategy(rep.customary)},
                {"direct", strategy(rep.direct)},
                {"ratio_to_customary", nan_safe(rep.empirical_ratio)},
                {"predicted_ratio", nan_safe(rep.predicted_ratio)},
                {"sample_fraction", nan_safe(rep.sample_fraction)},
                {"optimal_path", rep.optimal_path}};
}

Json sdp_export_json(const EstimationContext& ctx, const SdpInstance& inst) {
    const Eigen::Index d = inst.dim;
    Json h_basis = Json::array();
    for (const Matrix& m : inst.h_basis) h_basis.push_back(matrix_to_json(m));
    Json c_dirs = Json::array();
    for (const Matrix& m : inst.c_dirs) c_dirs.push_back(matrix_to_json(m));

    // Canonical triple: Y = [[Lambda, .],[., h]], Phi(Y) = [[Y11, -E*^-1(Q(Y22))],
    // [-E*^-1(Q(Y22)), 0]], constraint Phi(Y) >= A.
    Matrix a_block(2 * d, 2 * d);
    a_block.setZero();
    a_block.topRightCorner(d, d) = -inst.delta;  // Xbar 1 - E*^{-1}(X)
    a_block.bottomLeftCorner(d, d) = -inst.delta;
    a_block.bottomRightCorner(d, d) = -Matrix::Identity(d, d);
    Matrix b_block(2 * d, 2 * d);
    b_block.setZero();
    b_block.topLeftCorner(d, d) = inst.omega.mat();

    // Transfer matrix of -E*^{-1} Q in the orthonormal Hermitian basis.
    const Eigen::MatrixXd& ap = ctx.family.projector().transfer();
    const Eigen::MatrixXd q_transfer =
        Eigen::MatrixXd::Identity(ap.rows(), ap.cols()) - ap;
    const Eigen::MatrixXd inv_dual =
        ctx.channel.transfer().transpose().partialPivLu().solve(q_transfer);
    Json phi_transfer = Json::array();
    for (Eigen::Index i = 0; i < inv_dual.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index jj = 0; jj < inv_dual.cols(); ++jj) row.push_back(-inv_dual(i, jj));
        phi_transfer.push_back(row);
    }

    return Json{
        {"dim", d},
        {"xbar", inst.xbar},
        {"objective", {{"weight", matrix_to_json(inst.omega.mat())},
                       {"description", "minimize tr(weight * Lambda)"}}},
        {"psd_blocks",
         Json::array({Json{{"description",
                            "[[Lambda, delta - sum_j h_j C_j], [delta - sum_j h_j C_j, 1]]"},
                           {"delta", matrix_to_json(inst.delta)},
                           {"c_dirs", c_dirs}}})},
        {"variable_basis",
         {{"lambda", "orthonormal Hermitian basis of the dimension"}, {"h", h_basis}}},
        {"canonical",
         {{"A", matrix_to_json(a_block)},
          {"B", matrix_to_json(b_block)},
          {"Phi",
           {{"block_11", "identity on Y11"},
            {"block_12_of_Y22", phi_transfer},
            {"basis", "orthonormal Hermitian basis of the dimension"}}}}}};
}

// ============================================================================
// File output
// ============================================================================

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_text_file: cannot open '" + path + "'");
    out << content;
}

void write_json_file(const std::string& path, const Json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

Json metadata_sidecar(const ExperimentConfig& config, const std::string& command) {
    return Json{{"tool", "symtwirl"},
                {"version", kVersion},
                {"rng", kRngVersion},
                {"command", command},
                {"seed", config.seed},
                {"config", config.raw}};
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace symtwirl
