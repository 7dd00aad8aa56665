#pragma once

#include "symtwirl/optimal_measurement.hpp"
#include "symtwirl/qfi_engine.hpp"
#include "symtwirl/sampling_simulator.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace symtwirl {

using Json = nlohmann::json;

// ============================================================================
// Matrices
// ============================================================================

/// {"dim": d, "entries": [[re, im], ...]} row-major.
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

// ============================================================================
// Named specs
// ============================================================================

/// "dicke:4:2", "ghz:3", "mixed:4" (maximally mixed) or an inline matrix.
DensityMatrix parse_state(const Json& spec);

/// {"kind":"symmetric","n":4} | {"kind":"generated","generators":[m...],
/// "max_order":N} | {"kind":"explicit","elements":[m...]}.
GroupRepresentation parse_group(const Json& spec);

/// {"kind":"dephasing","p":0.5,"qubits":4} | {"kind":"depolarizing",
/// "lambda":0.2,"dim":2,"qubits":1} | {"kind":"kraus","matrices":[m...]} |
/// {"kind":"tensor","factors":[spec...]}.
NoiseModelSpec parse_noise(const Json& spec);

/// "pauli:zzII", "random:16:7" (dim:seed) or an inline matrix.
HermitianOperator parse_observable(const Json& spec);

// ============================================================================
// Experiment configuration
// ============================================================================

struct PGrid {
    double min = 0.01;
    double max = 0.99;
    int points = 20;

    std::vector<double> values() const;
};

struct ExperimentConfig {
    Json raw;  // echoed into the metadata sidecar

    Json state;
    Json group;
    Json channel;
    Json observable;          // optional for sweep commands
    std::optional<PGrid> p_grid;
    std::optional<double> p_override;
    std::uint64_t seed = 0;
    std::string out_dir = ".";
    sdp::Options solver;
};

ExperimentConfig parse_config(const Json& j);
ExperimentConfig load_config(const std::string& path);

// ============================================================================
// Reports
// ============================================================================

Json diagnostics_to_json(const DiagnosticReport& rep);
Json measurement_to_json(const OptimalMeasurement& m);
Json estimator_to_json(const EstimatorReport& rep);
Json comparison_to_json(const ComparisonReport& rep);

/// Self-describing SDP problem dump, including the canonical triple
/// (Phi, A, B): A and B as explicit 2d x 2d blocks and Phi by its action
/// (identity on the (1,1) block; the transfer matrix of -E*^{-1} Q on the
/// (2,2) block).
Json sdp_export_json(const EstimationContext& ctx, const SdpInstance& inst);

// ============================================================================
// File output
// ============================================================================

void write_text_file(const std::string& path, const std::string& content);
void write_json_file(const std::string& path, const Json& j);

/// Metadata sidecar recording (config, seed, toolkit version, rng version,
/// command) so every CSV row is reproducible bit-identically.
Json metadata_sidecar(const ExperimentConfig& config, const std::string& command);

/// Full-precision (%.17g) formatting used in CSV output.
std::string format_double(double v);

}  // namespace symtwirl
