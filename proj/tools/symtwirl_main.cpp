// symtwirl command-line front end: computes optimal measurement observables
// for symmetric states under invertible noise and reproduces the variance
// comparison experiments as CSV/JSON pipelines.

#include "symtwirl/parallel.hpp"
#include "symtwirl/rng.hpp"
#include "symtwirl/serialization.hpp"
#include "symtwirl/version.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace symtwirl;

namespace {

struct RunInputs {
    GroupRepresentation group;
    DensityMatrix rho;
    NoiseModelSpec noise;
    ExperimentConfig config;
};

RunInputs resolve_inputs(const ExperimentConfig& cfg) {
    if (cfg.group.is_null()) throw std::invalid_argument("config: missing 'group'");
    if (cfg.state.is_null()) throw std::invalid_argument("config: missing 'state'");
    if (cfg.channel.is_null()) throw std::invalid_argument("config: missing 'channel'");
    RunInputs in{parse_group(cfg.group), parse_state(cfg.state), parse_noise(cfg.channel), cfg};
    if (cfg.p_override) {
        if (in.noise.kind != NoiseModelSpec::Kind::Dephasing &&
            in.noise.kind != NoiseModelSpec::Kind::Depolarizing) {
            throw std::invalid_argument("--p override requires a dephasing/depolarizing channel");
        }
        in.noise.strength = *cfg.p_override;
    }
    return in;
}

NoiseModelSpec with_strength(NoiseModelSpec spec, double p) {
    spec.strength = p;
    return spec;
}

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
    fs::create_directories(cfg.out_dir);
    return (fs::path(cfg.out_dir) / name).string();
}

void write_sidecar(const ExperimentConfig& cfg, const std::string& csv_name,
                   const std::string& command) {
    write_json_file(out_path(cfg, csv_name + ".meta.json"), metadata_sidecar(cfg, command));
}

/// Ratio of the optimal to the customary quantum uncertainty for one
/// observable. Observables that the twirl leaves fixed give ratio 1 exactly
/// (the two measurement plans coincide).
struct RatioRecord {
    double var_opt = 0.0;
    double var_cust = 0.0;
    double ratio = 1.0;
};

RatioRecord ratio_for_observable(const GroupRepresentation& g, const QuantumChannel& e,
                                 const DensityMatrix& omega, const HermitianOperator& x) {
    const Matrix px = twirl_raw(g, x.mat());
    RatioRecord rec;
    if ((px - x.mat()).norm() <= 1e-12 * std::max(1.0, x.frobenius_norm())) {
        const HermitianOperator y = e.inverse_dual_apply(x);
        rec.var_opt = rec.var_cust = variance(omega, y);
        rec.ratio = 1.0;
        return rec;
    }
    const HermitianOperator y_opt = e.inverse_dual_apply(HermitianOperator(px));
    const HermitianOperator y_cust = e.inverse_dual_apply(x);
    rec.var_opt = variance(omega, y_opt);
    rec.var_cust = variance(omega, y_cust);
    rec.ratio = rec.var_cust > 0.0 ? rec.var_opt / rec.var_cust
                                   : std::numeric_limits<double>::quiet_NaN();
    return rec;
}

/// SDP route for the same record, used by --force-sdp cross-validation runs.
RatioRecord ratio_for_observable_sdp(const SymmetricStateFamily& family, const QuantumChannel& e,
                                     const HermitianOperator& x, const sdp::Options& options) {
    const EstimationContext ctx = build_context(family, e, x);
    const OptimalMeasurement opt = optimal_observable(ctx, /*force_sdp=*/true, options);
    const HermitianOperator y_cust = customary_observable(e, x);
    RatioRecord rec;
    rec.var_opt = opt.predicted_variance;
    rec.var_cust = variance(ctx.omega, y_cust);
    rec.ratio = rec.var_cust > 0.0 ? rec.var_opt / rec.var_cust
                                   : std::numeric_limits<double>::quiet_NaN();
    return rec;
}

// ----------------------------------------------------------------------------
// Minimal SVG emission for quick-look charts of the CSV data.
// ----------------------------------------------------------------------------

std::string svg_line_chart(const std::vector<std::pair<double, double>>& series,
                           const std::string& x_label, const std::string& y_label) {
    const int w = 640, h = 400, margin = 50;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& [x, y] : series) {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
    }
    if (xmax <= xmin) xmax = xmin + 1;
    if (ymax <= ymin) ymax = ymin + 1;
    auto sx = [&](double x) { return margin + (x - xmin) / (xmax - xmin) * (w - 2 * margin); };
    auto sy = [&](double y) { return h - margin - (y - ymin) / (ymax - ymin) * (h - 2 * margin); };

    std::ostringstream os;
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h << "'>\n";
    os << "<rect width='100%' height='100%' fill='white'/>\n";
    os << "<line x1='" << margin << "' y1='" << h - margin << "' x2='" << w - margin << "' y2='"
       << h - margin << "' stroke='black'/>\n";
    os << "<line x1='" << margin << "' y1='" << margin << "' x2='" << margin << "' y2='"
       << h - margin << "' stroke='black'/>\n";
    os << "<polyline fill='none' stroke='steelblue' stroke-width='2' points='";
    for (const auto& [x, y] : series) os << sx(x) << "," << sy(y) << " ";
    os << "'/>\n";
    os << "<text x='" << w / 2 << "' y='" << h - 10 << "' text-anchor='middle'>" << x_label
       << "</text>\n";
    os << "<text x='15' y='" << h / 2 << "' transform='rotate(-90 15 " << h / 2
       << ")' text-anchor='middle'>" << y_label << "</text>\n";
    os << "</svg>\n";
    return os.str();
}

// ----------------------------------------------------------------------------
// Subcommands
// ----------------------------------------------------------------------------

int cmd_optimal(const ExperimentConfig& cfg, bool force_sdp) {
    RunInputs in = resolve_inputs(cfg);
    if (in.config.observable.is_null()) {
        throw std::invalid_argument("optimal: config must name an 'observable'");
    }
    const QuantumChannel channel = make_channel(in.noise);
    if (!channel.invertible()) {
        std::cerr << "error: the configured channel has a singular transfer matrix; "
                     "information lost to it cannot be retrieved (choose an invertible noise "
                     "model)\n";
        return 2;
    }
    const HermitianOperator x = parse_observable(in.config.observable);
    const SymmetricStateFamily family(in.group, in.rho);
    const EstimationContext ctx = build_context(family, channel, x);

    const OptimalMeasurement opt = optimal_observable(ctx, force_sdp, cfg.solver);
    Json result = measurement_to_json(opt);
    result["xbar"] = ctx.xbar;
    write_json_file(out_path(cfg, "optimal.json"), result);
    write_json_file(out_path(cfg, "diagnostics.json"), diagnostics_to_json(diagnostics(ctx)));
    write_sidecar(cfg, "optimal.json", "optimal");
    std::cout << "path=" << opt.path << " variance=" << format_double(opt.predicted_variance)
              << " xbar=" << format_double(ctx.xbar) << "\n";
    return 0;
}

int cmd_pauli_sweep(const ExperimentConfig& cfg, bool force_sdp, bool emit_svg) {
    RunInputs in = resolve_inputs(cfg);
    const QuantumChannel channel = make_channel(in.noise);
    const DensityMatrix omega = channel.apply(in.rho);

    int qubits = 0;
    while ((Eigen::Index(1) << qubits) < in.rho.dim()) ++qubits;
    const std::vector<Pauli> letters = {Pauli::X, Pauli::Y, Pauli::Z, Pauli::I};
    const std::size_t count = static_cast<std::size_t>(1) << (2 * qubits);

    std::optional<SymmetricStateFamily> family;
    if (force_sdp) family.emplace(in.group, in.rho);

    std::vector<RatioRecord> records(count);
    std::vector<std::string> labels(count);
    parallel_for(count, [&](std::size_t idx) {
        std::vector<Pauli> tuple(static_cast<std::size_t>(qubits));
        std::size_t rem = idx;
        for (int q = qubits - 1; q >= 0; --q) {
            tuple[static_cast<std::size_t>(q)] = letters[rem % 4];
            rem /= 4;
        }
        const HermitianOperator x = pauli_observable(tuple);
        records[idx] = force_sdp
                           ? ratio_for_observable_sdp(*family, channel, x, cfg.solver)
                           : ratio_for_observable(in.group, channel, omega, x);
        labels[idx] = pauli_to_string(tuple);
    });

    std::ostringstream csv;
    csv << "k1,k2,k3,k4,var_opt,var_cust,ratio\n";
    for (std::size_t idx = 0; idx < count; ++idx) {
        const std::string& s = labels[idx];
        for (int q = 0; q < qubits; ++q) csv << s[static_cast<std::size_t>(q)] << ",";
        for (int q = qubits; q < 4; ++q) csv << ",";  // keep the 4-qubit header shape
        csv << format_double(records[idx].var_opt) << "," << format_double(records[idx].var_cust)
            << "," << format_double(records[idx].ratio) << "\n";
    }
    const std::string path = out_path(cfg, "pauli_sweep.csv");
    write_text_file(path, csv.str());
    write_sidecar(cfg, "pauli_sweep.csv", "pauli-sweep");

    if (emit_svg) {
        std::vector<std::pair<double, double>> series;
        for (std::size_t i = 0; i < count; ++i) {
            series.emplace_back(static_cast<double>(i), records[i].ratio);
        }
        write_text_file(out_path(cfg, "pauli_sweep.svg"),
                        svg_line_chart(series, "observable index", "ratio"));
    }

    double max_nontrivial = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        if (records[i].ratio < 1.0 - 1e-9) max_nontrivial = std::max(max_nontrivial,
                                                                     records[i].ratio);
    }
    std::cout << "rows=" << count << " max_nontrivial_ratio=" << format_double(max_nontrivial)
              << " -> " << path << "\n";
    return 0;
}

int cmd_random_sweep(const ExperimentConfig& cfg, bool emit_svg) {
    RunInputs in = resolve_inputs(cfg);
    const QuantumChannel channel = make_channel(in.noise);
    const DensityMatrix omega = channel.apply(in.rho);
    const Eigen::Index d = in.rho.dim();

    const std::size_t count = 256;
    std::vector<RatioRecord> records(count);
    parallel_for(count, [&](std::size_t idx) {
        const HermitianOperator x = random_observable(d, Rng::derive_stream(cfg.seed, idx));
        records[idx] = ratio_for_observable(in.group, channel, omega, x);
    });

    std::ostringstream csv;
    csv << "k,l,var_opt,var_cust,ratio\n";
    double lo = 1e300, hi = 0.0, sum = 0.0;
    for (std::size_t idx = 0; idx < count; ++idx) {
        csv << (idx / 16 + 1) << "," << (idx % 16 + 1) << ","
            << format_double(records[idx].var_opt) << "," << format_double(records[idx].var_cust)
            << "," << format_double(records[idx].ratio) << "\n";
        lo = std::min(lo, records[idx].ratio);
        hi = std::max(hi, records[idx].ratio);
        sum += records[idx].ratio;
    }
    const std::string path = out_path(cfg, "random_sweep.csv");
    write_text_file(path, csv.str());
    write_sidecar(cfg, "random_sweep.csv", "random-sweep");

    if (emit_svg) {
        std::vector<std::pair<double, double>> series;
        for (std::size_t i = 0; i < count; ++i) {
            series.emplace_back(static_cast<double>(i), records[i].ratio);
        }
        write_text_file(out_path(cfg, "random_sweep.svg"),
                        svg_line_chart(series, "observable index", "ratio"));
    }
    std::cout << "rows=" << count << " ratio_band=[" << format_double(lo) << ","
              << format_double(hi) << "] mean=" << format_double(sum / count) << " -> " << path
              << "\n";
    return 0;
}

int cmd_p_sweep(const ExperimentConfig& cfg, bool emit_svg) {
    RunInputs in = resolve_inputs(cfg);
    const HermitianOperator x = in.config.observable.is_null()
                                    ? pauli_observable("yyzz")
                                    : parse_observable(in.config.observable);
    const PGrid grid = cfg.p_grid.value_or(PGrid{0.01, 0.99, 20});
    const std::vector<double> ps = grid.values();

    std::vector<RatioRecord> records(ps.size());
    parallel_for(ps.size(), [&](std::size_t i) {
        const QuantumChannel channel = make_channel(with_strength(in.noise, ps[i]));
        const DensityMatrix omega = channel.apply(in.rho);
        records[i] = ratio_for_observable(in.group, channel, omega, x);
    });

    std::ostringstream csv;
    csv << "p,ratio\n";
    std::vector<std::pair<double, double>> series;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        csv << format_double(ps[i]) << "," << format_double(records[i].ratio) << "\n";
        series.emplace_back(ps[i], records[i].ratio);
    }
    const std::string path = out_path(cfg, "p_sweep.csv");
    write_text_file(path, csv.str());
    write_sidecar(cfg, "p_sweep.csv", "p-sweep");
    if (emit_svg) {
        write_text_file(out_path(cfg, "p_sweep.svg"), svg_line_chart(series, "p", "ratio"));
    }
    std::cout << "rows=" << ps.size() << " -> " << path << "\n";
    return 0;
}

int cmd_direct_compare(const ExperimentConfig& cfg, bool emit_svg) {
    RunInputs in = resolve_inputs(cfg);
    const HermitianOperator x = in.config.observable.is_null()
                                    ? pauli_observable("yyzz")
                                    : parse_observable(in.config.observable);
    const PGrid grid = cfg.p_grid.value_or(PGrid{0.01, 0.1, 10});
    const std::vector<double> ps = grid.values();
    const double xbar = trace_product_real(in.rho.mat(), x.mat());

    struct Row {
        double var_opt, var_direct, bias;
    };
    std::vector<Row> rows(ps.size());
    parallel_for(ps.size(), [&](std::size_t i) {
        const QuantumChannel channel = make_channel(with_strength(in.noise, ps[i]));
        const DensityMatrix omega = channel.apply(in.rho);
        const Matrix px = twirl_raw(in.group, x.mat());
        const HermitianOperator y_opt = channel.inverse_dual_apply(HermitianOperator(px));
        rows[i].var_opt = variance(omega, y_opt);
        rows[i].var_direct = variance(omega, x);
        rows[i].bias = trace_product_real(omega.mat(), x.mat()) - xbar;
    });

    std::ostringstream csv;
    csv << "p,var_opt,var_direct,bias_direct\n";
    std::vector<std::pair<double, double>> series;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        csv << format_double(ps[i]) << "," << format_double(rows[i].var_opt) << ","
            << format_double(rows[i].var_direct) << "," << format_double(rows[i].bias) << "\n";
        series.emplace_back(ps[i], rows[i].var_opt);
    }
    const std::string path = out_path(cfg, "direct_compare.csv");
    write_text_file(path, csv.str());
    write_sidecar(cfg, "direct_compare.csv", "direct-compare");
    if (emit_svg) {
        write_text_file(out_path(cfg, "direct_compare.svg"),
                        svg_line_chart(series, "p", "var_opt"));
    }
    std::cout << "rows=" << ps.size() << " -> " << path << "\n";
    return 0;
}

int cmd_validate(const ExperimentConfig& cfg) {
    RunInputs in = resolve_inputs(cfg);
    const QuantumChannel channel = make_channel(in.noise);
    int failures = 0;
    auto check = [&](const std::string& name, bool ok, const std::string& detail = "") {
        std::cout << (ok ? "[ok]   " : "[FAIL] ") << name;
        if (!detail.empty()) std::cout << " (" << detail << ")";
        std::cout << "\n";
        if (!ok) ++failures;
    };

    check("channel invertible", channel.invertible(),
          "condition " + format_double(channel.transfer_condition()));
    check("state symmetric under G", is_symmetric(in.group, in.rho));
    const bool covariant = is_covariant(channel, in.group);
    std::cout << "[info] channel covariant under G: " << (covariant ? "yes" : "no") << "\n";

    if (channel.invertible()) {
        const SymmetricStateFamily family(in.group, in.rho);
        const HermitianOperator x = in.config.observable.is_null()
                                        ? random_observable(in.rho.dim(), cfg.seed + 1)
                                        : parse_observable(in.config.observable);
        const EstimationContext ctx = build_context(family, channel, x);

        double max_unbias = 0.0;
        for (int k = 0; k < 100; ++k) {
            const HermitianOperator h =
                random_observable(ctx.dim(), Rng::derive_stream(cfg.seed, 1000 + k));
            const Matrix y = channel.inverse_dual_apply_raw(
                x.mat() - ctx.family.projector().q_project(h.mat()));
            max_unbias = std::max(
                max_unbias,
                std::abs(trace_product_real(ctx.omega.mat(), y) - ctx.xbar));
        }
        check("unbiasedness of Y_h over 100 random h", max_unbias <= 1e-8,
              "max residual " + format_double(max_unbias));

        const DiagnosticReport rep = diagnostics(ctx);
        check("influence operator zero-mean", rep.delta_zero_mean <= 1e-9,
              format_double(rep.delta_zero_mean));
        write_json_file(out_path(cfg, "validate.json"), diagnostics_to_json(rep));
        std::cout << "[info] oracle 1/J = " << format_double(rep.oracle_value)
                  << " support rank " << rep.support_rank << "\n";
    }
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"symtwirl: optimal information retrieval from corrupted symmetric states"};
    app.set_version_flag("--version", std::string(kVersion));

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    double p_value = -1.0;
    bool force_sdp = false;
    bool emit_svg = false;

    app.add_option("--config", config_path, "JSON experiment configuration")->required();
    app.add_option("--out", out_dir, "output directory (overrides config)");
    app.add_option("--seed", seed, "seed (overrides config)");
    app.add_option("--p", p_value, "noise strength override");
    app.add_flag("--force-sdp", force_sdp, "solve the SDP even for covariant channels");
    app.add_flag("--svg", emit_svg, "emit quick-look SVG charts next to the CSV");

    auto* sub_optimal = app.add_subcommand("optimal", "optimal observable for one context");
    auto* sub_pauli = app.add_subcommand("pauli-sweep", "ratio per Pauli observable");
    auto* sub_random = app.add_subcommand("random-sweep", "ratio per random observable");
    auto* sub_psweep = app.add_subcommand("p-sweep", "ratio vs noise strength");
    auto* sub_direct = app.add_subcommand("direct-compare", "optimal vs direct measurement");
    auto* sub_validate = app.add_subcommand("validate", "internal consistency checks");
    app.require_subcommand(1);

    CLI11_PARSE(app, argc, argv);

    try {
        ExperimentConfig cfg = load_config(config_path);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (app.count("--seed") > 0) cfg.seed = seed;
        if (app.count("--p") > 0) cfg.p_override = p_value;

        if (sub_optimal->parsed()) return cmd_optimal(cfg, force_sdp);
        if (sub_pauli->parsed()) return cmd_pauli_sweep(cfg, force_sdp, emit_svg);
        if (sub_random->parsed()) return cmd_random_sweep(cfg, emit_svg);
        if (sub_psweep->parsed()) return cmd_p_sweep(cfg, emit_svg);
        if (sub_direct->parsed()) return cmd_direct_compare(cfg, emit_svg);
        if (sub_validate->parsed()) return cmd_validate(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
