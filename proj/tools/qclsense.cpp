// qclsense: command-line driver for the sensor simulator.
// Subcommands generate models, sweep response curves, train circuit
// parameters, and reproduce the three figure-level experiments. Every run
// writes a manifest recording argv, resolved settings, seeds, and content
// digests of all files touched, so any run can be repeated bit-for-bit.

#include "qclsense/analysis.hpp"
#include "qclsense/ansatz.hpp"
#include "qclsense/io.hpp"
#include "qclsense/sensing.hpp"
#include "qclsense/svg.hpp"
#include "qclsense/training.hpp"
#include "qclsense/version.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace qclsense;

// Path of the JSON settings file a run loaded, if any, so manifests can
// record it as an input.
std::string g_config_path;

std::string json_scalar(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

// A settings file is a flat JSON object keyed by long option names. Its
// entries become extra argv tokens spliced in right after the subcommand,
// skipping any option the command line already sets, so explicit flags win.
std::vector<std::string> expand_config_args(const std::vector<std::string>& args,
                                            CLI::App& app) {
    std::size_t sub_pos = 0;
    CLI::App* sub = nullptr;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (!args[i].empty() && args[i][0] != '-') {
            sub = app.get_subcommand_no_throw(args[i]);
            sub_pos = i;
            break;
        }
    }
    if (sub == nullptr) return args;

    std::string config_path;
    for (std::size_t i = sub_pos + 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
    }
    if (config_path.empty()) return args;

    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(config_path));
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(config_path + " is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument(config_path + ": config must be a JSON object");

    auto given_on_cli = [&](const CLI::Option* op) {
        for (std::size_t i = sub_pos + 1; i < args.size(); ++i) {
            for (const std::string& lname : op->get_lnames())
                if (args[i] == "--" + lname || args[i].rfind("--" + lname + "=", 0) == 0)
                    return true;
            for (const std::string& sname : op->get_snames())
                if (args[i].rfind("-" + sname, 0) == 0) return true;
        }
        return false;
    };

    std::vector<std::string> extra;
    for (const auto& [key, value] : j.items()) {
        if (key == "config") continue;
        std::string flag = "--" + key;
        CLI::Option* op = sub->get_option_no_throw(flag);
        if (op == nullptr) {
            std::string dashed = key;
            for (char& c : dashed) c = c == '_' ? '-' : c;
            flag = "--" + dashed;
            op = sub->get_option_no_throw(flag);
        }
        if (op == nullptr)
            throw std::invalid_argument(config_path + ": unknown option '" + key + "' for " +
                                        sub->get_name());
        if (given_on_cli(op)) continue;
        extra.push_back(flag);
        if (value.is_array())
            for (const auto& element : value) extra.push_back(json_scalar(element));
        else
            extra.push_back(json_scalar(value));
    }

    g_config_path = config_path;
    std::vector<std::string> merged(args.begin(), args.begin() + long(sub_pos) + 1);
    merged.insert(merged.end(), extra.begin(), extra.end());
    merged.insert(merged.end(), args.begin() + long(sub_pos) + 1, args.end());
    return merged;
}

struct GridSpec {
    double from = 0.0;
    double to = 0.0;
    double step = 0.0;
};

GridSpec parse_grid_spec(const std::string& text) {
    std::vector<std::string> parts;
    std::string part;
    std::istringstream in(text);
    while (std::getline(in, part, ':')) parts.push_back(part);
    if (parts.size() != 3)
        throw std::invalid_argument("grid must be from:to:step, got '" + text + "'");
    GridSpec g;
    try {
        g.from = parse_double(parts[0]);
        g.to = parse_double(parts[1]);
        g.step = parse_double(parts[2]);
    } catch (const std::exception&) {
        throw std::invalid_argument("grid must be numeric from:to:step, got '" + text + "'");
    }
    return g;
}

// Collects digests while a command runs and writes the manifest last.
class ManifestBuilder {
public:
    explicit ManifestBuilder(std::vector<std::string> argv)
        : start_(std::chrono::steady_clock::now()) {
        manifest_.command = std::move(argv);
        // couplings enter pair sums once per unordered pair (i < j)
        manifest_.set("pair_sum", "once");
        if (!g_config_path.empty()) {
            manifest_.set("config", g_config_path);
            add_input(g_config_path);
        }
    }

    RunManifest& manifest() { return manifest_; }

    void add_input(const std::string& path) { manifest_.inputs[path] = file_digest(path); }

    void add_output(const std::string& path) { manifest_.outputs[path] = file_digest(path); }

    void write(const std::string& path) {
        manifest_.timestamp = utc_timestamp();
        manifest_.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        write_manifest(path, manifest_);
    }

private:
    RunManifest manifest_;
    std::chrono::steady_clock::time_point start_;
};

std::string strip_suffix(const std::string& path, const std::string& suffix) {
    if (path.size() > suffix.size() && path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0)
        return path.substr(0, path.size() - suffix.size());
    return path;
}

std::string out_stem(const std::string& path) {
    std::string s = strip_suffix(path, ".json");
    return strip_suffix(s, ".csv");
}

std::string response_to_csv(const ResponseCurve& curve) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(std::size_t(curve.grid.size()));
    for (Eigen::Index k = 0; k < curve.grid.size(); ++k)
        rows.push_back({format_double(curve.grid(k)), format_double(curve.values(k))});
    return table_to_csv({"I", "expectation"}, rows);
}

std::string delta_to_csv(const DeltaIResult& result) {
    std::vector<std::vector<std::string>> rows;
    for (Eigen::Index k = 0; k < result.grid.size(); ++k)
        rows.push_back({format_double(result.grid(k)), format_double(result.delta_model(k)),
                        format_double(result.delta_theory(k)),
                        result.divergent[std::size_t(k)] ? "divergent" : "ok"});
    return table_to_csv({"I", "delta_model", "delta_theory", "flag"}, rows);
}

std::string log_to_csv(const std::vector<double>& history) {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < history.size(); ++i)
        rows.push_back({std::to_string(i), format_double(history[i])});
    return table_to_csv({"iteration", "cost"}, rows);
}

std::string range_to_json(const DynamicRangeResult& range, int violations, double grid_step,
                          double tie_tol) {
    std::ostringstream out;
    out << "{\n";
    out << "  \"I_lo\": " << format_double(range.I_lo) << ",\n";
    out << "  \"I_hi\": " << format_double(range.I_hi) << ",\n";
    out << "  \"violations\": " << violations << ",\n";
    out << "  \"grid_step\": " << format_double(grid_step) << ",\n";
    out << "  \"slope_tie_tol\": " << format_double(tie_tol) << "\n";
    out << "}\n";
    return out.str();
}

// ---------------------------------------------------------------------------

struct GenModelOpts {
    int L = 0;
    std::uint64_t seed = 0;
    double t_sense = 1.0;
    std::string out;
};

int run_gen_model(const GenModelOpts& o, const std::vector<std::string>& argv) {
    ManifestBuilder mb(argv);
    const SensingModel model = sample_model(o.L, o.seed, o.t_sense);
    write_model(o.out, model);
    mb.manifest().set("L", o.L);
    mb.manifest().set("seed", o.seed);
    mb.manifest().set("t_sense", o.t_sense);
    mb.manifest().set("out", o.out);
    mb.add_output(o.out);
    const std::string manifest_path = o.out + ".manifest.json";
    mb.write(manifest_path);
    std::cout << "wrote " << o.out << "\n" << manifest_path << "\n";
    return 0;
}

struct CircuitOpts {
    std::string params_path;  // empty: build from the fields below with theta = 0
    int depth = 20;
    std::string sharing = "shared";
    double t_gate = 1.0;
    double B0 = 1.0;
};

ParamsFile resolve_params(const CircuitOpts& o, int L) {
    if (!o.params_path.empty()) return read_params(o.params_path);
    AnsatzConfig config;
    config.depth = o.depth;
    config.sharing = parse_sharing(o.sharing);
    config.t_gate = o.t_gate;
    config.grad.B0 = o.B0;
    config.validate();
    return make_params_file(config, ParameterVector::zeros(config, L));
}

struct ResponseOpts {
    std::string model_path;
    CircuitOpts circuit;
    std::string grid = "-1:1:0.01";
    double tie_tol = -1.0;  // auto: 1e-6 * L
    std::string range_out;
    std::string out;
    int workers = 1;
};

int run_response(const ResponseOpts& o, const std::vector<std::string>& argv) {
    ManifestBuilder mb(argv);
    const SensingModel model = read_model(o.model_path);
    mb.add_input(o.model_path);
    const ParamsFile pf = resolve_params(o.circuit, model.L);
    if (!o.circuit.params_path.empty()) mb.add_input(o.circuit.params_path);
    const GridSpec grid_spec = parse_grid_spec(o.grid);
    const Eigen::VectorXd grid = make_grid(grid_spec.from, grid_spec.to, grid_spec.step);
    const double tie_tol = o.tie_tol > 0.0 ? o.tie_tol : default_slope_tie_tol(model.L);

    const ResponseCurve curve =
        response_curve(parameter_vector(pf, model.L), model, ansatz_config(pf), grid, o.workers);
    write_text_file(o.out, response_to_csv(curve));
    mb.add_output(o.out);
    std::cout << "wrote " << o.out << " (" << curve.grid.size() << " points)\n";

    if (!o.range_out.empty()) {
        const int violations = monotonicity_violations(curve, tie_tol);
        const DynamicRangeResult range = dynamic_range(curve, tie_tol);
        write_text_file(o.range_out, range_to_json(range, violations, grid_spec.step, tie_tol));
        mb.add_output(o.range_out);
        std::cout << "dynamic range [" << range.I_lo << ", " << range.I_hi << "] width "
                  << range.width() << ", " << violations << " violations\n";
    }

    RunManifest& m = mb.manifest();
    m.set("model", o.model_path);
    m.set("params", o.circuit.params_path);
    m.set("D", pf.depth);
    m.set("sharing", sharing_name(pf.sharing));
    m.set("t_gate", pf.t_gate);
    m.set("B0", pf.B0);
    m.set("grid", o.grid);
    m.set("slope_tie_tol", tie_tol);
    m.set("workers", o.workers);
    m.set("out", o.out);
    mb.write(o.out + ".manifest.json");
    return 0;
}

struct TrainOpts {
    std::string model_path;
    std::string out;
    int depth = 20;
    std::string sharing = "shared";
    double t_gate = 1.0;
    double B0 = 1.0;
    int samples = 200;
    std::uint64_t data_seed = 1;
    double target_A = 1.0;
    double target_B = 1.0;
    TrainConfig tc;
};

int run_train(const TrainOpts& o, const std::vector<std::string>& argv) {
    ManifestBuilder mb(argv);
    const SensingModel model = read_model(o.model_path);
    mb.add_input(o.model_path);

    AnsatzConfig config;
    config.depth = o.depth;
    config.sharing = parse_sharing(o.sharing);
    config.t_gate = o.t_gate;
    config.grad.B0 = o.B0;
    config.validate();
    const TargetSpec target{o.target_A, o.target_B};
    const TrainingSet dataset = make_dataset(model, target, o.samples, o.data_seed);

    const TrainResult result = train(model, config, dataset, o.tc);

    const std::string stem = out_stem(o.out);
    const std::string init_path = stem + "_init.json";
    const std::string log_path = stem + "_log.csv";
    const std::string data_path = stem + "_data.csv";
    const ParamsFile best = make_params_file(config, result.best_params);
    write_params(o.out, best);
    write_params(init_path, make_params_file(config, result.initial_params));
    write_text_file(log_path, log_to_csv(result.cost_history));
    write_dataset(data_path, dataset);
    for (const std::string& p : {o.out, init_path, log_path, data_path}) mb.add_output(p);

    RunManifest& m = mb.manifest();
    m.set("model", o.model_path);
    m.set("D", o.depth);
    m.set("sharing", o.sharing);
    m.set("t_gate", o.t_gate);
    m.set("B0", o.B0);
    m.set("samples", o.samples);
    m.set("data_seed", o.data_seed);
    m.set("target_A", o.target_A);
    m.set("target_B", o.target_B);
    m.set("init_seed", o.tc.init_seed);
    m.set("restarts", o.tc.restarts);
    m.set("max_iterations", o.tc.max_iterations);
    m.set("cost_tolerance", o.tc.cost_tolerance);
    m.set("fd_step", o.tc.fd_step);
    m.set("angle_lo", o.tc.angle_lo);
    m.set("angle_hi", o.tc.angle_hi);
    m.set("workers", o.tc.workers);
    m.set("out", o.out);
    m.set("final_cost", result.final_cost);
    m.set("restart_index", result.restart_index);
    m.set("iterations", int(result.cost_history.size()) - 1);
    m.set("converged", result.converged);
    m.settings["parameters"] = params_to_json(best);  // raw JSON, not a quoted string
    mb.write(o.out + ".manifest.json");

    if (result.aborted_restarts > 0)
        std::cerr << result.aborted_restarts << " restart(s) aborted on non-finite cost\n";
    std::cout << "best restart " << result.restart_index << ": final cost " << result.final_cost
              << " after " << result.cost_history.size() - 1 << " iterations ("
              << result.wall_time_s << " s)\n";
    std::cout << "wrote " << o.out << "\n";
    if (!result.converged) {
        std::cerr << "final cost " << result.final_cost << " is above tolerance "
                  << o.tc.cost_tolerance << "\n";
        return 1;
    }
    return 0;
}

struct Fig2Opts {
    std::vector<int> L_list{2, 4, 6, 8, 10};
    int depth = 20;
    std::uint64_t seed = 1;
    double t_gate = 1.0;
    double B0 = 1.0;
    std::string grid = "-1:1:0.01";
    double tie_tol = -1.0;
    std::string out_dir;
    int workers = 1;
};

int run_fig2(const Fig2Opts& o, const std::vector<std::string>& argv) {
    ManifestBuilder mb(argv);
    std::filesystem::create_directories(o.out_dir);
    const GridSpec grid_spec = parse_grid_spec(o.grid);
    const Eigen::VectorXd grid = make_grid(grid_spec.from, grid_spec.to, grid_spec.step);

    std::vector<std::vector<std::string>> summary_rows;
    std::vector<int> failed;
    for (int L : o.L_list) {
        try {
            const SensingModel model = sample_model(L, o.seed);
            AnsatzConfig config;
            config.depth = o.depth;
            config.t_gate = o.t_gate;
            config.grad.B0 = o.B0;
            const ParameterVector zeros = ParameterVector::zeros(config, L);
            const double tie_tol = o.tie_tol > 0.0 ? o.tie_tol : default_slope_tie_tol(L);
            const ResponseCurve curve = response_curve(zeros, model, config, grid, o.workers);
            const int violations = monotonicity_violations(curve, tie_tol);
            const DynamicRangeResult range = dynamic_range(curve, tie_tol);

            const std::string csv_path = o.out_dir + "/fig2_L" + std::to_string(L) + ".csv";
            const std::string range_path =
                o.out_dir + "/fig2_L" + std::to_string(L) + "_range.json";
            write_text_file(csv_path, response_to_csv(curve));
            write_text_file(range_path,
                            range_to_json(range, violations, grid_spec.step, tie_tol));
            mb.add_output(csv_path);
            mb.add_output(range_path);
            summary_rows.push_back({std::to_string(L), format_double(range.I_lo),
                                    format_double(range.I_hi), format_double(range.width()),
                                    std::to_string(violations)});
            std::cout << "L=" << L << ": width " << range.width() << " [" << range.I_lo << ", "
                      << range.I_hi << "], " << violations << " violations\n";
        } catch (const std::exception& e) {
            std::cerr << "L=" << L << " failed: " << e.what() << "\n";
            failed.push_back(L);
        }
    }
    const std::string summary_path = o.out_dir + "/fig2_summary.csv";
    write_text_file(summary_path,
                    table_to_csv({"L", "I_lo", "I_hi", "width", "violations"}, summary_rows));
    mb.add_output(summary_path);

    RunManifest& m = mb.manifest();
    {
        std::ostringstream ls;
        for (std::size_t i = 0; i < o.L_list.size(); ++i) ls << (i ? "," : "") << o.L_list[i];
        m.set("L_list", ls.str());
    }
    m.set("D", o.depth);
    m.set("seed", o.seed);
    m.set("t_gate", o.t_gate);
    m.set("B0", o.B0);
    m.set("grid", o.grid);
    m.set("slope_tie_tol_arg", o.tie_tol);
    m.set("workers", o.workers);
    m.set("out", o.out_dir);
    mb.write(o.out_dir + "/fig2.manifest.json");
    std::cout << "wrote " << summary_rows.size() * 2 + 1 << " files to " << o.out_dir << "\n";
    return failed.empty() ? 0 : 1;
}

struct Fig3Opts {
    std::string model_path;
    std::string params_path;
    std::string dataset_path;
    std::string untrained = "random";
    std::string untrained_params_path;
    std::uint64_t untrained_seed = 0;
    std::string grid = "-1:1:0.01";
    double target_A = 1.0;
    double target_B = 1.0;
    std::string out;
    int workers = 1;
};

int run_fig3(const Fig3Opts& o, const std::vector<std::string>& argv) {
    ManifestBuilder mb(argv);
    const SensingModel model = read_model(o.model_path);
    const ParamsFile trained_file = read_params(o.params_path);
    const TrainingSet dataset = read_dataset(o.dataset_path);
    mb.add_input(o.model_path);
    mb.add_input(o.params_path);
    mb.add_input(o.dataset_path);

    const GridSpec grid_spec = parse_grid_spec(o.grid);
    const Eigen::VectorXd grid = make_grid(grid_spec.from, grid_spec.to, grid_spec.step);
    const AnsatzConfig trained_config = ansatz_config(trained_file);
    const ResponseCurve trained =
        response_curve(parameter_vector(trained_file, model.L), model, trained_config, grid,
                       o.workers);

    ResponseCurve untrained;
    if (o.untrained == "file") {
        if (o.untrained_params_path.empty())
            throw std::invalid_argument("--untrained file requires --untrained-params");
        const ParamsFile init = read_params(o.untrained_params_path);
        mb.add_input(o.untrained_params_path);
        untrained = response_curve(parameter_vector(init, model.L), model, ansatz_config(init),
                                   grid, o.workers);
    } else if (o.untrained == "zero") {
        untrained = response_curve(ParameterVector::zeros(trained_config, model.L), model,
                                   trained_config, grid, o.workers);
    } else {
        Rng rng(o.untrained_seed);
        const ParameterVector random = ParameterVector::random(
            trained_config, model.L, rng, -2.0 * std::numbers::pi, 2.0 * std::numbers::pi);
        untrained = response_curve(random, model, trained_config, grid, o.workers);
    }

    const TargetSpec target{o.target_A, o.target_B};
    std::vector<std::vector<std::string>> rows;
    for (Eigen::Index k = 0; k < grid.size(); ++k)
        rows.push_back({format_double(grid(k)), format_double(target_f(model, target, grid(k))),
                        format_double(untrained.values(k)), format_double(trained.values(k))});
    write_text_file(o.out, table_to_csv({"I", "target", "untrained", "trained"}, rows));
    const std::string points_path = out_stem(o.out) + "_points.csv";
    write_dataset(points_path, dataset);
    mb.add_output(o.out);
    mb.add_output(points_path);

    RunManifest& m = mb.manifest();
    m.set("model", o.model_path);
    m.set("params", o.params_path);
    m.set("dataset", o.dataset_path);
    m.set("untrained", o.untrained);
    m.set("untrained_params", o.untrained_params_path);
    m.set("untrained_seed", o.untrained_seed);
    m.set("grid", o.grid);
    m.set("target_A", o.target_A);
    m.set("target_B", o.target_B);
    m.set("workers", o.workers);
    m.set("out", o.out);
    mb.write(o.out + ".manifest.json");
    std::cout << "wrote " << o.out << " and " << points_path << "\n";
    return 0;
}

struct Fig4Opts {
    std::string model_path;
    std::string params_path;
    std::string grid = "-0.8:0.8:0.05";
    int shots = 1;
    double di_step = 1e-4;
    std::string out;
    int workers = 1;
};

int run_fig4(const Fig4Opts& o, const std::vector<std::string>& argv) {
    ManifestBuilder mb(argv);
    const SensingModel model = read_model(o.model_path);
    const ParamsFile pf = read_params(o.params_path);
    mb.add_input(o.model_path);
    mb.add_input(o.params_path);
    const GridSpec sweep = parse_grid_spec(o.grid);

    const DeltaIResult result =
        delta_I_sweep(parameter_vector(pf, model.L), model, ansatz_config(pf), sweep.from,
                      sweep.to, sweep.step, o.shots, o.di_step, o.workers);
    write_text_file(o.out, delta_to_csv(result));
    mb.add_output(o.out);

    int divergent = 0;
    for (bool flag : result.divergent) divergent += flag ? 1 : 0;
    RunManifest& m = mb.manifest();
    m.set("model", o.model_path);
    m.set("params", o.params_path);
    m.set("grid", o.grid);
    m.set("shots", o.shots);
    m.set("dI_deriv", o.di_step);
    m.set("theory", "noninteracting_closed_form");
    m.set("workers", o.workers);
    m.set("out", o.out);
    mb.write(o.out + ".manifest.json");
    std::cout << "wrote " << o.out << " (" << result.grid.size() << " rows, " << divergent
              << " divergent)\n";
    return 0;
}

struct PlotOpts {
    std::string in;
    std::string out;
    std::string title;
};

int run_plot(const PlotOpts& o, const std::vector<std::string>& argv) {
    ManifestBuilder mb(argv);
    const CsvTable table = read_csv(o.in);
    mb.add_input(o.in);
    std::string title = o.title;
    if (title.empty()) title = std::filesystem::path(o.in).stem().string();
    write_text_file(o.out, render_line_chart(table, title));
    mb.add_output(o.out);
    RunManifest& m = mb.manifest();
    m.set("in", o.in);
    m.set("title", title);
    m.set("out", o.out);
    mb.write(o.out + ".manifest.json");
    std::cout << "wrote " << o.out << "\n";
    return 0;
}

void add_circuit_flags(CLI::App* sub, CircuitOpts& c) {
    CLI::Option* params =
        sub->add_option("--params", c.params_path, "parameter JSON (overrides circuit flags)");
    sub->add_option("--depth", c.depth, "circuit depth when no parameter file is given")
        ->excludes(params);
    sub->add_option("--sharing", c.sharing, "angle sharing: shared or per_qubit")
        ->check(CLI::IsMember({"shared", "per_qubit"}))
        ->excludes(params);
    sub->add_option("--t-gate", c.t_gate, "evolution time per gate factor")->excludes(params);
    sub->add_option("--B0", c.B0, "gradient field strength unit")->excludes(params);
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    CLI::App app{"simulator and trainer for interacting-qubit current sensors"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    std::function<int()> action;

    std::string config_sink;
    auto configure = [&](CLI::App* sub) {
        sub->add_option("--config", config_sink,
                        "JSON settings file keyed by long option names");
    };

    auto gen = std::make_shared<GenModelOpts>();
    {
        CLI::App* sub = app.add_subcommand("gen-model", "sample a sensor model and write it");
        configure(sub);
        sub->add_option("-L,--qubits", gen->L, "number of qubits")->required();
        sub->add_option("--seed", gen->seed, "sampling seed");
        sub->add_option("--t-sense", gen->t_sense, "field interaction time");
        sub->add_option("-o,--out", gen->out, "model JSON path")->required();
        sub->callback([&action, gen, &args] { action = [gen, &args] { return run_gen_model(*gen, args); }; });
    }

    auto resp = std::make_shared<ResponseOpts>();
    {
        CLI::App* sub = app.add_subcommand("response", "sweep the readout over a current grid");
        configure(sub);
        sub->add_option("--model", resp->model_path, "model JSON path")->required();
        add_circuit_flags(sub, resp->circuit);
        sub->add_option("--grid", resp->grid, "current grid as from:to:step");
        sub->add_option("--tie-tol", resp->tie_tol, "slope tie tolerance (default 1e-6 * L)");
        sub->add_option("--range-out", resp->range_out, "also write dynamic-range JSON here");
        sub->add_option("-o,--out", resp->out, "response CSV path")->required();
        sub->add_option("--workers", resp->workers, "worker threads");
        sub->callback([&action, resp, &args] { action = [resp, &args] { return run_response(*resp, args); }; });
    }

    auto tr = std::make_shared<TrainOpts>();
    {
        CLI::App* sub = app.add_subcommand("train", "fit circuit parameters to the target curve");
        configure(sub);
        sub->add_option("--model", tr->model_path, "model JSON path")->required();
        sub->add_option("-o,--out", tr->out, "best-parameter JSON path")->required();
        sub->add_option("--depth", tr->depth, "circuit depth");
        sub->add_option("--sharing", tr->sharing, "angle sharing: shared or per_qubit")
            ->check(CLI::IsMember({"shared", "per_qubit"}));
        sub->add_option("--t-gate", tr->t_gate, "evolution time per gate factor");
        sub->add_option("--B0", tr->B0, "gradient field strength unit");
        sub->add_option("-N,--samples", tr->samples, "training sample count");
        sub->add_option("--data-seed", tr->data_seed, "dataset sampling seed");
        sub->add_option("--target-A", tr->target_A, "target amplitude hyperparameter");
        sub->add_option("--target-B", tr->target_B, "target range hyperparameter");
        sub->add_option("--restarts", tr->tc.restarts, "independent random initializations");
        sub->add_option("--max-iterations", tr->tc.max_iterations, "optimizer iteration cap");
        sub->add_option("--cost-tolerance", tr->tc.cost_tolerance,
                        "stop once the cost falls below this");
        sub->add_option("--fd-step", tr->tc.fd_step, "finite-difference step (radians)");
        sub->add_option("--init-seed,--seed", tr->tc.init_seed, "initialization seed");
        sub->add_option("--angle-lo", tr->tc.angle_lo, "lower angle bound (radians)");
        sub->add_option("--angle-hi", tr->tc.angle_hi, "upper angle bound (radians)");
        sub->add_option("--workers", tr->tc.workers, "worker threads");
        sub->callback([&action, tr, &args] { action = [tr, &args] { return run_train(*tr, args); }; });
    }

    auto f2 = std::make_shared<Fig2Opts>();
    {
        CLI::App* sub = app.add_subcommand(
            "fig2", "zero-angle response and dynamic range across qubit counts");
        configure(sub);
        sub->add_option("--L-list", f2->L_list, "qubit counts to sweep")->delimiter(',');
        sub->add_option("--depth", f2->depth, "circuit depth");
        sub->add_option("--seed", f2->seed, "model sampling seed");
        sub->add_option("--t-gate", f2->t_gate, "evolution time per gate factor");
        sub->add_option("--B0", f2->B0, "gradient field strength unit");
        sub->add_option("--grid", f2->grid, "current grid as from:to:step");
        sub->add_option("--tie-tol", f2->tie_tol, "slope tie tolerance (default 1e-6 * L)");
        sub->add_option("-o,--out", f2->out_dir, "output directory")->required();
        sub->add_option("--workers", f2->workers, "worker threads");
        sub->callback([&action, f2, &args] { action = [f2, &args] { return run_fig2(*f2, args); }; });
    }

    auto f3 = std::make_shared<Fig3Opts>();
    {
        CLI::App* sub = app.add_subcommand(
            "fig3", "overlay target, untrained, and trained response curves");
        configure(sub);
        sub->add_option("--model", f3->model_path, "model JSON path")->required();
        sub->add_option("--params", f3->params_path, "trained parameter JSON")->required();
        sub->add_option("--dataset", f3->dataset_path, "training dataset CSV")->required();
        sub->add_option("--untrained", f3->untrained, "baseline mode: random, zero, or file")
            ->check(CLI::IsMember({"random", "zero", "file"}));
        sub->add_option("--untrained-params", f3->untrained_params_path,
                        "parameter JSON for --untrained file");
        sub->add_option("--untrained-seed,--seed", f3->untrained_seed,
                        "seed for --untrained random");
        sub->add_option("--grid", f3->grid, "current grid as from:to:step");
        sub->add_option("--target-A", f3->target_A, "target amplitude hyperparameter");
        sub->add_option("--target-B", f3->target_B, "target range hyperparameter");
        sub->add_option("-o,--out", f3->out, "overlay CSV path")->required();
        sub->add_option("--workers", f3->workers, "worker threads");
        sub->callback([&action, f3, &args] { action = [f3, &args] { return run_fig3(*f3, args); }; });
    }

    auto f4 = std::make_shared<Fig4Opts>();
    {
        CLI::App* sub = app.add_subcommand(
            "fig4", "uncertainty sweep of the trained sensor vs the closed form");
        sub->alias("delta-i");
        configure(sub);
        sub->add_option("--model", f4->model_path, "model JSON path")->required();
        sub->add_option("--params", f4->params_path, "trained parameter JSON")->required();
        sub->add_option("--grid", f4->grid, "sweep as from:to:step");
        sub->add_option("-M,--shots", f4->shots, "measurement repetitions");
        sub->add_option("--di-step", f4->di_step, "central-difference step for the slope");
        sub->add_option("-o,--out", f4->out, "uncertainty CSV path")->required();
        sub->add_option("--workers", f4->workers, "worker threads");
        sub->callback([&action, f4, &args] { action = [f4, &args] { return run_fig4(*f4, args); }; });
    }

    auto pl = std::make_shared<PlotOpts>();
    {
        CLI::App* sub = app.add_subcommand("plot", "render a CSV as a static SVG line chart");
        configure(sub);
        sub->add_option("-i,--in", pl->in, "input CSV path")->required();
        sub->add_option("-o,--out", pl->out, "output SVG path")->required();
        sub->add_option("--title", pl->title, "chart title (default: input file stem)");
        sub->callback([&action, pl, &args] { action = [pl, &args] { return run_plot(*pl, args); }; });
    }

    try {
        const std::vector<std::string> merged = expand_config_args(args, app);
        std::vector<std::string> reversed(merged.rbegin(), merged.rend() - 1);
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    try {
        return action ? action() : 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
