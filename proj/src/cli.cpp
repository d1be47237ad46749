#include "qac/cli.hpp"

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

namespace qac {

namespace {

namespace fs = std::filesystem;

/// Run one job per value on a small pool; results land in input order, so
/// output files are byte-identical for any worker count.
template <typename Job>
void parallel_for(std::size_t n, int workers, Job&& job) {
    if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min<int>(workers, static_cast<int>(n)));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex error_mutex;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    job(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

fs::path out_path(const RunConfig& config, const std::string& name) {
    return fs::path(config.output_dir) / name;
}

bool wants(const RunConfig& config, const std::string& what) {
    return config.emit.empty() || config.emit.count(what) > 0;
}

}  // namespace

int cmd_stationary(const RunConfig& config, std::ostream& log) {
    if (!config.sweep) {
        log << "stationary: config has no sweep block\n";
        return kExitConfig;
    }
    const Model model = build_config_model(config);
    const SweepSpec& sw = *config.sweep;

    std::vector<SweepRow> rows(sw.values.size());
    parallel_for(sw.values.size(), config.workers, [&](std::size_t i) {
        CavityParams cp = config.cavity;
        if (sw.control == SweepControl::Epsilon)
            cp.epsilon = sw.values[i];
        else
            cp.delta_c = sw.values[i];
        SweepRow row;
        row.control = sw.values[i];
        const double a = alpha(cp.delta_c, cp.kappa);
        if (a > 0.0) row.points = stationary_points(model, cp);
        rows[i] = std::move(row);
    });

    if (wants(config, "sweep")) write_sweep_csv(out_path(config, "sweep.csv"), rows);
    if (wants(config, "bifurcations")) {
        const auto bifs = bifurcation_points(model, config.cavity, sw.control);
        write_bifurcations_json(out_path(config, "bifurcations.json"), bifs);
    }

    for (const auto& row : rows) {
        if (row.points.empty()) {
            log << "stationary: no roots at control = " << format_sig(row.control) << "\n";
            return kExitEmpty;
        }
    }
    return kExitOk;
}

int cmd_protocol(const RunConfig& config, std::ostream& log) {
    const Model model = build_config_model(config);

    if (!config.sweep) {
        ProtocolResult r = run_protocol(model, config.cavity, config.schedule);
        if (wants(config, "trajectory"))
            write_trajectory_csv(out_path(config, "trajectory.csv"), r.trajectory);
        if (wants(config, "protocol"))
            write_json_file(out_path(config, "protocol.json"),
                            protocol_json(r, config.schedule.control));
        return kExitOk;
    }

    const SweepSpec& sw = *config.sweep;
    std::vector<ProtocolResult> results(sw.values.size());
    std::vector<std::string> errors(sw.values.size());
    parallel_for(sw.values.size(), config.workers, [&](std::size_t i) {
        Schedule sch = config.schedule;
        sch.control = sw.control;
        sch.level_mid = sw.values[i];
        try {
            results[i] = run_protocol(model, config.cavity, sch);
        } catch (const IntegrationError& e) {
            errors[i] = e.what();
        }
    });

    bool failed = false;
    nlohmann::json arr = nlohmann::json::array();
    std::vector<ProtocolResult> ok_results;
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (!errors[i].empty()) {
            failed = true;
            log << "protocol: integration failed at " << format_sig(sw.values[i]) << ": "
                << errors[i] << "\n";
            continue;
        }
        arr.push_back(protocol_json(results[i], sw.control));
        ok_results.push_back(results[i]);
    }
    write_json_file(out_path(config, "protocols.json"), arr);
    write_protocol_summary_csv(out_path(config, "summary.csv"), ok_results, sw.control);
    if (failed) {
        nlohmann::json manifest;
        manifest["requested"] = sw.values;
        nlohmann::json done = nlohmann::json::array();
        for (std::size_t i = 0; i < results.size(); ++i)
            if (errors[i].empty()) done.push_back(sw.values[i]);
        manifest["completed"] = done;
        write_json_file(out_path(config, "manifest.json"), manifest);
        return kExitIntegration;
    }
    return kExitOk;
}

int cmd_analyze(const RunConfig& config, std::ostream& log) {
    const Model model = build_config_model(config);
    const int n = std::max(2, config.analyze_n);
    const auto rows = observables_grid(model, 0.0, config.model.b_x, n);
    if (wants(config, "observables"))
        write_observables_csv(out_path(config, "observables.csv"), rows);
    const FeasibilityReport rep = feasibility_check(model, config.cavity);
    write_json_file(out_path(config, "feasibility.json"), feasibility_json(rep));
    if (!rep.all_pass())
        log << "analyze: feasibility conditions not all satisfied\n";
    return kExitOk;
}

int cmd_ec(const EcCommandOptions& options, std::ostream& out, std::ostream& log) {
    ECInstance inst;
    if (options.generate) {
        inst = generate_ec_instance(options.n_qubits, options.n_clauses, options.seed,
                                    options.unique);
    } else {
        std::ifstream in(options.instance_path);
        if (!in) {
            log << "ec: cannot open '" << options.instance_path << "'\n";
            return kExitConfig;
        }
        std::string text((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
        inst = parse_ec_clauses(text);
    }

    out << "n_qubits: " << inst.n_qubits << "\n";
    out << "clauses (1-based):\n";
    for (const auto& c : inst.clauses)
        out << "  " << c.q[0] + 1 << " " << c.q[1] + 1 << " " << c.q[2] + 1 << "\n";
    out << "solutions: " << inst.solutions.size() << "\n";
    for (auto s : inst.solutions)
        out << "  " << assignment_string(s, inst.n_qubits) << "\n";
    if (inst.solutions.empty()) out << "  (unsatisfiable)\n";

    std::map<int, int> histogram;
    for (std::uint32_t m = 0; m < (1u << inst.n_qubits); ++m)
        ++histogram[count_violations(inst, m)];
    out << "violation histogram (violations: assignments):\n";
    for (const auto& [k, v] : histogram) out << "  " << k << ": " << v << "\n";

    ModelSpec spec;
    spec.kind = ModelKind::ExactCover;
    spec.b_x = options.b_x;
    spec.j0 = options.j0;
    spec.n_qubits = inst.n_qubits;
    spec.clauses = inst.clauses;
    const Model model = make_model(spec);
    const GapPoint gp = gap_location(model, 1e-6 * spec.b_x, spec.b_x, 201);
    out << "gap location: b_eff = " << format_sig(gp.b_gap)
        << ", gap = " << format_sig(gp.gap_min) << (gp.interior ? "" : " (endpoint)") << "\n";

    if (!options.out_dir.empty()) {
        fs::create_directories(options.out_dir);
        std::ofstream f(fs::path(options.out_dir) / "instance.txt");
        f << "n=" << inst.n_qubits << "\n";
        for (const auto& c : inst.clauses)
            f << c.q[0] + 1 << " " << c.q[1] + 1 << " " << c.q[2] + 1 << "\n";
        nlohmann::json j;
        j["n_qubits"] = inst.n_qubits;
        nlohmann::json sols = nlohmann::json::array();
        for (auto s : inst.solutions) sols.push_back(assignment_string(s, inst.n_qubits));
        j["solutions"] = sols;
        j["gap_location"] = {{"b_eff", round_sig(gp.b_gap)}, {"gap", round_sig(gp.gap_min)}};
        write_json_file(fs::path(options.out_dir) / "ec.json", j);
    }
    return kExitOk;
}

std::filesystem::path find_preset(const std::string& name, const std::string& exe_dir) {
    const std::string file = name.ends_with(".json") ? name : name + ".json";
    std::vector<fs::path> candidates;
    if (const char* env = std::getenv("QAC_PRESET_DIR")) candidates.emplace_back(env);
    candidates.emplace_back("presets");
    if (!exe_dir.empty()) {
        candidates.emplace_back(fs::path(exe_dir) / "presets");
        candidates.emplace_back(fs::path(exe_dir) / ".." / "presets");
        candidates.emplace_back(fs::path(exe_dir) / ".." / ".." / "presets");
    }
    for (const auto& dir : candidates) {
        const fs::path p = dir / file;
        if (fs::exists(p)) return p;
    }
    throw ParseError("preset '" + name + "' not found", 0, 0);
}

}  // namespace qac
