#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "qac/cli.hpp"

namespace {

struct Overrides {
    std::string config_path;
    std::string out_dir;
    int workers = -1;
    double dt = -1.0;
    double t_max = -1.0;
    std::int64_t seed = -1;
};

void apply(qac::RunConfig& cfg, const Overrides& ov) {
    if (!ov.out_dir.empty()) cfg.output_dir = ov.out_dir;
    if (ov.workers >= 0) cfg.workers = ov.workers;
    if (ov.dt > 0.0) cfg.schedule.dt = ov.dt;
    if (ov.t_max > 0.0) cfg.schedule.t_max = ov.t_max;
    if (ov.seed >= 0) cfg.model.seed = static_cast<std::uint64_t>(ov.seed);
}

int dispatch(const std::string& command, qac::RunConfig cfg, const Overrides& ov) {
    apply(cfg, ov);
    if (command == "stationary") return qac::cmd_stationary(cfg);
    if (command == "protocol") return qac::cmd_protocol(cfg);
    if (command == "analyze") return qac::cmd_analyze(cfg);
    std::cerr << "unknown preset command '" << command << "'\n";
    return qac::kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cavity-assisted adiabatic dynamics: stationary analysis, "
                 "switching protocols, and model diagnostics"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    Overrides ov;
    app.add_option("--config", ov.config_path, "JSON run configuration");
    app.add_option("--out", ov.out_dir, "output directory (overrides config)");
    app.add_option("--workers", ov.workers, "sweep worker threads (0 = hardware)");
    app.add_option("--dt", ov.dt, "integration step override");
    app.add_option("--tmax", ov.t_max, "integration horizon override");
    app.add_option("--seed", ov.seed, "instance generation seed override");

    auto* stationary = app.add_subcommand("stationary", "stationary sweep -> sweep.csv, bifurcations.json");
    auto* protocol = app.add_subcommand("protocol", "switching protocol -> trajectory/protocol outputs");
    auto* analyze = app.add_subcommand("analyze", "observables grid + feasibility report");

    auto* preset = app.add_subcommand("preset", "run a shipped preset by name");
    std::string preset_name;
    preset->add_option("name", preset_name, "preset name, e.g. fig1")->required();

    auto* ec = app.add_subcommand("ec", "Exact Cover instance inspection");
    qac::EcCommandOptions eco;
    ec->add_option("--instance", eco.instance_path, "clause file");
    std::vector<int> gen;
    ec->add_option("--generate", gen, "generate: <n_qubits> <n_clauses>")->expected(2);
    std::int64_t ec_seed = 0;
    ec->add_option("--seed", ec_seed, "generation seed");
    ec->add_flag("--unique", eco.unique, "require a unique satisfying assignment");
    ec->add_option("--b-x", eco.b_x, "transverse field for the gap scan");
    ec->add_option("--j0", eco.j0, "target-Hamiltonian magnitude for the gap scan");

    CLI11_PARSE(app, argc, argv);

    const std::string exe_dir =
        std::filesystem::weakly_canonical(std::filesystem::path(argv[0])).parent_path().string();

    try {
        if (ec->parsed()) {
            if (!gen.empty()) {
                eco.generate = true;
                eco.n_qubits = gen[0];
                eco.n_clauses = gen[1];
                eco.seed = static_cast<std::uint64_t>(ec_seed);
            } else if (eco.instance_path.empty()) {
                std::cerr << "ec: need --instance or --generate\n";
                return qac::kExitConfig;
            }
            eco.out_dir = ov.out_dir;
            return qac::cmd_ec(eco);
        }

        if (preset->parsed()) {
            const auto path = qac::find_preset(preset_name, exe_dir);
            std::ifstream in(path);
            nlohmann::json doc;
            in >> doc;
            const std::string command = doc.value("command", "stationary");
            qac::RunConfig cfg = qac::parse_run_config(doc, path.parent_path());
            return dispatch(command, std::move(cfg), ov);
        }

        if (ov.config_path.empty()) {
            std::cerr << "missing --config\n";
            return qac::kExitConfig;
        }
        qac::RunConfig cfg = qac::load_run_config(ov.config_path);
        if (stationary->parsed()) return dispatch("stationary", std::move(cfg), ov);
        if (protocol->parsed()) return dispatch("protocol", std::move(cfg), ov);
        if (analyze->parsed()) return dispatch("analyze", std::move(cfg), ov);
        return qac::kExitConfig;
    } catch (const qac::ParseError& e) {
        std::cerr << e.what() << "\n";
        return qac::kExitConfig;
    } catch (const qac::InvalidSpec& e) {
        std::cerr << e.what() << "\n";
        return qac::kExitConfig;
    } catch (const qac::GenerationFailed& e) {
        std::cerr << e.what() << "\n";
        return qac::kExitEmpty;
    } catch (const qac::IntegrationError& e) {
        std::cerr << e.what() << "\n";
        return qac::kExitIntegration;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return qac::kExitConfig;
    }
}
