#include "qac/config.hpp"

#include <fstream>

namespace qac {

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& msg) { throw ParseError(msg, 0, 0); }

double get_num(const json& j, const std::string& key, double fallback,
               bool required = false) {
    if (!j.contains(key)) {
        if (required) config_error("missing numeric field '" + key + "'");
        return fallback;
    }
    if (!j[key].is_number()) config_error("field '" + key + "' must be a number");
    return j[key].get<double>();
}

ModelKind parse_kind(const std::string& s) {
    if (s == "TLS" || s == "tls") return ModelKind::Tls;
    if (s == "EC" || s == "ec") return ModelKind::ExactCover;
    if (s == "TFIM" || s == "tfim") return ModelKind::Tfim;
    config_error("unknown model kind '" + s + "'");
}

SweepControl parse_control(const std::string& s) {
    if (s == "epsilon" || s == "eps" || s == "eps_mid") return SweepControl::Epsilon;
    if (s == "delta_c" || s == "delta" || s == "delta_mid") return SweepControl::DeltaC;
    config_error("unknown sweep control '" + s + "'");
}

}  // namespace

std::string to_string(SweepControl control) {
    return control == SweepControl::Epsilon ? "epsilon" : "delta_c";
}

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::Tls: return "TLS";
        case ModelKind::ExactCover: return "EC";
        case ModelKind::Tfim: return "TFIM";
    }
    return "?";
}

RunConfig parse_run_config(const nlohmann::json& doc,
                           const std::filesystem::path& base_dir) {
    RunConfig cfg;
    if (!doc.is_object()) config_error("config root must be an object");

    if (!doc.contains("model") || !doc["model"].is_object())
        config_error("missing 'model' object");
    const json& m = doc["model"];
    cfg.model.kind = parse_kind(m.value("kind", std::string("TLS")));
    cfg.model.b_x = get_num(m, "b_x", 1.0, true);
    cfg.model.j0 = get_num(m, "j0", 0.1, true);
    cfg.model.n_qubits = static_cast<int>(get_num(m, "n_qubits", 1.0));
    cfg.model.n_clauses = static_cast<int>(get_num(m, "n_clauses", 0.0));
    if (m.contains("seed")) cfg.model.seed = m["seed"].get<std::uint64_t>();
    if (m.contains("clauses")) {
        if (!m["clauses"].is_string()) config_error("'clauses' must be a string");
        cfg.clauses_text = m["clauses"].get<std::string>();
    }
    if (m.contains("instance_file")) {
        std::filesystem::path p = m["instance_file"].get<std::string>();
        if (p.is_relative()) p = base_dir / p;
        cfg.instance_file = p.string();
    }

    if (doc.contains("cavity")) {
        const json& c = doc["cavity"];
        cfg.cavity.delta_c = get_num(c, "delta_c", -0.1);
        cfg.cavity.kappa = get_num(c, "kappa", 0.1);
        cfg.cavity.g = get_num(c, "g", 0.05);
        cfg.cavity.epsilon = get_num(c, "epsilon", 0.0);
    }

    if (doc.contains("schedule")) {
        const json& s = doc["schedule"];
        Schedule& sch = cfg.schedule;
        const bool detuning = s.contains("delta0") || s.contains("delta_mid");
        sch.control = detuning ? SweepControl::DeltaC : SweepControl::Epsilon;
        if (detuning) {
            sch.level0 = get_num(s, "delta0", 0.0, true);
            sch.level_mid = get_num(s, "delta_mid", sch.level0);
            sch.level_f = get_num(s, "delta_f", sch.level_mid);
        } else {
            sch.level0 = get_num(s, "eps0", 0.0, true);
            sch.level_mid = get_num(s, "eps_mid", sch.level0);
            sch.level_f = get_num(s, "eps_f", sch.level_mid);
        }
        sch.switch_threshold = get_num(s, "switch_threshold", 0.0, true);
        sch.t_max = get_num(s, "t_max", sch.t_max);
        sch.dt = get_num(s, "dt", 0.0);
        sch.settle_tol = get_num(s, "settle_tol", sch.settle_tol);
        sch.stop_tol = get_num(s, "stop_tol", sch.stop_tol);
        sch.sample_stride = static_cast<int>(get_num(s, "sample_stride", sch.sample_stride));
        if (sch.t_max <= 0 || (sch.dt < 0) || sch.sample_stride < 1)
            config_error("schedule timing fields out of range");
    }

    if (doc.contains("sweep") && !doc["sweep"].is_null()) {
        const json& s = doc["sweep"];
        SweepSpec sw;
        sw.control = parse_control(s.value("control", std::string("epsilon")));
        if (s.contains("values")) {
            if (!s["values"].is_array() || s["values"].empty())
                config_error("'sweep.values' must be a nonempty array");
            for (const auto& v : s["values"]) sw.values.push_back(v.get<double>());
        } else {
            const double lo = get_num(s, "lo", 0.0, true);
            const double hi = get_num(s, "hi", 0.0, true);
            const int n = static_cast<int>(get_num(s, "n", 0.0, true));
            if (!(lo < hi) || n < 2) config_error("sweep needs lo < hi and n >= 2");
            sw.values.resize(n);
            for (int i = 0; i < n; ++i) sw.values[i] = lo + (hi - lo) * i / (n - 1);
        }
        cfg.sweep = std::move(sw);
    }

    cfg.output_dir = doc.value("output_dir", cfg.output_dir);
    if (doc.contains("emit")) {
        for (const auto& e : doc["emit"]) cfg.emit.insert(e.get<std::string>());
    }
    cfg.workers = static_cast<int>(get_num(doc, "workers", 0.0));
    cfg.analyze_n = static_cast<int>(get_num(doc, "analyze_n", cfg.analyze_n));
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) config_error("cannot open config '" + path.string() + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        config_error(std::string("invalid JSON: ") + e.what());
    }
    return parse_run_config(doc, path.parent_path());
}

Model build_config_model(const RunConfig& config) {
    ModelSpec spec = config.model;
    if (spec.kind == ModelKind::ExactCover) {
        if (!config.instance_file.empty()) {
            std::ifstream in(config.instance_file);
            if (!in) config_error("cannot open instance '" + config.instance_file + "'");
            std::string text((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
            ECInstance inst = parse_ec_clauses(
                text, spec.n_qubits > 0 ? std::optional<int>(spec.n_qubits) : std::nullopt);
            spec.n_qubits = inst.n_qubits;
            spec.clauses = inst.clauses;
        } else if (!config.clauses_text.empty()) {
            ECInstance inst = parse_ec_clauses(
                config.clauses_text,
                spec.n_qubits > 0 ? std::optional<int>(spec.n_qubits) : std::nullopt);
            spec.n_qubits = inst.n_qubits;
            spec.clauses = inst.clauses;
        }
    }
    return make_model(spec);
}

}  // namespace qac
