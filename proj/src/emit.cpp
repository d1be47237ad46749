#include "qac/emit.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace qac {

std::string format_sig(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

double round_sig(double v) {
    if (v == 0.0 || !std::isfinite(v)) return v;
    const double mag = std::pow(10.0, 11 - std::floor(std::log10(std::abs(v))));
    return std::round(v * mag) / mag;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    return out;
}

}  // namespace

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
    auto out = open_out(path);
    out << "control,x_ss,b_eff,stability\n";
    for (const auto& row : rows) {
        for (const auto& p : row.points) {
            out << format_sig(row.control) << ',' << format_sig(p.x_ss) << ','
                << format_sig(p.b_eff) << ','
                << (p.stability == Stability::Stable ? "stable" : "unstable") << '\n';
        }
    }
}

void write_bifurcations_json(const std::filesystem::path& path,
                             const std::vector<BifurcationPoint>& points) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& p : points) {
        arr.push_back({{"b_eff", round_sig(p.b_eff)},
                       {"x", round_sig(p.x)},
                       {"control_value", round_sig(p.control_value)},
                       {"control_kind", to_string(p.control_kind)}});
    }
    write_json_file(path, arr);
}

void write_observables_csv(const std::filesystem::path& path,
                           const std::vector<GroundObservables>& rows) {
    auto out = open_out(path);
    out << "b_eff,x_ss,x_ss_prime,gap\n";
    for (const auto& r : rows) {
        out << format_sig(r.b_eff) << ',' << format_sig(r.x_ss) << ','
            << format_sig(r.x_ss_prime) << ',' << format_sig(r.gap) << '\n';
    }
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& trajectory) {
    auto out = open_out(path);
    out << "t,a_re,a_im,x_a,X,b_eff,p_exc\n";
    for (const auto& s : trajectory.samples) {
        out << format_sig(s.t) << ',' << format_sig(s.a_re) << ',' << format_sig(s.a_im)
            << ',' << format_sig(s.x_a) << ',' << format_sig(s.X) << ','
            << format_sig(s.b_eff) << ',' << format_sig(s.p_exc) << '\n';
    }
}

nlohmann::json protocol_json(const ProtocolResult& result, SweepControl control) {
    nlohmann::json j;
    j[control == SweepControl::Epsilon ? "eps_mid" : "delta_mid"] =
        round_sig(result.level_mid);
    j["control"] = to_string(control);
    j["lambda_c"] = round_sig(result.lambda_c);
    j["n_c"] = round_sig(result.n_c);
    j["lz_prediction"] = round_sig(result.lz_prediction);
    j["lambda_l"] = round_sig(result.lambda_l);
    j["n_l"] = round_sig(result.n_l);
    j["b_final"] = round_sig(result.b_final);
    j["t_s"] = round_sig(result.t_s);
    j["terminated"] = result.settled ? "settled" : "timeout";
    return j;
}

nlohmann::json feasibility_json(const FeasibilityReport& report) {
    nlohmann::json j;
    j["alpha_over_g2"] = round_sig(report.alpha_over_g2);
    j["xp_at_zero"] = round_sig(report.xp_at_zero);
    j["xp_max"] = round_sig(report.xp_max);
    j["xss_at_bx"] = round_sig(report.xss_at_bx);
    j["eps0"] = round_sig(report.eps0);
    j["eps_f"] = round_sig(report.eps_f);
    j["conditions"] = {{"negative_detuning", report.negative_detuning},
                       {"bifurcation_window", report.bifurcation_window},
                       {"drive_order", report.drive_order}};
    j["all_pass"] = report.all_pass();
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& p : report.bifurcations) {
        arr.push_back({{"b_eff", round_sig(p.b_eff)},
                       {"x", round_sig(p.x)},
                       {"control_value", round_sig(p.control_value)},
                       {"control_kind", to_string(p.control_kind)}});
    }
    j["bifurcations"] = arr;
    return j;
}

void write_protocol_summary_csv(const std::filesystem::path& path,
                                const std::vector<ProtocolResult>& results,
                                SweepControl control) {
    auto out = open_out(path);
    out << (control == SweepControl::Epsilon ? "eps_mid" : "delta_mid")
        << ",lambda_c,n_c,lz_prediction,lambda_l,n_l,b_final,t_s,terminated\n";
    for (const auto& r : results) {
        out << format_sig(r.level_mid) << ',' << format_sig(r.lambda_c) << ','
            << format_sig(r.n_c) << ',' << format_sig(r.lz_prediction) << ','
            << format_sig(r.lambda_l) << ',' << format_sig(r.n_l) << ','
            << format_sig(r.b_final) << ',' << format_sig(r.t_s) << ','
            << (r.settled ? "settled" : "timeout") << '\n';
    }
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc) {
    auto out = open_out(path);
    out << doc.dump(2) << '\n';
}

}  // namespace qac
