#include <doctest.h>

#include <fstream>
#include <sstream>

#include "qac/cli.hpp"

using namespace qac;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path temp_dir(const std::string& tag) {
    auto p = std::filesystem::temp_directory_path() / ("qac_test_" + tag);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

nlohmann::json tls_stationary_config(const std::string& out) {
    return nlohmann::json{
        {"model", {{"kind", "TLS"}, {"b_x", 1.0}, {"j0", 0.1}, {"n_qubits", 1}}},
        {"cavity", {{"delta_c", -0.05}, {"kappa", 0.1}, {"g", 0.075}, {"epsilon", 0.0}}},
        {"sweep", {{"control", "epsilon"}, {"lo", 0.05}, {"hi", 0.45}, {"n", 21}}},
        {"output_dir", out},
        {"emit", {"sweep", "bifurcations"}}};
}

}  // namespace

TEST_CASE("config parsing: happy path and failures") {
    const auto cfg = parse_run_config(tls_stationary_config("x"), ".");
    CHECK(cfg.model.kind == ModelKind::Tls);
    CHECK(cfg.model.b_x == 1.0);
    REQUIRE(cfg.sweep.has_value());
    CHECK(cfg.sweep->values.size() == 21);
    CHECK(cfg.sweep->values.front() == doctest::Approx(0.05));
    CHECK(cfg.sweep->values.back() == doctest::Approx(0.45));

    CHECK_THROWS_AS(parse_run_config(nlohmann::json::array(), "."), ParseError);
    CHECK_THROWS_AS(parse_run_config(nlohmann::json{{"model", {{"kind", "XX"}}}}, "."),
                    ParseError);
    auto bad = tls_stationary_config("x");
    bad["sweep"] = {{"control", "epsilon"}, {"lo", 1.0}, {"hi", 0.0}, {"n", 5}};
    CHECK_THROWS_AS(parse_run_config(bad, "."), ParseError);
}

TEST_CASE("schedule parsing: drive and detuning spellings") {
    nlohmann::json doc = tls_stationary_config("x");
    doc["schedule"] = {{"eps0", 0.07}, {"eps_mid", 0.36},   {"eps_f", 0.59},
                       {"switch_threshold", 0.45}, {"t_max", 1e4}, {"dt", 0.01}};
    auto cfg = parse_run_config(doc, ".");
    CHECK(cfg.schedule.control == SweepControl::Epsilon);
    CHECK(cfg.schedule.level_mid == doctest::Approx(0.36));

    doc["schedule"] = {{"delta0", -0.5}, {"delta_mid", -0.139}, {"delta_f", -0.125},
                       {"switch_threshold", 0.8}};
    cfg = parse_run_config(doc, ".");
    CHECK(cfg.schedule.control == SweepControl::DeltaC);
    CHECK(cfg.schedule.level_f == doctest::Approx(-0.125));
}

TEST_CASE("explicit sweep value lists survive parsing in order") {
    nlohmann::json doc = tls_stationary_config("x");
    doc["sweep"] = {{"control", "epsilon"}, {"values", {0.34, 0.3535, 0.354, 0.37}}};
    const auto cfg = parse_run_config(doc, ".");
    REQUIRE(cfg.sweep.has_value());
    CHECK(cfg.sweep->values == std::vector<double>{0.34, 0.3535, 0.354, 0.37});
}

TEST_CASE("stationary command writes the S-curve files deterministically") {
    const auto dir1 = temp_dir("stat1");
    const auto dir2 = temp_dir("stat2");

    auto cfg = parse_run_config(tls_stationary_config(dir1.string()), ".");
    cfg.workers = 1;
    REQUIRE(cmd_stationary(cfg) == kExitOk);

    auto cfg2 = parse_run_config(tls_stationary_config(dir2.string()), ".");
    cfg2.workers = 4;
    REQUIRE(cmd_stationary(cfg2) == kExitOk);

    const std::string csv1 = slurp(dir1 / "sweep.csv");
    const std::string csv2 = slurp(dir2 / "sweep.csv");
    CHECK(csv1 == csv2);  // byte-identical across worker counts
    CHECK(csv1.rfind("control,x_ss,b_eff,stability\n", 0) == 0);
    CHECK(slurp(dir1 / "bifurcations.json") == slurp(dir2 / "bifurcations.json"));

    const auto bifs = nlohmann::json::parse(slurp(dir1 / "bifurcations.json"));
    REQUIRE(bifs.size() == 2);
    CHECK(bifs[0]["control_kind"] == "epsilon");
    CHECK(bifs[0]["control_value"].get<double>() == doctest::Approx(0.31309).epsilon(1e-3));
}

TEST_CASE("analyze command emits observables and feasibility") {
    const auto dir = temp_dir("analyze");
    auto doc = tls_stationary_config(dir.string());
    doc.erase("sweep");
    doc["emit"] = {"observables"};
    doc["analyze_n"] = 41;
    auto cfg = parse_run_config(doc, ".");
    REQUIRE(cmd_analyze(cfg) == kExitOk);

    const std::string csv = slurp(dir / "observables.csv");
    CHECK(csv.rfind("b_eff,x_ss,x_ss_prime,gap\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 42);  // header + 41 rows

    const auto feas = nlohmann::json::parse(slurp(dir / "feasibility.json"));
    CHECK(feas["all_pass"] == true);
    CHECK(feas["alpha_over_g2"].get<double>() == doctest::Approx(8.888888889).epsilon(1e-6));
}

TEST_CASE("protocol command: single run emits trajectory + record") {
    const auto dir = temp_dir("proto");
    nlohmann::json doc = tls_stationary_config(dir.string());
    doc.erase("sweep");
    doc["schedule"] = {{"eps0", 0.0746278}, {"eps_mid", 0.37}, {"eps_f", 0.5920389},
                       {"switch_threshold", 0.45}, {"t_max", 2e4}};
    doc["emit"] = {"trajectory", "protocol"};
    auto cfg = parse_run_config(doc, ".");
    REQUIRE(cmd_protocol(cfg) == kExitOk);

    const std::string csv = slurp(dir / "trajectory.csv");
    CHECK(csv.rfind("t,a_re,a_im,x_a,X,b_eff,p_exc\n", 0) == 0);
    const auto rec = nlohmann::json::parse(slurp(dir / "protocol.json"));
    CHECK(rec["terminated"] == "settled");
    CHECK(rec["lambda_c"].get<double>() > 0.0);
    CHECK(rec.contains("eps_mid"));
}

TEST_CASE("protocol sweep merges records in control order") {
    const auto dir = temp_dir("protosweep");
    nlohmann::json doc = tls_stationary_config(dir.string());
    doc["schedule"] = {{"eps0", 0.0746278}, {"eps_f", 0.5920389},
                       {"switch_threshold", 0.45}, {"t_max", 2e4}};
    doc["sweep"] = {{"control", "epsilon"}, {"values", {0.36, 0.37}}};
    auto cfg = parse_run_config(doc, ".");
    cfg.workers = 2;
    REQUIRE(cmd_protocol(cfg) == kExitOk);

    const auto arr = nlohmann::json::parse(slurp(dir / "protocols.json"));
    REQUIRE(arr.size() == 2);
    CHECK(arr[0]["eps_mid"].get<double>() == doctest::Approx(0.36));
    CHECK(arr[1]["eps_mid"].get<double>() == doctest::Approx(0.37));
    const std::string summary = slurp(dir / "summary.csv");
    CHECK(summary.rfind("eps_mid,lambda_c,n_c,lz_prediction,lambda_l,n_l,b_final,t_s,terminated\n",
                        0) == 0);
}

TEST_CASE("ec command inspects the reference instance") {
    const auto dir = temp_dir("ec");
    {
        std::ofstream f(dir / "instance.txt");
        f << "n=6\n1 2 5\n2 3 6\n3 4 6\n1 3 5\n2 5 6\n";
    }
    EcCommandOptions opt;
    opt.instance_path = (dir / "instance.txt").string();
    std::ostringstream out;
    REQUIRE(cmd_ec(opt, out) == kExitOk);
    const std::string text = out.str();
    CHECK(text.find("solutions: 1") != std::string::npos);
    CHECK(text.find("100001") != std::string::npos);
    CHECK(text.find("gap location") != std::string::npos);
    CHECK(text.find("violation histogram") != std::string::npos);
}

TEST_CASE("ec command generates deterministic unique instances") {
    EcCommandOptions opt;
    opt.generate = true;
    opt.n_qubits = 6;
    opt.n_clauses = 5;
    opt.seed = 7;
    opt.unique = true;
    std::ostringstream out1, out2;
    REQUIRE(cmd_ec(opt, out1) == kExitOk);
    REQUIRE(cmd_ec(opt, out2) == kExitOk);
    CHECK(out1.str() == out2.str());
    CHECK(out1.str().find("solutions: 1") != std::string::npos);
}

TEST_CASE("duplicate clause in a file is a parse error") {
    const auto dir = temp_dir("dup");
    {
        std::ofstream f(dir / "dup.txt");
        f << "n=4\n1 2 3\n3 1 2\n";  // same index set twice
    }
    EcCommandOptions opt;
    opt.instance_path = (dir / "dup.txt").string();
    std::ostringstream out;
    CHECK_THROWS_AS(cmd_ec(opt, out), ParseError);
}

TEST_CASE("unsatisfiable instance still exits cleanly") {
    const auto dir = temp_dir("unsat");
    {
        std::ofstream f(dir / "unsat.txt");
        // All four triples on four qubits: no assignment covers each exactly once.
        f << "n=4\n1 2 3\n1 2 4\n1 3 4\n2 3 4\n";
    }
    EcCommandOptions opt;
    opt.instance_path = (dir / "unsat.txt").string();
    std::ostringstream out;
    REQUIRE(cmd_ec(opt, out) == kExitOk);
    CHECK(out.str().find("solutions: 0") != std::string::npos);
    CHECK(out.str().find("unsatisfiable") != std::string::npos);
}

TEST_CASE("12-significant-digit formatting") {
    CHECK(format_sig(0.1) == "0.1");
    CHECK(format_sig(1.0 / 3.0) == "0.333333333333");
    CHECK(format_sig(123456789.123456) == "123456789.123");
    CHECK(round_sig(1.0 / 3.0) == doctest::Approx(0.333333333333).epsilon(1e-14));
}

TEST_CASE("preset files resolve and parse") {
#ifdef QAC_SOURCE_DIR
    setenv("QAC_PRESET_DIR", QAC_SOURCE_DIR "/presets", 1);
    for (const std::string name :
         {"fig1", "fig2", "fig2a", "fig3", "fig3b", "fig4", "fig4a", "fig5a", "fig5b"}) {
        const auto path = find_preset(name);
        std::ifstream in(path);
        nlohmann::json doc;
        in >> doc;
        CHECK(doc.contains("command"));
        const auto cfg = parse_run_config(doc, path.parent_path());
        (void)cfg;
    }
    CHECK_THROWS_AS(find_preset("no_such_preset"), ParseError);
#endif
}
