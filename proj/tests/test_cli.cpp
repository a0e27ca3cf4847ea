#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "arcfit/cli.hpp"
#include "arcfit/config.hpp"
#include "arcfit/errors.hpp"

using namespace arcfit;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "arcfit");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream out, err;
    Run r;
    r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

fs::path workdir() {
    const fs::path dir = ARCFIT_TEST_TMP;
    fs::create_directories(dir);
    return dir;
}

std::string write_file(const std::string& name, const std::string& contents) {
    const fs::path p = workdir() / name;
    std::ofstream(p) << contents;
    return p.string();
}

const char* kOracleConfig =
    "# best constant below 1 for f = 2 on the upper half circle\n"
    "arcs = 0 1\n"
    "degree = 0\n"
    "grid = 1\n"
    "bound = 1\n"
    "case = constant\n"
    "case.value = 2\n"
    "density = 400\n";

json strip_timing(json doc) {
    doc.erase("timing");
    return doc;
}

int shell_exit(const std::string& args) {
    const std::string cmd = std::string(ARCFIT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config parsing") {
    std::istringstream in("arcs = 0.25 1.75   # I\n\ndegree=4\n case = constant \n");
    const ConfigEntries e = parse_config_entries(in);
    CHECK(e.at("arcs") == "0.25 1.75");
    CHECK(e.at("degree") == "4");
    CHECK(e.at("case") == "constant");

    auto line_of = [](const std::string& text) -> std::size_t {
        std::istringstream s(text);
        try {
            (void)parse_config_entries(s);
        } catch (const LocatedInputError& err) {
            return err.location();
        }
        return 0;
    };
    CHECK(line_of("arcs = 0 1\nbogus = 3\n") == 2);
    CHECK(line_of("arcs = 0 1\narcs = 0 1\n") == 2);
    CHECK(line_of("# c\narcs 0 1\n") == 2);

    const SolveConfig cfg = config_from_entries({{"arcs", "0.25 1.75"}, {"case", "constant"}, {"case.value", "1+0.5i"},
                                                 {"bound", "0.9"}, {"gram", "quadrature"}});
    CHECK(cfg.arcs.size() == 1);
    CHECK(cfg.arcs[0].lo == doctest::Approx(0.25 * kPi));
    CHECK(cfg.data.synthetic.value == cplx(1.0, 0.5));
    CHECK(cfg.gram == GramChoice::quadrature);
    CHECK(cfg.degree == 8);

    CHECK_THROWS_AS(config_from_entries({{"case", "constant"}}), InputError);                       // no arcs
    CHECK_THROWS_AS(config_from_entries({{"arcs", "0 1"}}), InputError);                            // no data
    CHECK_THROWS_AS(config_from_entries({{"arcs", "0 1"}, {"case", "constant"}, {"data", "x"}}), InputError);
    CHECK_THROWS_AS(config_from_entries({{"arcs", "0 1 2"}, {"case", "constant"}}), InputError);
    CHECK_THROWS_AS(config_from_entries({{"arcs", "0 1"}, {"case", "constant"}, {"degree", "-1"}}), InputError);
    CHECK_THROWS_AS(config_from_entries({{"arcs", "0 1"}, {"case", "constant"}, {"bound", "0"}}), InputError);
    CHECK_THROWS_AS(config_from_entries({{"arcs", "0 1"}, {"case", "wobble"}}), InputError);
    CHECK_THROWS_AS(config_from_entries({{"arcs", "0 1"}, {"case", "custom"}, {"case.expression", "z +"}}), InputError);
    CHECK_THROWS_AS(config_from_entries({{"arcs", "0 1 0.5 1.5"}, {"case", "constant"}}), InputError);  // overlap
    CHECK(known_config_keys().size() > 20);
}

TEST_CASE("solve writes a valid, deterministic result") {
    const std::string cfg = write_file("oracle.cfg", kOracleConfig);
    const Run a = run({"solve", "--config", cfg});
    REQUIRE(a.code == kExitOk);
    const json doc = json::parse(a.out);
    CHECK_NOTHROW(validate_result_document(doc));
    CHECK(doc["schema"] == "arcfit/result-v1");
    CHECK(doc["solution"]["coefficients"][0][0].get<double>() == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(doc["solution"]["status"] == "converged");
    CHECK(doc["problem"]["gram"] == "closed_form");
    CHECK(doc["certificate"]["verdict"] == "grid_feasible_only");
    CHECK(doc["config"]["case.value"] == "2");

    const Run b = run({"solve", "--config", cfg});
    CHECK(strip_timing(json::parse(b.out)).dump() == strip_timing(doc).dump());
}

TEST_CASE("flags and --set override the config") {
    const std::string cfg = write_file("oracle.cfg", kOracleConfig);
    const Run r = run({"solve", "--config", cfg, "--degree", "2", "--grid", "4", "--bound", "0.5", "--set",
                       "case.value=3", "--tol", "1e-9"});
    REQUIRE(r.code == kExitOk);
    const json doc = json::parse(r.out);
    CHECK(doc["problem"]["degree"] == 2);
    CHECK(doc["problem"]["grid"] == 4);
    CHECK(doc["solution"]["coefficients"].size() == 3);
    CHECK(doc["config"]["case.value"] == "3");
    CHECK(doc["problem"]["bound_per_component"][0].get<double>() == 0.5);

    const Run per = run({"solve", "--set", "arcs=0 0.5 0.8 1.4", "--set", "case=constant", "--degree", "3", "--grid", "6",
                         "--bound", "0.5,2"});
    REQUIRE(per.code == kExitOk);
    CHECK(json::parse(per.out)["problem"]["bound_per_component"].size() == 2);
}

TEST_CASE("input errors exit with code 1 and a message") {
    const Run missing = run({"solve", "--config", (workdir() / "nope.cfg").string()});
    CHECK(missing.code == kExitInput);
    CHECK(missing.err.find("cannot open") != std::string::npos);

    const std::string bad_key = write_file("bad_key.cfg", "arcs = 0 1\ncase = constant\nfrobnicate = 1\n");
    const Run unknown = run({"solve", "--config", bad_key});
    CHECK(unknown.code == kExitInput);
    CHECK(unknown.err.find("line 3") != std::string::npos);

    const Run ill = run({"solve", "--set", "arcs=0 0.01", "--set", "case=constant", "--set", "gram=closed_form",
                         "--set", "density=20000", "--degree", "60"});
    CHECK(ill.code == kExitInput);
    CHECK(ill.err.find("degree") != std::string::npos);

    CHECK(run({"solve", "--set", "nonsense"}).code == kExitInput);
    CHECK(run({"frobnicate"}).code == kExitInput);
    CHECK(run({"solve", "--degree", "-3"}).code == kExitInput);
    CHECK(run({"certify", (workdir() / "nope.json").string()}).code == kExitInput);
    CHECK(run({"certify", write_file("garbage.json", "{ not json")}).code == kExitInput);
    CHECK(run({"certify", write_file("wrong.json", "{\"schema\": \"other\"}")}).code == kExitInput);
}

TEST_CASE("certify re-checks a stored result and flags tampering") {
    const std::string cfg = write_file("oracle.cfg", kOracleConfig);
    const std::string result = (workdir() / "oracle_result.json").string();
    REQUIRE(run({"solve", "--config", cfg, "--out", result}).code == kExitOk);
    const json stored = json::parse(std::ifstream(result));

    const Run ok = run({"certify", result});
    REQUIRE(ok.code == kExitOk);
    const json cert = json::parse(ok.out);
    CHECK(cert["schema"] == "arcfit/certificate-v1");
    CHECK(cert["verdict"] == stored["certificate"]["verdict"]);
    // the result file is untouched
    CHECK(json::parse(std::ifstream(result)) == stored);

    json tampered = stored;
    tampered["solution"]["coefficients"][0][0] = 1.01;
    const std::string bad = write_file("tampered.json", tampered.dump());
    const Run failed = run({"certify", bad});
    CHECK(failed.code == kExitFailed);
    CHECK(json::parse(failed.out)["verdict"] == "failed");

    const std::string cert_out = (workdir() / "cert.json").string();
    CHECK(run({"certify", result, "--out", cert_out}).code == kExitOk);
    CHECK(json::parse(std::ifstream(cert_out))["verdict"] == stored["certificate"]["verdict"]);
}

TEST_CASE("emit-plot") {
    const std::string cfg = write_file("oracle.cfg", kOracleConfig);
    const std::string result = (workdir() / "plot_result.json").string();
    REQUIRE(run({"solve", "--config", cfg, "--degree", "3", "--grid", "6", "--out", result}).code == kExitOk);
    const Run r = run({"emit-plot", result, "--points", "256"});
    REQUIRE(r.code == kExitOk);
    const json plot = json::parse(r.out);
    CHECK_NOTHROW(validate_plot_document(plot));
    CHECK(plot["schema"] == "arcfit/plot-v1");
    CHECK(plot["theta"].size() == 256);
    CHECK(plot["modulus"].size() == 256);
    CHECK(plot["overlay"]["theta"].size() == plot["overlay"]["modulus"].size());
    CHECK(plot["bounds"][0]["rho"] == 1.0);
    CHECK(plot["degree"] == 3);

    json broken = plot;
    broken.erase("overlay");
    CHECK_THROWS_AS(validate_plot_document(broken), InputError);
}

TEST_CASE("generate writes canonical samples that solve identically") {
    const std::string cfg = write_file("noisy.cfg",
                                       "arcs = 0.25 1.75\ndegree = 6\ngrid = 12\ncase = custom\n"
                                       "case.expression = 1.3*exp(i*theta) + 0.2*conj(z)\ncase.noise = 0.01\n"
                                       "density = 150\n");
    const std::string samples = (workdir() / "noisy.csv").string();
    const Run gen = run({"generate", "--config", cfg, "--out", samples});
    REQUIRE(gen.code == kExitOk);
    CHECK(gen.err.find("digest") != std::string::npos);
    const SampledBoundaryData data = read_samples_file(samples);

    const Run direct = run({"solve", "--config", cfg});
    REQUIRE(direct.code == kExitOk);
    const json a = json::parse(direct.out);
    CHECK(a["problem"]["data_digest"] == data_digest(data));

    const std::string from_file = write_file("from_file.cfg",
                                             "arcs = 0.25 1.75\ndegree = 6\ngrid = 12\n"
                                             "data = noisy.csv\ndata.format = samples\n");
    const Run replay = run({"solve", "--config", from_file});
    REQUIRE(replay.code == kExitOk);
    const json b = json::parse(replay.out);
    CHECK(b["problem"]["data_digest"] == a["problem"]["data_digest"]);
    CHECK(b["solution"]["coefficients"] == a["solution"]["coefficients"]);
}

TEST_CASE("measurement files through the CLI") {
    write_file("meas.csv",
               "# arcfit-measurements v1\n# source: unit test\nfreq_hz,re,im\n"
               "1e9,1.5,0\n1.2e9,1.5,0\n1.4e9,1.5,0\n1.6e9,1.5,0\n1.8e9,1.5,0\n2e9,1.5,0\n");
    const std::string cfg = write_file("meas.cfg",
                                       "arcs = 0.25 1.75\ndegree = 2\ngrid = 8\ndata = meas.csv\n"
                                       "band = 1e9 2e9\nband.arc = 0.5 1.5\n");
    const Run r = run({"solve", "--config", cfg});
    REQUIRE(r.code == kExitOk);
    const json doc = json::parse(r.out);
    CHECK(doc["problem"]["samples"] == 6);
    CHECK(doc["problem"]["gram"] == "closed_form");

    // the band must land inside one arc of I
    const Run off = run({"solve", "--config", cfg, "--set", "band.arc=0.1 0.5"});
    CHECK(off.code == kExitInput);

    write_file("meas_bad.csv", "# arcfit-measurements v1\nfreq_hz,re,im\n1e9,1,0\n3e9,1,0\n");
    const Run oob = run({"solve", "--config", cfg, "--set", "data=meas_bad.csv"});
    CHECK(oob.code == kExitInput);
    CHECK(oob.err.find("line 4") != std::string::npos);
}

TEST_CASE("sweep subcommand") {
    const std::string cfg = write_file("sweep.cfg",
                                       "arcs = 0.25 1.75\ndegree = 4\ncase = constant\ncase.value = 1.2\n"
                                       "density = 100\nsweep.kind = m\nsweep.values = 4 8 16\n");
    const std::string csv = (workdir() / "sweep.csv").string();
    const Run r = run({"sweep", "--config", cfg, "--csv", csv, "--jobs", "2"});
    REQUIRE(r.code == kExitOk);
    const json doc = json::parse(r.out);
    CHECK(doc["schema"] == "arcfit/sweep-v1");
    CHECK(doc["cells"].size() == 3);
    std::ifstream in(csv);
    std::string header;
    std::getline(in, header);
    CHECK(header.rfind("n,m,status", 0) == 0);

    const Run n = run({"sweep", "--config", cfg, "--set", "sweep.kind=n", "--set", "sweep.values=2 4"});
    REQUIRE(n.code == kExitOk);
    CHECK(json::parse(n.out)["kind"] == "n");
    CHECK(run({"sweep", "--config", cfg, "--set", "sweep.kind=n", "--set", "sweep.values="}).code == kExitInput);
}

TEST_CASE("exit codes of the installed binary") {
    const std::string cfg = write_file("oracle.cfg", kOracleConfig);
    CHECK(shell_exit("--help") == 0);
    CHECK(shell_exit("solve --config " + cfg) == 0);
    CHECK(shell_exit("solve --config " + (workdir() / "missing.cfg").string()) == 1);
    const std::string result = (workdir() / "exit_result.json").string();
    REQUIRE(shell_exit("solve --config " + cfg + " --out " + result) == 0);
    json tampered = json::parse(std::ifstream(result));
    tampered["solution"]["multipliers"][0] = -1.0;
    const std::string bad = write_file("exit_tampered.json", tampered.dump());
    CHECK(shell_exit("certify " + bad) == 2);
}
