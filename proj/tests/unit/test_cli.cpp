// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "skipfree/cli.hpp"

using namespace skipfree;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path dir() {
    const auto d = std::filesystem::temp_directory_path() / "skipfree_cli";
    std::filesystem::create_directories(d);
    return d;
}

std::string spec(const std::string& name, const std::string& text) {
    const auto p = dir() / name;
    std::ofstream(p) << text;
    return p.string();
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

double field(const std::string& line, int index) {
    std::istringstream in(line);
    std::string cell;
    for (int k = 0; k <= index; ++k) std::getline(in, cell, ',');
    return std::stod(cell);
}

} // namespace

TEST_CASE("potential of GI/M/1 via the closed form") {
    const Run r = run({"potential", spec("g3.json", R"({"family":"gim1","params":{"z":3}})"), "--i", "0..20"});
    CHECK(r.code == kExitOk);
    const auto l = lines(r.out);
    REQUIRE(l.size() == 22);
    CHECK(l[0] == "i,phi,status,path");
    CHECK(l[1] == "0,3,Converged,closed-form");
    CHECK(l[2] == "1,1.5,Converged,closed-form");
    CHECK(l[3] == "2,0.75,Converged,closed-form");
}

TEST_CASE("potential of M/G/1 by each method") {
    const std::string s = spec("m15.json", R"({"family":"mg1","params":{"z":1.5}})");
    for (const char* method : {"auto", "series", "truncation"}) {
        const Run r = run({"potential", s, "--i", "0..20", "--method", method});
        CHECK(r.code == kExitOk);
        const auto l = lines(r.out);
        REQUIRE(l.size() == 22);
        CHECK(field(l[1], 1) == doctest::Approx(0.5).epsilon(1e-6));
        CHECK(field(l[2], 1) == doctest::Approx(5.0 / 6.0).epsilon(1e-6));
        CHECK(field(l[3], 1) == doctest::Approx(11.0 / 18.0).epsilon(1e-6));
    }
}

TEST_CASE("zero cost gives zero potentials") {
    const Run r = run({"potential", spec("gz.json", R"({"family":"gim1","params":{"z":3},"cost":{"kind":"zero"}})"),
                       "--i", "0..5"});
    CHECK(r.code == kExitOk);
    for (std::size_t k = 1; k < lines(r.out).size(); ++k) CHECK(field(lines(r.out)[k], 1) == 0.0);
}

TEST_CASE("incompatible methods are usage errors") {
    const std::string fm = spec("fm.json", R"({"family":"finite_matrix","params":{"path":"fm.csv"},"cost":{"kind":"zero"}})");
    std::ofstream(dir() / "fm.csv") << "0.5,0.5\n0.5,0.5\n";
    Run r = run({"potential", fm, "--method", "series"});
    CHECK(r.code == kExitUsage);
    CHECK(r.err.find("series") != std::string::npos);
    r = run({"potential", spec("g15c.json", R"({"family":"gim1","params":{"z":1.5}})"), "--method", "closed"});
    CHECK(r.code == kExitUsage);
    r = run({"potential", (dir() / "missing.json").string()});
    CHECK(r.code == kExitUsage);
    r = run({"potential"});
    CHECK(r.code == kExitUsage);
    r = run({"potential", fm, "--method", "magic"});
    CHECK(r.code == kExitUsage);
    r = run({});
    CHECK(r.code == kExitUsage);
}

TEST_CASE("divergent potentials exit with code 2") {
    const std::string s = spec("g15.json", R"({"family":"gim1","params":{"z":1.5},"cost":{"kind":"geometric","ratio":1}})");
    CHECK(run({"potential", s, "--method", "truncation"}).code == kExitDiverged);
    CHECK(run({"potential", s, "--method", "series"}).code == kExitDiverged);
}

TEST_CASE("figure data") {
    Run r = run({"figure", "--example", "1"});
    CHECK(r.code == kExitOk);
    auto l = lines(r.out);
    REQUIRE(l.size() == 1 + 3 * 21);
    CHECK(l[0] == "z,i,phi");
    CHECK(l[1] == "3,0,3");
    CHECK(field(l[22], 0) == 5.0);
    CHECK(field(l[22], 2) == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
    CHECK(field(l[43], 0) == 10.0);
    CHECK(field(l[43], 2) == doctest::Approx(1.25).epsilon(1e-15));

    r = run({"figure", "--example", "2"});
    l = lines(r.out);
    REQUIRE(l.size() == 1 + 3 * 21);
    CHECK(field(l[22], 0) == 1.5);
    CHECK(field(l[22], 2) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(field(l[23], 2) == doctest::Approx(5.0 / 6.0).epsilon(1e-14));
    CHECK(field(l[23], 2) > field(l[22], 2));
    CHECK(run({"figure", "--example", "3"}).code == kExitUsage);
}

TEST_CASE("CSV files come with a manifest") {
    const auto out = (dir() / "fig1.csv").string();
    REQUIRE(run({"figure", "--example", "1", "--out", out}).code == kExitOk);
    std::ifstream m(out + ".manifest.json");
    REQUIRE(m.good());
    const nlohmann::json j = nlohmann::json::parse(m);
    CHECK(j["command"] == "figure");
    CHECK(j["solver_paths"][0] == "closed-form");
    CHECK(j["outputs"][0] == out);
    CHECK(j.contains("timestamp"));
    CHECK(j.contains("parameters"));

    const auto out2 = (dir() / "pot.csv").string();
    REQUIRE(run({"potential", spec("m15b.json", R"({"family":"mg1","params":{"z":1.5}})"), "--i", "0..3", "--method",
                 "truncation", "--out", out2})
                .code == kExitOk);
    const nlohmann::json j2 = nlohmann::json::parse(std::ifstream(out2 + ".manifest.json"));
    CHECK(j2["command"] == "potential");
    CHECK(j2["model_spec"]["family"] == "mg1");
    CHECK(j2["tolerances"]["sweep"] == 1e-9);
    CHECK(j2["solver_paths"][0] == "truncation");
}

TEST_CASE("output is deterministic") {
    const std::string s = spec("bd.json", R"({"family":"birth_death","params":{"lambda":2,"mu":1}})");
    const std::vector<std::string> args = {"simulate", s, "--i", "0,2", "--reps", "5000", "--seed", "7"};
    const Run a = run(args);
    const Run b = run(args);
    CHECK(a.code == kExitOk);
    CHECK(a.out == b.out);
    CHECK(lines(a.out)[0] == "i,mean,std_error,replications,seed,exact");
    const auto l = lines(a.out);
    CHECK(std::fabs(field(l[1], 1) - field(l[1], 5)) <= 4.0 * field(l[1], 2));
}

TEST_CASE("classification messages") {
    Run r = run({"classify", spec("g3c.json", R"({"family":"gim1","params":{"z":3}})")});
    CHECK(r.code == kExitOk);
    CHECK(r.out.rfind("Transient (\xce\xa3 F_n^(0) = 1.33333333", 0) == 0);
    r = run({"classify", spec("m2.json", R"({"family":"mg1","params":{"z":2}})")});
    CHECK(r.code == kExitOk);
    CHECK(r.out == "Recurrent (M(0) diverges)\n");
    r = run({"classify", spec("m15c.json", R"({"family":"mg1","params":{"z":1.5}})")});
    CHECK(r.out.rfind("Transient (M(0) = 2", 0) == 0);
    r = run({"classify", spec("g15d.json", R"({"family":"gim1","params":{"z":1.5}})")});
    CHECK(r.out.rfind("Recurrent (\xce\xa3 F_n^(0) diverges)", 0) == 0);
}

TEST_CASE("Green entries") {
    const std::string s = spec("g3g.json", R"({"family":"gim1","params":{"z":3}})");
    Run r = run({"green", s, "--i", "0", "--j", "0"});
    CHECK(r.code == kExitOk);
    auto l = lines(r.out);
    CHECK(l[0] == "i,j,green,status,path");
    CHECK(field(l[1], 2) == doctest::Approx(2.0).epsilon(1e-9));
    r = run({"green", s, "--i", "2", "--j", "0", "--method", "truncation"});
    CHECK(field(lines(r.out)[1], 2) == doctest::Approx(0.25).epsilon(1e-9));
    r = run({"green", spec("bdg.json", R"({"family":"birth_death","params":{"lambda":2,"mu":1}})")});
    CHECK(r.code == kExitUsage);
}

TEST_CASE("convergence sweeps") {
    const std::string s = spec("g3s.json", R"({"family":"gim1","params":{"z":3}})");
    Run r = run({"converge", s, "--i", "0", "--levels", "25,50,100,200,400"});
    CHECK(r.code == kExitOk);
    auto l = lines(r.out);
    REQUIRE(l.size() == 6);
    CHECK(l[0] == "n,value,increment");
    CHECK(field(l[5], 1) == doctest::Approx(3.0).epsilon(1e-9));
    r = run({"converge", s, "--i", "0", "--j", "0", "--levels", "25,50,100,200,400"});
    CHECK(field(lines(r.out)[5], 1) == doctest::Approx(2.0).epsilon(1e-9));
    r = run({"converge", s, "--levels", "50,25"});
    CHECK(r.code == kExitUsage);
    const std::string d = spec("g15s.json", R"({"family":"gim1","params":{"z":1.5},"cost":{"kind":"geometric","ratio":1}})");
    CHECK(run({"converge", d, "--i", "0"}).code == kExitDiverged);
}

TEST_CASE("validation") {
    Run r = run({"validate", spec("mg1v.json", R"({"family":"mg1","params":{"z":1.5}})"), "--i-max", "50"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("valid") != std::string::npos);
}
