#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "krylov/io.hpp"

namespace fs = std::filesystem;
using Catch::Matchers::WithinRel;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("krylov_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

int cli(const std::string& args) {
    const std::string cmd = std::string(KRYLOV_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string cli_capture(const std::string& args, int& rc_out) {
    TempDir tmp;
    const std::string outfile = tmp.file("stdout.txt");
    const std::string cmd =
        std::string(KRYLOV_CLI_PATH) + " " + args + " > " + outfile + " 2>&1";
    rc_out = WEXITSTATUS(std::system(cmd.c_str()));
    std::ifstream is(outfile);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("cli: lanczos weight produces the closed-form b_2 = 1") {
    TempDir tmp;
    const auto out = tmp.file("coeffs.json");
    REQUIRE(cli("lanczos weight --family gen-hermite --rho 0 --n 10 --bits 192 --out " + out) ==
            0);
    auto seq = krylov::io::read_sequence(out);
    CHECK_THAT(seq.at(2), WithinRel(1.0, 1e-10));
    CHECK(seq.meta.count("command") == 1);
    CHECK(seq.meta.count("precision_bits") == 1);
}

TEST_CASE("cli: unknown flag exits 2 with usage") {
    CHECK(cli("lanczos weight --no-such-flag") == 2);
    CHECK(cli("frobnicate") == 2);
}

TEST_CASE("cli: numerical failures exit 3 with the error name") {
    TempDir tmp;
    const auto out = tmp.file("coeffs.json");
    // conserved seed: z-sum commutes with the XXZ Hamiltonian -> BreakdownError
    int rc = 0;
    const std::string msg = cli_capture("lanczos model --model xxz --delta 1.5 --seed z-sum "
                                        "--n 4 --out " + out, rc);
    CHECK(rc == 3);

    const std::string jmsg =
        cli_capture("--json-errors lanczos model --model xxz --delta 1.5 --seed z-sum --n 4 "
                    "--out " + out, rc);
    CHECK(rc == 3);
    CHECK(jmsg.find("BreakdownError") != std::string::npos);
}

TEST_CASE("cli: model -> bootstrap -> reconstruct round trip") {
    TempDir tmp;
    const auto coeffs = tmp.file("coeffs.json");
    const auto phi = tmp.file("phi.csv");
    const auto rec = tmp.file("rec.json");

    REQUIRE(cli("lanczos model --model mfim --gx 1.4 --gz 0.9045 --seed energy-current "
                "--n 14 --trunc 0 --out " + coeffs) == 0);
    REQUIRE(cli("bootstrap bulk --coeffs " + coeffs +
                " --n 14 --domega 1e-3 --rk4 --no-step-check --out " + phi) == 0);
    int rc = 0;
    const std::string out =
        cli_capture("reconstruct --phi " + phi + " --n 14 --ref " + coeffs + " --out " + rec, rc);
    REQUIRE(rc == 0);
    CHECK(out.find("max coefficient deviation:") != std::string::npos);
    const double dev = std::stod(out.substr(out.find(':') + 1));
    CHECK(dev < 5e-2);
}

TEST_CASE("cli: determinism across thread counts (byte-identical outputs)") {
    TempDir tmp;
    const auto coeffs = tmp.file("c.json");
    REQUIRE(cli("lanczos weight --family sech --rho 0 --n 24 --bits 192 --out " + coeffs) == 0);
    std::string blobs[3];
    int i = 0;
    for (const char* t : {"1", "4", "8"}) {
        const auto phi = tmp.file(std::string("phi") + t + ".csv");
        REQUIRE(cli("--threads " + std::string(t) + " bootstrap bulk --coeffs " + coeffs +
                    " --n 24 --domega 1e-3 --omega-max 20 --no-step-check --out " + phi) == 0);
        std::ifstream is(phi);
        std::stringstream ss;
        ss << is.rdbuf();
        blobs[i++] = ss.str();
    }
    // the command/threads meta lines legitimately differ; all data bytes must match
    auto strip_meta = [](const std::string& s) {
        std::string out;
        std::stringstream ss(s);
        std::string line;
        while (std::getline(ss, line))
            if (line.rfind("# command", 0) != 0 && line.rfind("# threads", 0) != 0)
                out += line + "\n";
        return out;
    };
    CHECK(strip_meta(blobs[0]) == strip_meta(blobs[1]));
    CHECK(strip_meta(blobs[1]) == strip_meta(blobs[2]));
}

TEST_CASE("cli: eqmeasure and confinement emit the documented CSV schemas") {
    TempDir tmp;
    const auto sig = tmp.file("sigma.csv");
    REQUIRE(cli("eqmeasure --family gen-hermite --rho 0 --n 8 --points 64 --out " + sig) == 0);
    auto t = krylov::io::read_csv(sig);
    REQUIRE(t.header == std::vector<std::string>{"omega", "sigma", "I"});
    CHECK(t.rows() == 64);
    CHECK_THAT(t.col("I").back(), WithinRel(4.0, 0.01));

    const auto conf = tmp.file("conf.csv");
    int rc = 0;
    const auto msg = cli_capture(
        "confinement --family quartic-root --pinv 2 --rho 0 --nlist 100,300,1000 --out " + conf,
        rc);
    REQUIRE(rc == 0);
    CHECK(msg.find("algebraic") != std::string::npos);
}
