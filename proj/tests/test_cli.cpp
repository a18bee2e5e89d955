#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

namespace {

namespace fs = std::filesystem;

struct RunResult {
    int status = -1;
    std::string out;
    std::string err;
};

const fs::path& scratch_dir() {
    static const fs::path dir = [] {
        const fs::path p =
            fs::temp_directory_path() / ("finitemix_cli_" + std::to_string(::getpid()));
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

RunResult run_cli(const std::string& args) {
    const char* bin = std::getenv("FINITEMIX_CLI");
    REQUIRE_MESSAGE(bin != nullptr, "FINITEMIX_CLI must point at the finitemix binary");
    const fs::path out = scratch_dir() / "stdout.txt";
    const fs::path err = scratch_dir() / "stderr.txt";
    const std::string cmd = std::string("\"") + bin + "\" " + args + " > " + out.string() +
                            " 2> " + err.string();
    const int raw = std::system(cmd.c_str());
    RunResult result;
    result.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    result.out = slurp(out);
    result.err = slurp(err);
    return result;
}

std::string path_of(const char* name) { return (scratch_dir() / name).string(); }

}  // namespace

TEST_CASE("build emits canonical JSON on stdout and summaries with --out") {
    const RunResult direct = run_cli("build --family base --n 6 --k 1");
    CHECK(direct.status == 0);
    CHECK(direct.out.find(R"({"n":6,"k":1,"builder":"base:k=1","graphs":[)") == 0);

    const RunResult saved =
        run_cli("build --family simple-base --n 5 --k 1 --out " + path_of("sb5.json"));
    CHECK(saved.status == 0);
    CHECK(saved.out.find("length: 5") != std::string::npos);
    CHECK(saved.out.find("max_degree: 1") != std::string::npos);
    CHECK(saved.out.find("length_bound:") != std::string::npos);
}

TEST_CASE("build failures exit 2 with a coded message") {
    const RunResult rough = run_cli("build --family 1peer-hypercube --n 6");
    CHECK(rough.status == 2);
    CHECK(rough.err.find("error: NonPowerOfTwo:") == 0);

    const RunResult unknown = run_cli("build --family smallworld --n 6");
    CHECK(unknown.status == 2);
    CHECK(unknown.err.find("error: BadFamily:") == 0);

    const RunResult missing = run_cli("build --n 6");
    CHECK(missing.status == 2);

    const RunResult badk = run_cli("build --family base --n 6");
    CHECK(badk.status == 2);
    CHECK(badk.err.find("error: BadK:") == 0);
}

TEST_CASE("verify separates success, property failure, and usage failure") {
    run_cli("build --family base --n 12 --k 2 --out " + path_of("base12.json"));
    const RunResult good = run_cli("verify " + path_of("base12.json"));
    CHECK(good.status == 0);
    CHECK(good.out.find("valid: true") != std::string::npos);
    CHECK(good.out.find("finite_time: true") != std::string::npos);
    CHECK(good.out.find("steps:") != std::string::npos);

    run_cli("build --family ring --n 12 --out " + path_of("ring12.json"));
    const RunResult never = run_cli("verify " + path_of("ring12.json"));
    CHECK(never.status == 1);
    CHECK(never.out.find("finite_time: false") != std::string::npos);

    std::ofstream(path_of("broken.json")) << "{\"n\": 3, \"k\"";
    const RunResult broken = run_cli("verify " + path_of("broken.json"));
    CHECK(broken.status == 2);
    CHECK(broken.err.find("error: BadJson:") == 0);

    const RunResult gone = run_cli("verify " + path_of("missing.json"));
    CHECK(gone.status == 2);
    CHECK(gone.err.find("error: IoError:") == 0);
}

TEST_CASE("verify reports violations for hand-broken sequences") {
    std::ofstream(path_of("loop.json"))
        << R"({"n":3,"k":2,"builder":"x","graphs":[{"directed":false,"edges":[[2,2,"1/2"]]}]})";
    const RunResult loop = run_cli("verify " + path_of("loop.json"));
    CHECK(loop.status == 1);
    CHECK(loop.out.find("violation: SelfLoop graph=0") != std::string::npos);
    CHECK(loop.out.find("valid: false") != std::string::npos);
}

TEST_CASE("rate single mode prints beta for one-round families") {
    const RunResult r = run_cli("rate --family ring --n 4");
    CHECK(r.status == 0);
    CHECK(r.out.find("beta: 0.33333333333333331") != std::string::npos);

    const RunResult multi = run_cli("rate --family base --k 1 --n 6");
    CHECK(multi.status == 0);
    CHECK(multi.out.find("finite_time: true") != std::string::npos);
    CHECK(multi.out.find("beta:") == std::string::npos);

    const RunResult neither = run_cli("rate --n 4");
    CHECK(neither.status == 2);
    CHECK(neither.err.find("error: BadUsage:") == 0);
}

TEST_CASE("rate batch mode writes the pinned CSV") {
    const RunResult table =
        run_cli("rate --families ring,base --n-values 8,16 --k-values 1");
    CHECK(table.status == 0);
    CHECK(table.out.find("family,n,k,length,max_degree,finite_time,beta\n") == 0);
    CHECK(table.out.find("base:k=1,16,1,") != std::string::npos);

    // per-row failures go to stderr, the run still exits 0
    const RunResult partial = run_cli("rate --families ring --n-values 2,8");
    CHECK(partial.status == 0);
    CHECK(partial.err.find("error: BadN:") != std::string::npos);
    CHECK(partial.out.find("ring,2,,,,,\n") != std::string::npos);
}

TEST_CASE("gossip writes iter,error rows") {
    const RunResult g = run_cli("gossip --family base --n 8 --k 1 --iters 5 --seed 7");
    CHECK(g.status == 0);
    CHECK(g.out.find("iter,error\n") == 0);

    const RunResult saved = run_cli("gossip --family ring --n 8 --iters 3 --out " +
                                    path_of("gossip.csv"));
    CHECK(saved.status == 0);
    CHECK(saved.out.find("final_error:") != std::string::npos);
    CHECK(slurp(path_of("gossip.csv")).find("iter,error\n") == 0);
}

TEST_CASE("dsgd runs generated and saved problems identically") {
    const std::string common = " --family base --k 1 --eta 0.02 --rounds 5";
    const RunResult gen = run_cli("dsgd --n 6 --dim 3 --zeta 1 --problem-seed 4" + common +
                                  " --save-problem " + path_of("prob.json"));
    CHECK(gen.status == 0);
    CHECK(gen.out.find("round,grad_norm_sq,consensus_error,suboptimality\n") == 0);

    const RunResult reload = run_cli("dsgd --problem " + path_of("prob.json") + common);
    CHECK(reload.status == 0);
    CHECK(reload.out == gen.out);

    const RunResult conflict =
        run_cli("dsgd --problem " + path_of("prob.json") + " --n 6" + common);
    CHECK(conflict.status == 2);
}

TEST_CASE("sweep consumes a JSON config") {
    std::ofstream(path_of("sweep.json")) << R"({
        "problem": {"n": 8, "d": 3, "zeta_scale": 1.0, "sigma": 0.0,
                    "mu": 1.0, "l_smooth": 10.0, "seed": 2},
        "families": ["ring", "base:k=1", "nosuch"],
        "eta": 0.02, "rounds": 5})";
    const RunResult s = run_cli("sweep --config " + path_of("sweep.json"));
    CHECK(s.status == 0);
    CHECK(s.out.find("family,seed,length,max_degree,") == 0);
    CHECK(s.out.find("base:k=1,") != std::string::npos);
    CHECK(s.err.find("error: BadFamily:") != std::string::npos);

    std::ofstream(path_of("badsweep.json")) << R"({"families": ["ring"]})";
    const RunResult bad = run_cli("sweep --config " + path_of("badsweep.json"));
    CHECK(bad.status == 2);
    CHECK(bad.err.find("error: BadFormat:") == 0);
}

TEST_CASE("export-dot writes one file per round") {
    run_cli("build --family simple-base --n 5 --k 1 --out " + path_of("dot_src.json"));
    const RunResult d = run_cli("export-dot " + path_of("dot_src.json") + " --outdir " +
                                path_of("dots"));
    CHECK(d.status == 0);
    CHECK(d.out.find("files: 5") != std::string::npos);
    CHECK(fs::exists(scratch_dir() / "dots" / "graph_001.dot"));
    CHECK(fs::exists(scratch_dir() / "dots" / "graph_005.dot"));
    CHECK(slurp(scratch_dir() / "dots" / "graph_001.dot").find("graph round_1 {") == 0);
}

TEST_CASE("repeated invocations produce byte-identical artifacts") {
    const std::string cmds[] = {
        "build --family base --n 20 --k 2 --out ",
        "rate --families ring,exp,base --n-values 8,16 --k-values 1 --out ",
        "dsgd --n 8 --dim 4 --zeta 1 --sigma 0.3 --problem-seed 5 --family base --k 2 "
        "--eta 0.02 --rounds 20 --seed 9 --out ",
    };
    int idx = 0;
    for (const std::string& cmd : cmds) {
        CAPTURE(cmd);
        const std::string first = path_of(("rep_a" + std::to_string(idx)).c_str());
        const std::string second = path_of(("rep_b" + std::to_string(idx)).c_str());
        CHECK(run_cli(cmd + first).status == 0);
        CHECK(run_cli(cmd + second).status == 0);
        const std::string a = slurp(first);
        CHECK(!a.empty());
        CHECK(a == slurp(second));
        ++idx;
    }
}

TEST_CASE("help exits zero, bad flags exit two") {
    CHECK(run_cli("--help").status == 0);
    CHECK(run_cli("build --help").status == 0);
    CHECK(run_cli("").status == 2);       // a subcommand is required
    CHECK(run_cli("frobnicate").status == 2);
    CHECK(run_cli("build --family ring --n notanumber").status == 2);
}
