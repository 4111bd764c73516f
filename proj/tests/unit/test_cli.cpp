#include "doctest.h"

#include "chaoslink/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace chaoslink;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class TempDir {
  public:
    TempDir() : path_(fs::temp_directory_path() / ("chaoslink_cli_" + std::to_string(counter_++))) {
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    fs::path operator/(const std::string& name) const { return path_ / name; }

    fs::path write(const std::string& name, const std::string& text) const {
        std::ofstream(path_ / name) << text;
        return path_ / name;
    }

  private:
    static inline int counter_ = 0;
    fs::path path_;
};

} // namespace

TEST_CASE("sync command writes a trace and summary") {
    TempDir dir;
    const auto cfg = dir.write("s.cfg", "mu=3.7\nk=1\nrho=0.5\nx0=0.1\ny0=-1.0\nsteps=50\n");
    const auto r = run({"sync", "--config", cfg.string(), "--out", (dir / "t.csv").string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("sync_step: 25\n") != std::string::npos);
    const auto trace = slurp(dir / "t.csv");
    CHECK(trace.rfind("n,x,y,z,e,epsilon,u,i,i_hat,bit,channel\n", 0) == 0);
    CHECK(std::count(trace.begin(), trace.end(), '\n') == 52);
}

TEST_CASE("fixed sync writes the analyzer view") {
    TempDir dir;
    const auto cfg = dir.write("f.cfg", "mode=fixed\nx0=0.119140625\ny0=-1\nsteps=100\n");
    const auto r = run({"sync", "-c", cfg.string(), "--analyzer", (dir / "a.csv").string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("first_equal_step: 12\n") != std::string::npos);
    CHECK(slurp(dir / "a.csv").rfind("step,x_bin,x,y_bin,y,equal\n0,0000000001111010,122,", 0) == 0);
}

TEST_CASE("seed override and determinism") {
    TempDir dir;
    const auto cfg = dir.write("t.cfg", "steps=500\nsource=bernoulli\nseed=1\n");
    auto go = [&](const std::string& name, const std::string& seed) {
        std::vector<std::string> args{"transmit", "--config", cfg.string(), "--out", (dir / name).string()};
        if (!seed.empty()) {
            args.insert(args.end(), {"--seed", seed});
        }
        REQUIRE(run(args).code == 0);
        return slurp(dir / name);
    };
    const auto a = go("a.csv", "");
    CHECK(a == go("b.csv", ""));
    CHECK(a == go("c.csv", "1"));
    CHECK(a != go("d.csv", "2"));
}

TEST_CASE("digital and hop side outputs") {
    TempDir dir;
    const auto dcfg = dir.write("d.cfg", "mode=fixed\nx0=0.119140625\ny0=-1\nsteps=255\nsource=pattern\npattern=1011\n");
    const auto d = run({"digital", "--config", dcfg.string(), "--frames", (dir / "f.csv").string()});
    CHECK(d.code == 0);
    CHECK(d.out.find("frames: 16\n") != std::string::npos);
    const auto frames = slurp(dir / "f.csv");
    CHECK(frames.rfind("frame,info,carrier,line,block_means,decisions,synced\n", 0) == 0);
    CHECK(frames.find(",1011,") != std::string::npos);

    const auto hcfg = dir.write("h.cfg", "steps=519\nsource=bernoulli\nseed=4\n");
    const auto h = run({"hop", "--config", hcfg.string(), "--hops", (dir / "h.csv").string()});
    CHECK(h.code == 0);
    CHECK(h.out.find("channel_error_count: 0\n") != std::string::npos);
    const auto hops = slurp(dir / "h.csv");
    CHECK(hops.rfind("session,j_tx,j_rx,error\n", 0) == 0);
    CHECK(std::count(hops.begin(), hops.end(), '\n') == 6);
}

TEST_CASE("diagnose") {
    TempDir dir;
    const auto r = run({"diagnose", "--mu", "3.7", "--lyapunov"});
    CHECK(r.code == 0);
    CHECK(r.out.find("lyapunov_exponent: 0.35") != std::string::npos);
    const auto s = run({"diagnose", "--mu", "3.7", "--orbit", (dir / "o.csv").string(), "--spectrum",
                        (dir / "s.csv").string(), "--bifurcation", (dir / "b.csv").string(),
                        "--mu-steps", "5", "--keep", "8", "--spectrogram", (dir / "g.csv").string()});
    CHECK(s.code == 0);
    CHECK(fs::exists(dir / "o.csv"));
    CHECK(fs::exists(dir / "s.csv"));
    CHECK(fs::exists(dir / "b.csv"));
    CHECK(fs::exists(dir / "g.csv"));
    CHECK(run({"diagnose", "--mu", "5", "--lyapunov"}).code == 1);
    CHECK(run({"diagnose", "--mu", "3.7", "--spectrum", (dir / "x.csv").string(), "--orbit-length", "10"}).code == 1);
    CHECK_FALSE(fs::exists(dir / "x.csv"));
}

TEST_CASE("lut emit and check") {
    TempDir dir;
    const auto r = run({"lut", "--emit", (dir / "lut.csv").string()});
    CHECK(r.code == 0);
    const auto lut = slurp(dir / "lut.csv");
    CHECK(lut.find("\n1,60.0,61.4,60.7\n") != std::string::npos);
    CHECK(lut.find("\n100,198.6,200.0,199.3\n") != std::string::npos);
    CHECK(run({"lut", "--check", (dir / "lut.csv").string()}).code == 0);
    const auto bad = dir.write("bad.csv", "j,f_low,f_high,f_center\n1,60,61,60.4\n");
    CHECK(run({"lut", "--check", bad.string()}).code == 1);
}

TEST_CASE("usage errors") {
    TempDir dir;
    CHECK(run({}).code == 1);
    CHECK(run({"frobnicate"}).code == 1);
    CHECK(run({"sync"}).code == 1);
    CHECK(run({"sync", "--config", (dir / "missing.cfg").string()}).code == 1);
    const auto bad = dir.write("bad.cfg", "mu=3.7\ncolour=red\n");
    const auto r = run({"sync", "--config", bad.string(), "--out", (dir / "t.csv").string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("unknown key 'colour'") != std::string::npos);
    CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
    CHECK_FALSE(fs::exists(dir / "t.csv"));
}

TEST_CASE("runtime errors leave no partial output") {
    TempDir dir;
    const auto cfg = dir.write("u.cfg", "rho=1.5\nsteps=400\nsource=bernoulli\nseed=1\n");
    const auto r = run({"transmit", "--config", cfg.string(), "--out", (dir / "t.csv").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("guard") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "t.csv"));
    const auto ok = dir.write("s.cfg", "steps=30\n");
    CHECK(run({"sync", "--config", ok.string(), "--out", (dir / "no/such/dir/t.csv").string()}).code == 2);
}

TEST_CASE("help lists every flag") {
    const auto h = run({"diagnose", "--help"});
    CHECK(h.code == 0);
    for (const char* flag : {"--mu", "--k", "--x0", "--lyapunov", "--steps", "--burn-in", "--orbit",
                             "--orbit-length", "--spectrum", "--spectrogram", "--window", "--hop",
                             "--bifurcation", "--mu-min", "--mu-max", "--mu-steps", "--settle", "--keep"}) {
        CHECK(h.out.find(flag) != std::string::npos);
    }
    for (const char* cmd : {"sync", "transmit", "digital", "hop"}) {
        const auto s = run({cmd, "--help"});
        CHECK(s.code == 0);
        CHECK(s.out.find("--config") != std::string::npos);
        CHECK(s.out.find("--out") != std::string::npos);
        CHECK(s.out.find("--seed") != std::string::npos);
    }
    const auto l = run({"lut", "--help"});
    CHECK(l.out.find("--emit") != std::string::npos);
    CHECK(l.out.find("--check") != std::string::npos);
}
