#include "oracles.hpp"

#include "cli.hpp"
#include "intdim/dataset.hpp"
#include "intdim/synth.hpp"

#include <doctest.h>
#include <json.hpp>

#include <fstream>
#include <regex>
#include <sstream>

using namespace intdim;
using Json = nlohmann::json;

namespace {

struct Result {
    int status;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int status = cli::run(args, out, err);
    return {status, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

std::string without_runtime(std::string s) {
    return std::regex_replace(s, std::regex("\"runtime_ms\": [0-9.eE+-]+"), "\"runtime_ms\": 0");
}

} // namespace

TEST_CASE("generate then estimate recovers a hypercube dimension") {
    const auto dir = oracle::temp_dir("cli_gen");
    const auto data = (dir / "cube").string();
    auto g = run({"generate", "--kind", "hypercube", "--d", "8", "--N", "128", "--n", "10000", "--seed", "1",
                  "--out", data});
    REQUIRE(g.status == 0);
    CHECK(read_raw_header(data).at("synth.d") == "8");

    const auto report = (dir / "r.json").string();
    auto e = run({"estimate", "--dataset", "raw-tensor:" + data, "--k", "20", "--report", report});
    REQUIRE(e.status == 0);
    const auto j = Json::parse(slurp(report));
    CHECK(j["tool"] == "intdim");
    CHECK(j["command"] == "estimate");
    CHECK(j["seed"] == 0);
    CHECK(j["alpha"] == 1.0);
    CHECK(j["dataset"]["n"] == 10000);
    CHECK(j["dataset"]["N"] == 128);
    CHECK(j["dataset"]["dedup_removed"] == 0);
    CHECK(j.contains("version"));
    CHECK(j["config"]["k"] == "20");
    const double est = j["results"][0]["estimate"];
    CHECK(std::abs(est - 8.0) <= 0.15 * 8.0);
    std::filesystem::remove_all(dir);
}

TEST_CASE("k list emits one row with one column per k") {
    const auto dir = oracle::temp_dir("cli_row");
    const auto data = (dir / "s").string();
    REQUIRE(run({"generate", "--kind", "hypersphere", "--d", "3", "--N", "10", "--n", "2000", "--out", data}).status == 0);
    const auto csv = (dir / "t.csv").string();
    auto e = run({"estimate", "--dataset", "raw:" + data, "--k", "3,5,10,20", "--csv", csv});
    REQUIRE(e.status == 0);
    CHECK(e.out.find("MLE (k=3)") != std::string::npos);
    CHECK(e.out.find("MLE (k=20)") != std::string::npos);
    const auto text = slurp(csv);
    CHECK(text.rfind("dataset,MLE (k=3),MLE (k=5),MLE (k=10),MLE (k=20)\n", 0) == 0);
    // sweep reuses one table: same numbers as individual runs
    auto one = run({"estimate", "--dataset", "raw:" + data, "--k", "10", "--format", "json"});
    const auto j = Json::parse(one.out);
    auto all = run({"estimate", "--dataset", "raw:" + data, "--k", "3,5,10,20", "--format", "json"});
    CHECK(Json::parse(all.out)["results"][2]["estimate"] == j["results"][0]["estimate"]);
    std::filesystem::remove_all(dir);
}

TEST_CASE("config files and byte-identical reports") {
    const auto dir = oracle::temp_dir("cli_cfg");
    const auto data = (dir / "c").string();
    REQUIRE(run({"generate", "--d", "3", "--N", "6", "--n", "1500", "--seed", "3", "--out", data}).status == 0);
    {
        std::ofstream f(dir / "run.cfg");
        f << "# replicated anchor run\ncommand = estimate\ndataset = raw:" << data
          << "\nk = 4,6\nalpha = 0.5\nreplicates = 3\nsubsample = 1000\nseed = 17\n";
    }
    const auto r1 = (dir / "a.json").string(), r2 = (dir / "b.json").string();
    REQUIRE(run({"--config", (dir / "run.cfg").string(), "--report", r1}).status == 0);
    REQUIRE(run({"--config", (dir / "run.cfg").string(), "--report", r2}).status == 0);
    const auto a = slurp(r1);
    CHECK(without_runtime(a) == without_runtime(slurp(r2)));
    const auto j = Json::parse(a);
    CHECK(j["seed"] == 17);
    CHECK(j["alpha"] == 0.5);
    CHECK(j["results"][1]["per_replicate"].size() == 3);
    CHECK(j["results"][1]["params"]["k"] == 6);

    // command line overrides the file
    auto o = run({"--config", (dir / "run.cfg").string(), "estimate", "--k", "5", "--format", "json"});
    REQUIRE(o.status == 0);
    CHECK(Json::parse(o.out)["results"].size() == 1);

    std::ofstream(dir / "bad.cfg") << "dataset raw:x\n";
    CHECK(run({"--config", (dir / "bad.cfg").string(), "estimate"}).status == cli::kConfigError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("thread cap does not change results") {
    const auto dir = oracle::temp_dir("cli_thr");
    const auto data = (dir / "c").string();
    REQUIRE(run({"generate", "--d", "4", "--N", "12", "--n", "3000", "--out", data}).status == 0);
    auto a = run({"--threads", "1", "estimate", "--dataset", "raw:" + data, "--format", "json"});
    auto b = run({"--threads", "3", "estimate", "--dataset", "raw:" + data, "--format", "json"});
    CHECK(Json::parse(a.out)["results"][0]["estimate"] == Json::parse(b.out)["results"][0]["estimate"]);
    std::filesystem::remove_all(dir);
}

TEST_CASE("compare, convergence, noise and knn-cache commands") {
    const auto dir = oracle::temp_dir("cli_all");
    const auto data = (dir / "s").string();
    REQUIRE(run({"generate", "--kind", "hypersphere", "--d", "2", "--N", "3", "--n", "3000", "--out", data}).status == 0);

    auto c = run({"compare", "--dataset", "raw:" + data});
    REQUIRE(c.status == 0);
    for (const char* row : {"MLE (k=5)", "GeoMLE (k1=20,k2=55)", "TwoNN", "kNN Graph Distance"})
        CHECK(c.out.find(row) != std::string::npos);

    auto v = run({"convergence", "--dataset", "raw:" + data, "--sizes", "300,1000,3000", "--replicates", "2",
                  "--csv", (dir / "curve.csv").string()});
    REQUIRE(v.status == 0);
    CHECK(slurp(dir / "curve.csv").rfind("m,mean,stderr,R\n300,", 0) == 0);

    const auto noised = (dir / "n").string();
    REQUIRE(run({"noise", "--dataset", "raw:" + data, "--d-noise", "2", "--mode", "add", "--out", noised}).status == 0);
    CHECK(load_raw(noised).size() == 3000);

    const auto cache = (dir / "t").string();
    REQUIRE(run({"knn-cache", "--dataset", "raw:" + data, "--k", "10", "--out", cache}).status == 0);
    auto cached = run({"estimate", "--dataset", "raw:" + data, "--k", "3,10", "--knn-cache", cache, "--format", "json"});
    auto fresh = run({"estimate", "--dataset", "raw:" + data, "--k", "3,10", "--format", "json"});
    REQUIRE(cached.status == 0);
    CHECK(cached.err.empty());
    CHECK(Json::parse(cached.out)["results"] != nullptr);
    CHECK(Json::parse(cached.out)["results"][1]["estimate"] == Json::parse(fresh.out)["results"][1]["estimate"]);
    std::filesystem::remove_all(dir);
}

TEST_CASE("error classes map to distinct exit codes") {
    const auto dir = oracle::temp_dir("cli_err");
    std::ofstream(dir / "empty.csv") << "";
    std::ofstream(dir / "tiny.csv") << "0,0\n1,1\n";
    std::ofstream(dir / "dup.csv") << "0,0\n0,0\n1,1\n2,5\n";

    auto empty = run({"estimate", "--dataset", "csv:" + (dir / "empty.csv").string()});
    CHECK(empty.status == cli::kDatasetError);
    CHECK(empty.err.find("no data rows") != std::string::npos);

    CHECK(run({"estimate"}).status == cli::kConfigError);
    CHECK(run({"estimate", "--dataset", "bogus:x"}).status == cli::kConfigError);
    CHECK(run({"estimate", "--dataset", "csv:x", "--estimator", "pca"}).status == cli::kConfigError);
    CHECK(run({"frobnicate"}).status == cli::kConfigError);
    CHECK(run({"estimate", "--dataset", "csv:" + (dir / "tiny.csv").string()}).status == cli::kEstimatorError);
    CHECK(run({"estimate", "--no-dedup", "--k", "2", "--dataset", "csv:" + (dir / "dup.csv").string()}).status ==
          cli::kKnnError);
    CHECK(run({"--help"}).status == 0);
    std::filesystem::remove_all(dir);
}
