#include "larn/cli_commands.hpp"
#include "larn/csv.hpp"
#include "larn/model_selection.hpp"
#include "larn/simbench.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace larn;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run larn_cli(const std::vector<std::string>& args)
{
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag)
        : path(fs::temp_directory_path() / ("larn_cli_" + tag))
    {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void spit(const std::string& path, const std::string& text)
{
    std::ofstream(path, std::ios::binary) << text;
}

} // namespace

TEST_CASE("fit: identity design recovers the selected column")
{
    TempDir dir("identity");
    spit(dir / "X.csv", matrix_csv_string(Matrix::Identity(5, 5)));
    Matrix y = Matrix::Zero(5, 1);
    y(2, 0) = 1.0;
    spit(dir / "Y.csv", matrix_csv_string(y, {"resp"}));
    const Run r = larn_cli({"fit", "--x", dir / "X.csv", "--y", dir / "Y.csv", "--out-dir", dir / "out", "--lambda", "0"});
    REQUIRE(r.code == 0);
    const CsvMatrix B = read_matrix_csv(dir / "out/B_hat.csv");
    CHECK(B.header == std::vector<std::string>{"resp"});
    REQUIRE(B.values.rows() == 5);
    for (Index j = 0; j < 5; ++j) CHECK(B.values(j, 0) == doctest::Approx(j == 2 ? 1.0 : 0.0));
    const auto side = nlohmann::json::parse(slurp(dir / "out/fit.json"));
    CHECK(side.at("lambda") == 0.0);
    CHECK(side.at("max_kkt_residual").get<double>() <= 1e-6);
}

TEST_CASE("missing inputs and bad configuration exit with code 2")
{
    TempDir dir("missing");
    const Run r = larn_cli({"fit", "--x", dir / "nope.csv", "--y", dir / "nope.csv", "--out-dir", dir / "o"});
    CHECK(r.code == 2);
    CHECK(r.err.find(dir / "nope.csv") != std::string::npos);

    CHECK(larn_cli({"simulate", "--config", dir / "absent.json"}).code == 2);

    spit(dir / "bad.json", R"({"n": 10, "row_probability": 0.2})");
    const Run bad = larn_cli({"simulate", "--config", dir / "bad.json", "--out-dir", dir / "o"});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("row_probability") != std::string::npos);

    spit(dir / "broken.json", "{ not json");
    CHECK(larn_cli({"simulate", "--config", dir / "broken.json"}).code == 2);

    spit(dir / "X.csv", "a,b\n1,2\n3,x\n");
    spit(dir / "Y.csv", "y\n1\n2\n");
    const Run parse = larn_cli({"fit", "--x", dir / "X.csv", "--y", dir / "Y.csv", "--lambda", "1", "--out-dir", dir / "o"});
    CHECK(parse.code == 2);
    CHECK(parse.err.find("X.csv:3") != std::string::npos);

    CHECK(larn_cli({"fit", "--depth", "simplicial"}).code == 2);
    CHECK(larn_cli({"cv", "--x", dir / "X.csv", "--y", dir / "Y.csv", "--lambda-scale", "ln"}).code == 2);
    CHECK(larn_cli({}).code == 2);
}

TEST_CASE("solver failure exits with code 1")
{
    TempDir dir("solver");
    spit(dir / "X.csv", "a,b\n1,0\n2,0\n3,0\n");
    spit(dir / "Y.csv", "y\n1\n2\n3\n");
    const Run r = larn_cli({"fit", "--x", dir / "X.csv", "--y", dir / "Y.csv", "--lambda", "1", "--out-dir", dir / "o"});
    CHECK(r.code == 1);
    CHECK_FALSE(r.err.empty());
}

TEST_CASE("simulate: shape, zero rows and byte determinism")
{
    TempDir dir("simulate");
    spit(dir / "cfg.json", R"({"n": 50, "p": 20, "q": 20, "seed": 1})");
    REQUIRE(larn_cli({"simulate", "--config", dir / "cfg.json", "--out-dir", dir / "a"}).code == 0);
    REQUIRE(larn_cli({"simulate", "--config", dir / "cfg.json", "--out-dir", dir / "b"}).code == 0);
    for (const char* f : {"X.csv", "Y.csv", "B0.csv"}) CHECK(slurp(dir / "a/" + f) == slurp(dir / "b/" + f));

    const CsvMatrix X = read_matrix_csv(dir / "a/X.csv");
    CHECK(X.values.rows() == 50);
    CHECK(X.values.cols() == 20);
    CHECK(X.header.front() == "x0");

    // Files equal the in-process instance exactly.
    SimConfig cfg;
    cfg.seed = 1;
    const SimInstance inst = generate_instance(cfg);
    CHECK(X.values == inst.data.X);
    CHECK(read_matrix_csv(dir / "a/B0.csv").values == inst.B0);

    REQUIRE(larn_cli({"simulate", "--config", dir / "cfg.json", "--out-dir", dir / "c", "--seed", "2"}).code == 0);
    CHECK(slurp(dir / "c/X.csv") != slurp(dir / "a/X.csv"));

    spit(dir / "zero.json", R"({"n": 12, "p": 6, "q": 4, "row_prob": 0})");
    REQUIRE(larn_cli({"simulate", "--config", dir / "zero.json", "--out-dir", dir / "z"}).code == 0);
    CHECK(read_matrix_csv(dir / "z/B0.csv").values.isZero(0.0));
}

TEST_CASE("simulate then fit matches the in-process pipeline")
{
    TempDir dir("roundtrip");
    spit(dir / "cfg.json", R"({"n": 50, "p": 20, "q": 20, "seed": 1})");
    REQUIRE(larn_cli({"simulate", "--config", dir / "cfg.json", "--out-dir", dir / "d"}).code == 0);
    const Run r = larn_cli({"fit", "--x", dir / "d/X.csv", "--y", dir / "d/Y.csv", "--out-dir", dir / "fit",
                            "--n-lambdas", "12", "--n-thresholds", "10", "--folds", "5", "--seed", "4"});
    REQUIRE(r.code == 0);
    const Matrix cli_B = read_matrix_csv(dir / "fit/B_hat.csv").values;

    SimConfig cfg;
    cfg.seed = 1;
    const SimInstance inst = generate_instance(cfg);
    CvGrid g;
    g.lambda_count = 12;
    g.threshold_count = 10;
    g.k = 5;
    g.seed = 4;
    const CvResult cv = cross_validate(inst.data, LarnConfig{}, g);
    const Matrix B = refit_best(inst.data, LarnConfig{}, cv).B_hat;
    CHECK(cli_B == B);
    CHECK(row_support(cli_B) == row_support(B));

    const auto side = nlohmann::json::parse(slurp(dir / "fit/fit.json"));
    CHECK(side.at("lambda").get<double>() == cv.best_lambda);
    CHECK(side.at("threshold").get<double>() == cv.best_threshold);
    CHECK(side.contains("objective_trace"));
    CHECK(side.contains("kkt_residuals"));

    const Run c = larn_cli({"cv", "--x", dir / "d/X.csv", "--y", dir / "d/Y.csv", "--out-dir", dir / "cv",
                            "--n-lambdas", "12", "--n-thresholds", "10", "--seed", "4", "--jobs", "3"});
    REQUIRE(c.code == 0);
    const std::string surface = slurp(dir / "cv/cv_surface.csv");
    CHECK(std::count(surface.begin(), surface.end(), '\n') == 1 + 12 * 10);
    CHECK(surface.rfind("lambda_index,lambda,threshold_index,threshold,cv_rmse\n", 0) == 0);
    CHECK(nlohmann::json::parse(slurp(dir / "cv/cv.json")).at("best_lambda").get<double>() == cv.best_lambda);
}

TEST_CASE("fit flags reach the estimator")
{
    TempDir dir("flags");
    spit(dir / "cfg.json", R"({"n": 30, "p": 6, "q": 3, "seed": 5, "row_prob": 0.5})");
    REQUIRE(larn_cli({"simulate", "--config", dir / "cfg.json", "--out-dir", dir / "d"}).code == 0);
    const Run r = larn_cli({"fit", "--x", dir / "d/X.csv", "--y", dir / "d/Y.csv", "--out-dir", dir / "f",
                            "--depth", "projection", "--transform", "exp", "--one-step", "false", "--lambda", "5"});
    REQUIRE(r.code == 0);
    CHECK(r.err.find("non-concave") != std::string::npos);
    const auto side = nlohmann::json::parse(slurp(dir / "f/fit.json"));
    CHECK(side.at("depth") == "projection");
    CHECK(side.at("transform") == "exp");
    CHECK(side.at("one_step") == false);
    CHECK(side.at("inner_solves").get<int>() >= 1);
}

TEST_CASE("benchmark: smoke run, row order and determinism")
{
    TempDir dir("bench");
    spit(dir / "cfg.json", R"({"n": 20, "p": 5, "q": 3, "replications": 1, "seed": 3})");
    const Run r = larn_cli({"benchmark", "--config", dir / "cfg.json", "--out", dir / "m1.csv"});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    CHECK(r.err.find("done") != std::string::npos);
    const std::string csv = slurp(dir / "m1.csv");
    std::istringstream lines(csv);
    std::string line;
    std::vector<std::string> rows;
    while (std::getline(lines, line)) rows.push_back(line);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == "setting,rho,replication,method,cv_rmse,mae,tp,tn");
    CHECK(rows[1].rfind("p5q3,0.7,0,LARN,", 0) == 0);
    CHECK(rows[2].rfind("p5q3,0.7,0,TGL,", 0) == 0);
    CHECK(rows[3].rfind("p5q3,0.7,0,SepLasso,", 0) == 0);

    REQUIRE(larn_cli({"benchmark", "--config", dir / "cfg.json", "--out", dir / "m2.csv"}).code == 0);
    CHECK(slurp(dir / "m2.csv") == csv);

    spit(dir / "cfg3.json", R"({"n": 20, "p": 5, "q": 3, "replications": 3, "seed": 3, "methods": ["TGL"]})");
    REQUIRE(larn_cli({"benchmark", "--config", dir / "cfg3.json", "--out", dir / "s.csv", "--jobs", "1"}).code == 0);
    REQUIRE(larn_cli({"benchmark", "--config", dir / "cfg3.json", "--out", dir / "p.csv", "--jobs", "3"}).code == 0);
    CHECK(slurp(dir / "s.csv") == slurp(dir / "p.csv"));
}

TEST_CASE("threshold-curve")
{
    const Run id = larn_cli({"threshold-curve", "--lambda", "0", "--zmax", "3", "--step", "0.25"});
    REQUIRE(id.code == 0);
    const CsvMatrix c = parse_matrix_csv(id.out);
    CHECK(c.header == std::vector<std::string>{"z", "theta_hat"});
    CHECK(c.values.rows() == 25);
    CHECK(c.values.col(0) == c.values.col(1));

    const Run curve = larn_cli({"threshold-curve", "--lambda", "1.5"});
    REQUIRE(curve.code == 0);
    const Matrix v = parse_matrix_csv(curve.out).values;
    CHECK(v.rows() == 1001);
    CHECK(v(0, 0) == -5.0);
    for (Index i = 0; i < v.rows(); ++i) {
        const Index m = v.rows() - 1 - i;
        CHECK(v(m, 0) == -v(i, 0));
        CHECK(v(m, 1) == -v(i, 1));
    }

    TempDir dir("curve");
    REQUIRE(larn_cli({"threshold-curve", "--penalty", "mcp", "--shape-lambda", "1", "--lambda", "1", "--out",
                      dir / "mcp.csv"}).code == 0);
    const Matrix m = read_matrix_csv(dir / "mcp.csv").values;
    for (Index i = 0; i < m.rows(); ++i) {
        if (std::fabs(m(i, 0)) >= 1.0) CHECK(m(i, 1) == m(i, 0));
    }
    CHECK(larn_cli({"threshold-curve", "--step", "0"}).code == 2);
}

TEST_CASE("minimax-check reports the closed-form bound")
{
    const Run r = larn_cli({"minimax-check", "--n", "1024", "--theta", "zero", "--replications", "20", "--seed", "3"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    const long double log_n = std::log(1024.0L);
    const long double root = std::sqrt(0.5L * log_n) - 1.0L;
    const long double c1 = 1.0L / std::sqrt(2.0L * 3.14159265358979323846264338327950288L);
    const long double bound = (2.0L * log_n - 3.0L) * (0.0L + c1 / (c1 * root));
    CHECK(std::fabs(j.at("bound").get<double>() - static_cast<double>(bound)) <= 1e-10 * static_cast<double>(bound));
    CHECK(j.at("lambda").get<double>() == doctest::Approx(static_cast<double>(root / c1)).epsilon(1e-12));
    CHECK(j.at("replications") == 20);
    CHECK(j.at("ideal_risk") == 0.0);

    TempDir dir("minimax");
    spit(dir / "theta.csv", "theta\n0\n3\n0\n3\n");
    // Four means are too few for the bound (n >= 64).
    CHECK(larn_cli({"minimax-check", "--theta-csv", dir / "theta.csv"}).code == 2);
    CHECK(larn_cli({"minimax-check", "--theta", "spiky"}).code == 2);
}
