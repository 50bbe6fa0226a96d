#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "kdml/commands.hpp"
#include "kdml/errors.hpp"
#include "kdml/model_file.hpp"
#include "kdml/svg.hpp"
#include "oracles.hpp"

namespace kdml {
namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("kdml_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
    return path(name);
  }

  int run(const std::vector<std::string>& args) {
    out_.str("");
    err_.str("");
    return cli::run(args, out_, err_);
  }

  std::string circles_csv(int n = 40, int seed = 1) {
    EXPECT_EQ(run({"gen-circles", "--n", std::to_string(n), "--seed", std::to_string(seed), "--out",
                   path("circles.csv")}),
              0);
    return path("circles.csv");
  }

  std::vector<std::string> train_args(const std::string& method, const std::string& data, const std::string& out,
                                      const std::string& dim = "2") {
    return {"train", "--method", method, "--data", data,  "--label", "label", "--gamma", "1",
            "--lambda", "10", "--rho", "0.1", "--dim", dim, "--sigma", "3", "--out", out};
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

std::string slurp(const std::string& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST_F(Cli, TrainOnToyFile) {
  const auto data = write("toy.csv", "x,y,label\n0,0,a\n1,0,b\n0,1,a\n");
  EXPECT_EQ(run(train_args("param", data, path("m.json"))), 0) << err_.str();
  EXPECT_TRUE(fs::exists(path("m.json")));
  EXPECT_NE(out_.str().find("objective="), std::string::npos);
  EXPECT_NE(out_.str().find("iterations="), std::string::npos);
  EXPECT_EQ(run(train_args("fixed", data, path("f.json"))), 0) << err_.str();
}

TEST_F(Cli, ExitCodes) {
  const auto data = circles_csv(20);
  auto args = train_args("param", data, path("m.json"));
  args[10] = "0";  // --lambda
  EXPECT_EQ(run(args), 1);
  EXPECT_NE(err_.str().find("lambda"), std::string::npos);
  EXPECT_EQ(run({"train", "--method", "param"}), 1);
  EXPECT_EQ(run({"frobnicate"}), 1);
  EXPECT_EQ(run(train_args("lmnn", data, path("m.json"))), 1);

  const auto bad = write("bad.csv", "x,label\n1,a\noops,b\n");
  EXPECT_EQ(run(train_args("param", bad, path("m.json"))), 2);
  EXPECT_EQ(run(train_args("param", path("missing.csv"), path("m.json"))), 2);

  args = train_args("fixed", data, path("m.json"));
  args[12] = "1e308";  // --rho
  EXPECT_EQ(run(args), 3);
}

TEST_F(Cli, EvalOnTrainingFileIsPerfectWithOneNeighbour) {
  const auto data = circles_csv(30);
  for (const std::string method : {"fixed", "param"}) {
    ASSERT_EQ(run(train_args(method, data, path("m.json"))), 0) << err_.str();
    ASSERT_EQ(run({"eval", "--model", path("m.json"), "--data", data, "--k", "1"}), 0) << err_.str();
    EXPECT_NE(out_.str().find("accuracy=1\n"), std::string::npos) << out_.str();
  }
  ASSERT_EQ(run({"eval", "--model", path("m.json"), "--data", data, "--k", "1", "--baseline"}), 0);
  EXPECT_NE(out_.str().find("Euclidean"), std::string::npos);
  EXPECT_EQ(run({"eval", "--model", path("m.json"), "--data", data, "--k", "31"}), 1);
}

TEST_F(Cli, EvalRejectsWrongFeatureCountAndUnknownClass) {
  const auto data = circles_csv(20);
  ASSERT_EQ(run(train_args("param", data, path("m.json"))), 0);
  const auto narrow = write("narrow.csv", "x,label\n1,inner\n2,outer\n");
  EXPECT_EQ(run({"eval", "--model", path("m.json"), "--data", narrow, "--k", "1"}), 2);
  const auto alien = write("alien.csv", "x,y,n1,n2,label\n1,2,3,4,middle\n");
  EXPECT_EQ(run({"eval", "--model", path("m.json"), "--data", alien, "--k", "1"}), 2);
}

TEST_F(Cli, TrainingIsDeterministic) {
  const auto data = circles_csv(30);
  for (const std::string method : {"fixed", "param"}) {
    ASSERT_EQ(run(train_args(method, data, path("a.json"))), 0);
    ASSERT_EQ(run(train_args(method, data, path("b.json"))), 0);
    EXPECT_EQ(ModelFile::load(path("a.json")).parameters_json(), ModelFile::load(path("b.json")).parameters_json());
    EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
  }
}

TEST_F(Cli, ModelFileRoundTripPreservesDistances) {
  const Dataset raw = data::make_circles(30, 2);
  std::mt19937_64 rng(3);
  const RowMatrix probes = oracle::random_points(rng, 40, raw.dim());
  HyperParams p;
  p.lambda = 10;
  p.rho = 0.1;
  p.sigma = 3;
  for (Method method : {Method::fixed, Method::param}) {
    const ModelFile original = train_model_file(method, raw, p, 1);
    original.save(path("m.json"));
    const ModelFile loaded = ModelFile::load(path("m.json"));
    for (Eigen::Index i = 0; i + 1 < probes.rows(); ++i) {
      const double a = original.distance(row_view(probes, i), row_view(probes, i + 1));
      const double b = loaded.distance(row_view(probes, i), row_view(probes, i + 1));
      EXPECT_NEAR(a, b, 1e-12 * (1.0 + a));
    }
    EXPECT_EQ(loaded.class_names, original.class_names);
    EXPECT_EQ(loaded.train_labels, original.train_labels);
  }
}

TEST_F(Cli, ModelFileRejectsOtherVersions) {
  const Dataset raw = data::make_circles(12, 2);
  HyperParams p;
  p.lambda = 10;
  p.rho = 0.1;
  std::string text = train_model_file(Method::param, raw, p, 1).to_json();
  const std::regex version("\"format_version\"\\s*:\\s*1");
  ASSERT_TRUE(std::regex_search(text, version));
  text = std::regex_replace(text, version, "\"format_version\": 2");
  EXPECT_THROW(ModelFile::from_json(text), DataError);
  EXPECT_THROW(ModelFile::from_json("{not json"), DataError);
}

std::vector<std::vector<std::string>> read_rows(const std::string& p) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream s(line);
    std::string cell;
    while (std::getline(s, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

TEST_F(Cli, EmbedWritesExactCoordinates) {
  const auto data = circles_csv(24);
  ASSERT_EQ(run(train_args("param", data, path("m.json"))), 0);
  ASSERT_EQ(run({"embed", "--model", path("m.json"), "--data", data, "--out", path("e.csv")}), 0) << err_.str();
  const auto rows = read_rows(path("e.csv"));
  ASSERT_EQ(rows.size(), 25u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"index", "y1", "y2", "label"}));

  const ModelFile model = ModelFile::load(path("m.json"));
  const Dataset raw = data::load_csv(data, "label");
  const RowMatrix mapped = model.map_points(model.standardization.apply(raw.features));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i - 1);
    EXPECT_EQ(rows[i][0], std::to_string(r));
    EXPECT_EQ(std::stod(rows[i][1]), mapped(r, 0));
    EXPECT_EQ(std::stod(rows[i][2]), mapped(r, 1));
    EXPECT_EQ(rows[i][3], raw.class_names[static_cast<std::size_t>(raw.labels[i - 1] - 1)]);
  }
}

TEST_F(Cli, EmbedSvgHasOneColourPerClass) {
  std::ostringstream csv;
  csv << "x,y,label\n";
  std::mt19937_64 rng(4);
  const RowMatrix pts = oracle::random_points(rng, 32, 2);
  const char* names[] = {"n", "e", "s", "w"};
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    csv << pts(i, 0) + 3.0 * (i % 4 == 1) - 3.0 * (i % 4 == 3) << ',' << pts(i, 1) + 3.0 * (i % 4 == 0) -
               3.0 * (i % 4 == 2)
        << ',' << names[i % 4] << '\n';
  }
  const auto data = write("four.csv", csv.str());
  ASSERT_EQ(run(train_args("param", data, path("m.json"))), 0) << err_.str();
  ASSERT_EQ(run({"embed", "--model", path("m.json"), "--data", data, "--out", path("e.csv"), "--svg",
                 path("e.svg")}),
            0)
      << err_.str();
  const std::string svg = slurp(path("e.svg"));
  EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  const std::regex circle("<circle [^>]*fill=\"(#[0-9a-f]{6})\"");
  std::set<std::string> fills;
  int circles = 0;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), circle); it != std::sregex_iterator(); ++it) {
    fills.insert((*it)[1]);
    ++circles;
  }
  EXPECT_EQ(circles, 32);
  EXPECT_EQ(fills.size(), 4u);
  for (const auto& f : fills) {
    EXPECT_NE(std::find(svg::kPalette.begin(), svg::kPalette.end(), f), svg::kPalette.end());
  }
}

TEST_F(Cli, EmbedSvgNeedsTwoDimensions) {
  const auto data = circles_csv(20);
  ASSERT_EQ(run(train_args("param", data, path("m.json"), "3")), 0) << err_.str();
  EXPECT_EQ(run({"embed", "--model", path("m.json"), "--data", data, "--out", path("e.csv"), "--svg",
                 path("e.svg")}),
            1);
  EXPECT_EQ(run({"embed", "--model", path("m.json"), "--data", data, "--out", path("e.csv")}), 0);
}

TEST(GridConfig, ParsesListsCommentsAndDefaults) {
  const auto c = cli::parse_grid_config(
      "# toy\n data = d.csv\nlabel=label\nmethod=param\nruns=3\nlambda=1, 10 ,100\nk=1,3\ntrain-fraction=0.1\n");
  EXPECT_EQ(c.data, "d.csv");
  EXPECT_EQ(c.method, Method::param);
  EXPECT_EQ(c.runs, 3);
  EXPECT_EQ(c.grid.lambda, (std::vector<double>{1, 10, 100}));
  EXPECT_EQ(c.grid.k, (std::vector<int>{1, 3}));
  EXPECT_EQ(c.train_fraction, 0.1);
  EXPECT_EQ(c.folds, 3);
  EXPECT_EQ(c.seed, 1u);
}

TEST(GridConfig, Malformed) {
  const std::string base = "data=d.csv\nlabel=label\nmethod=param\n";
  EXPECT_THROW(cli::parse_grid_config(base), ConfigError);
  EXPECT_THROW(cli::parse_grid_config(base + "runs=two\n"), ConfigError);
  EXPECT_THROW(cli::parse_grid_config(base + "runs=1\nrhoo=1\n"), ConfigError);
  EXPECT_THROW(cli::parse_grid_config(base + "runs=1\nlambda=1,,2\n"), ConfigError);
  EXPECT_THROW(cli::parse_grid_config(base + "runs=1\nruns=2\n"), ConfigError);
  EXPECT_THROW(cli::parse_grid_config(base + "runs=1\nfolds=1\n"), ConfigError);
  EXPECT_THROW(cli::parse_grid_config(base + "runs=1\njust words\n"), ConfigError);
}

TEST_F(Cli, GridMissingRunsExitsOne) {
  const auto data = circles_csv(20);
  const auto config = write("g.cfg", "data=" + data + "\nlabel=label\nmethod=baseline\n");
  EXPECT_EQ(run({"grid", "--config", config}), 1);
  EXPECT_EQ(run({"grid", "--config", path("nope.cfg")}), 1);
}

TEST_F(Cli, GridSinglePointOneRun) {
  const auto data = circles_csv(30);
  const auto config = write("g.cfg", "data=" + data + "\nlabel=label\nmethod=param\nruns=1\nlambda=10\nrho=0.1\n");
  ASSERT_EQ(run({"grid", "--config", config}), 0) << err_.str();
  EXPECT_NE(out_.str().find("halfwidth=0\n"), std::string::npos) << out_.str();
}

TEST_F(Cli, GridMatchesInProcessEvaluation) {
  const auto data = circles_csv(40, 2);
  const auto config = write("g.cfg", "data=" + data +
                                         "\nlabel=label\nmethod=baseline\nruns=20\ntrain_fraction=0.1\nfolds=2\n"
                                         "k=1,3\nseed=5\n");
  ASSERT_EQ(run({"grid", "--config", config}), 0) << err_.str();
  const std::string printed = out_.str();
  const Dataset raw = data::load_csv(data, "label");
  HyperGrid grid;
  grid.k = {1, 3};
  const EvalReport report = grid_eval(raw, Method::baseline, grid, 20, 0.1, 2, 5);
  EXPECT_EQ(printed, cli::format_report(report, Method::baseline));
  ASSERT_EQ(run({"grid", "--config", config}), 0);
  EXPECT_EQ(out_.str(), printed);
}

}  // namespace
}  // namespace kdml
