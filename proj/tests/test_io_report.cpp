#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "ballcrit/report.hpp"
#include "ballcrit/solution_io.hpp"

using namespace ballcrit;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "ballcrit_io_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST(FormatDouble, SeventeenDigits) {
  EXPECT_EQ(format_double(std::sqrt(2.0)), "1.4142135623730951");
  EXPECT_EQ(format_double(0.0), "0");
  EXPECT_EQ(format_double(-2.5), "-2.5");
  for (double x : {M_PI, 1e-300, -7.123456789012345e12})
    EXPECT_EQ(std::strtod(format_double(x).c_str(), nullptr), x);
}

TEST(ExportSolution, ZeroOnTwoByTwo) {
  const auto path = scratch("zero.csv");
  export_solution(GridVector::zeros(GridShape(2, 2)), GridShape(2, 2), path.string());
  EXPECT_EQ(slurp(path), "i,j,u\n1,1,0\n2,1,0\n1,2,0\n2,2,0\n");
}

TEST(ExportSolution, RootTwoOnOneByOne) {
  const auto path = scratch("root2.csv");
  CriticalPoint cp;
  cp.point = GridVector(GridShape(1, 1), Eigen::VectorXd::Constant(1, std::sqrt(2.0)));
  export_solution(cp, GridShape(1, 1), path.string());
  EXPECT_EQ(slurp(path), "i,j,u\n1,1,1.4142135623730951\n");
}

TEST(ExportSolution, ShapeMismatchLeavesNoFile) {
  const auto path = scratch("mismatch.csv");
  fs::remove(path);
  EXPECT_THROW(export_solution(GridVector::zeros(GridShape(4, 1)), GridShape(2, 2), path.string()), ShapeMismatch);
  EXPECT_FALSE(fs::exists(path));
  EXPECT_FALSE(fs::exists(path.string() + ".tmp"));
}

TEST(ExportSolution, UnwritablePath) {
  EXPECT_THROW(export_solution(GridVector::zeros(GridShape(1, 1)), GridShape(1, 1), "/nonexistent_dir/x/u.csv"),
               IoError);
}

TEST(ReadVector, CsvAndPlainLists) {
  const auto csv = scratch("v.csv");
  GridVector u(GridShape(2, 1));
  u.values << 0.25, -3.0;
  export_solution(u, u.shape, csv.string());
  EXPECT_EQ(read_vector_file(csv.string(), GridShape(2, 1)).values, u.values);

  const auto plain = scratch("v.txt");
  std::ofstream(plain) << "# comment\n0.25, -3\n";
  EXPECT_EQ(read_vector_file(plain.string(), GridShape(2, 1)).values, u.values);

  std::ofstream(plain) << "1 2 3\n";
  EXPECT_THROW(read_vector_file(plain.string(), GridShape(2, 1)), IoError);
  std::ofstream(plain) << "1 abc\n";
  EXPECT_THROW(read_vector_file(plain.string(), GridShape(2, 1)), IoError);
  EXPECT_THROW(read_vector_file(scratch("missing.txt").string(), GridShape(2, 1)), IoError);
}

TEST(MatrixCsv, RowMajorFullPrecision) {
  Eigen::Matrix2d a;
  a << 4, -1, -1, 0.1;
  EXPECT_EQ(matrix_csv(a), "4,-1\n-1,0.10000000000000001\n");
}

TEST(Report, RoundTripsFullPipeline) {
  const GridProblem p(OperatorA(GridShape(2, 1)), Nonlinearity(PowerLaw{1.0, 4.0, 0.0}), 0.5);
  SolveReport r;
  r.command = "pipeline";
  r.config = nlohmann::json{{"problem", {{"m", 2}, {"n", 1}}}};
  r.constants = discrete_constants(p.op(), 1.0);
  LambdaRun run;
  run.lambda = 0.5;
  run.seed = 42;
  run.pipeline = three_point_pipeline(p, *r.constants);
  r.runs.push_back(run);
  r.hypotheses = check_all(Nonlinearity(PowerLaw{1.0, 2.0, 0.0}), HypothesisParams{}, 2);
  r.timing["total"] = 0.125;

  const std::string text = serialize_report(r);
  const SolveReport back = parse_report(text);
  EXPECT_EQ(serialize_report(back), text);
  ASSERT_EQ(back.runs.size(), 1u);
  const auto& pr = *back.runs[0].pipeline;
  EXPECT_EQ(pr.ball_min.point.values, run.pipeline->ball_min.point.values);
  EXPECT_EQ(pr.mountain_pass->value, run.pipeline->mountain_pass->value);
  EXPECT_EQ(pr.distinct_count, 3);
  EXPECT_EQ(back.timing.at("total"), 0.125);
}

TEST(Report, InfiniteLambdaStarIsNullWithFlag) {
  SolveReport r;
  LambdaStarResult ls;
  ls.beta = 0.0;
  ls.lambda_star = INFINITY;
  ls.maximizer = GridVector::zeros(GridShape(1, 1));
  r.lambda_star = ls;
  const nlohmann::json j = to_json_value(r);
  EXPECT_TRUE(j["lambda_star"]["lambda_star"].is_null());
  EXPECT_TRUE(j["lambda_star"]["lambda_star_infinite"].get<bool>());
  const SolveReport back = report_from_json(j);
  EXPECT_TRUE(std::isinf(back.lambda_star->lambda_star));
}

TEST(Report, RefinementRoundTrip) {
  SolveReport r;
  r.command = "refine";
  RefinementOptions o;
  r.refinement = refinement_study(RectDomain{1.0, 1.0, 0.25}, [](double, double) { return ScalarFamily(PowerLaw{}); },
                                  1.0, {0.25, 0.125}, o);
  const std::string text = serialize_report(r);
  EXPECT_EQ(serialize_report(parse_report(text)), text);
}

TEST(Report, TimingIsTheOnlyVaryingSection) {
  SolveReport a, b;
  a.command = b.command = "eigen";
  a.eigenvalues = b.eigenvalues = eigen_analytic(GridShape(2, 2));
  a.timing["total"] = 1.0;
  b.timing["total"] = 2.0;
  nlohmann::json ja = to_json_value(a), jb = to_json_value(b);
  EXPECT_NE(ja, jb);
  ja.erase("timing");
  jb.erase("timing");
  EXPECT_EQ(ja.dump(), jb.dump());
}
