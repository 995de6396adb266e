#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "spcs/matrix_io.hpp"

namespace spcs {
namespace {

namespace fs = std::filesystem;

fs::path temp_path(const std::string& name) {
  return fs::temp_directory_path() / ("spcs_io_" + std::to_string(::getpid()) + "_" + name);
}

TEST(ParseComplex, Forms) {
  EXPECT_EQ(parse_complex("1.5"), cplx(1.5, 0));
  EXPECT_EQ(parse_complex("1.5+2i"), cplx(1.5, 2));
  EXPECT_EQ(parse_complex("-1e-3-2.5e+2i"), cplx(-1e-3, -250));
  EXPECT_EQ(parse_complex("3i"), cplx(0, 3));
  EXPECT_EQ(parse_complex("-i"), cplx(0, -1));
  EXPECT_EQ(parse_complex(" 2-j "), cplx(2, -1));
  EXPECT_THROW(parse_complex("abc"), IoError);
  EXPECT_THROW(parse_complex(""), IoError);
}

TEST(FormatScalar, RoundTripsExactly) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 1e300, 0.0}) {
    EXPECT_EQ(parse_complex(format_scalar(v)).real(), v);
  }
  const cplx c(0.1, -1.0 / 7.0);
  EXPECT_EQ(parse_complex(format_scalar(c)), c);
}

TEST(Csv, RealRoundTrip) {
  const MatrixXd M = MatrixXd::Random(4, 3);
  std::stringstream ss;
  write_csv(ss, M);
  EXPECT_TRUE(read_csv<double>(ss) == M);
}

TEST(Csv, ComplexRoundTrip) {
  const MatrixXc M = MatrixXc::Random(3, 5);
  std::stringstream ss;
  write_csv(ss, M);
  EXPECT_NE(ss.str().find('i'), std::string::npos);
  EXPECT_TRUE(read_csv<cplx>(ss) == M);
}

TEST(Csv, RejectsRaggedRowsAndComplexIntoReal) {
  std::stringstream ragged("1,2\n3\n");
  EXPECT_THROW(read_csv<double>(ragged), IoError);
  std::stringstream cx("1+2i\n");
  EXPECT_THROW(read_csv<double>(cx), IoError);
}

TEST(Binary, HeaderLayout) {
  MatrixXd M(2, 3);
  M << 1, 2, 3, 4, 5, 6;
  std::stringstream ss;
  write_binary(ss, M);
  const std::string bytes = ss.str();
  ASSERT_EQ(bytes.size(), 16u + 6u * 8u);
  EXPECT_EQ(bytes.substr(0, 4), "PCSM");
  EXPECT_EQ(bytes[4], 1);
  EXPECT_EQ(bytes[6], 1);
  EXPECT_EQ(bytes[8], 2);
  EXPECT_EQ(bytes[12], 3);
  double second = 0;
  std::memcpy(&second, bytes.data() + 16 + 8, 8);
  EXPECT_EQ(second, 4.0);  // column-major
}

TEST(Binary, RoundTripAndDtypeCheck) {
  const MatrixXc M = MatrixXc::Random(3, 2);
  std::stringstream ss;
  write_binary(ss, M);
  EXPECT_TRUE(read_binary<cplx>(ss) == M);
  std::stringstream again;
  write_binary(again, M);
  EXPECT_THROW(read_binary<double>(again), IoError);
  std::stringstream bad("XXXX0000");
  EXPECT_THROW(read_binary<double>(bad), IoError);
}

TEST(Binary, TruncatedStream) {
  std::stringstream ss;
  write_binary<double>(ss, MatrixXd::Ones(4, 4));
  std::stringstream cut(ss.str().substr(0, 40));
  EXPECT_THROW(read_binary<double>(cut), IoError);
}

TEST(Files, ExtensionSelectsFormat) {
  const MatrixXd M = MatrixXd::Random(5, 2);
  const fs::path csv = temp_path("m.csv"), bin = temp_path("m.pcsm");
  save_matrix(csv, M);
  save_matrix(bin, M);
  EXPECT_TRUE(load_matrix<double>(csv) == M);
  EXPECT_TRUE(load_matrix<double>(bin) == M);
  std::ifstream is(bin, std::ios::binary);
  EXPECT_EQ(peek_binary_dtype(is), DType::real64);
  fs::remove(csv);
  fs::remove(bin);
}

TEST(Files, ErrorsCarryPath) {
  try {
    load_matrix<double>("/nonexistent/dir/m.csv");
    FAIL();
  } catch (const IoError& err) {
    EXPECT_NE(std::string(err.what()).find("/nonexistent/dir/m.csv"), std::string::npos);
  }
}

}  // namespace
}  // namespace spcs
