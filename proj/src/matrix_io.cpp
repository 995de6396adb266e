#include "spcs/matrix_io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace spcs {

namespace {

constexpr std::array<char, 4> kMagic = {'P', 'C', 'S', 'M'};
constexpr std::uint16_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "binary matrix format assumes a little-endian host");

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw IoError("binary matrix: truncated stream");
  return v;
}

double parse_double(std::string_view s) {
  // std::from_chars rejects a leading '+'.
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw IoError("cannot parse number '" + std::string(s) + "'");
  return v;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename Scalar>
constexpr DType dtype_of() {
  return is_complex_v<Scalar> ? DType::complex128 : DType::real64;
}

}  // namespace

std::string format_scalar(double v) {
  char buf[64];
  // Shortest representation that round-trips exactly.
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string format_scalar(const cplx& v) {
  std::string out = format_scalar(v.real());
  const double im = v.imag();
  if (std::signbit(im)) {
    out += "-" + format_scalar(-im);
  } else {
    out += "+" + format_scalar(im);
  }
  return out + "i";
}

cplx parse_complex(const std::string& token) {
  const std::string t = trim(token);
  if (t.empty()) throw IoError("empty matrix entry");
  const char last = t.back();
  if (last != 'i' && last != 'j') return {parse_double(t), 0.0};
  const std::string body = t.substr(0, t.size() - 1);
  // Split at the last sign that is not part of an exponent.
  std::size_t split = std::string::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  if (split == std::string::npos) {
    if (body.empty() || body == "+") return {0.0, 1.0};
    if (body == "-") return {0.0, -1.0};
    return {0.0, parse_double(body)};
  }
  const std::string re = body.substr(0, split);
  std::string im = body.substr(split);
  if (im == "+") im = "1";
  if (im == "-") im = "-1";
  return {parse_double(re), parse_double(im)};
}

template <typename Scalar>
void write_csv(std::ostream& os, const Matrix<Scalar>& M) {
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      if (j) os << ',';
      os << format_scalar(M(i, j));
    }
    os << '\n';
  }
  if (!os) throw IoError("csv matrix: write failed");
}

template <typename Scalar>
Matrix<Scalar> read_csv(std::istream& is) {
  std::vector<std::vector<Scalar>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (trim(line).empty()) continue;
    std::vector<Scalar> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const cplx v = parse_complex(cell);
      if constexpr (is_complex_v<Scalar>) {
        row.push_back(v);
      } else {
        if (v.imag() != 0.0) throw IoError("csv matrix: complex entry in real matrix");
        row.push_back(v.real());
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw IoError("csv matrix: ragged rows");
    rows.push_back(std::move(row));
  }
  const auto m = static_cast<Eigen::Index>(rows.size());
  const auto n = m ? static_cast<Eigen::Index>(rows.front().size()) : 0;
  Matrix<Scalar> M(m, n);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      M(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return M;
}

template <typename Scalar>
void write_binary(std::ostream& os, const Matrix<Scalar>& M) {
  os.write(kMagic.data(), kMagic.size());
  put<std::uint16_t>(os, kVersion);
  put<std::uint16_t>(os, static_cast<std::uint16_t>(dtype_of<Scalar>()));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(M.rows()));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(M.cols()));
  for (Eigen::Index j = 0; j < M.cols(); ++j)
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
      if constexpr (is_complex_v<Scalar>) {
        put<double>(os, M(i, j).real());
        put<double>(os, M(i, j).imag());
      } else {
        put<double>(os, M(i, j));
      }
    }
  if (!os) throw IoError("binary matrix: write failed");
}

DType peek_binary_dtype(std::istream& is) {
  std::array<char, 4> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kMagic) throw IoError("binary matrix: bad magic");
  if (get<std::uint16_t>(is) != kVersion) throw IoError("binary matrix: unsupported version");
  const auto dtype = get<std::uint16_t>(is);
  if (dtype != 1 && dtype != 2) throw IoError("binary matrix: unknown dtype");
  return static_cast<DType>(dtype);
}

template <typename Scalar>
Matrix<Scalar> read_binary(std::istream& is) {
  if (peek_binary_dtype(is) != dtype_of<Scalar>())
    throw IoError("binary matrix: dtype does not match requested scalar type");
  const auto m = get<std::uint32_t>(is);
  const auto n = get<std::uint32_t>(is);
  Matrix<Scalar> M(m, n);
  for (Eigen::Index j = 0; j < M.cols(); ++j)
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
      if constexpr (is_complex_v<Scalar>) {
        const double re = get<double>(is);
        const double im = get<double>(is);
        M(i, j) = Scalar(re, im);
      } else {
        M(i, j) = get<double>(is);
      }
    }
  return M;
}

template <typename Scalar>
void save_matrix(const std::filesystem::path& path, const Matrix<Scalar>& M) {
  const bool binary = path.extension() == ".pcsm" || path.extension() == ".bin";
  std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  try {
    if (binary) {
      write_binary(os, M);
    } else {
      write_csv(os, M);
    }
  } catch (const IoError& err) {
    throw IoError(path.string() + ": " + err.what());
  }
}

template <typename Scalar>
Matrix<Scalar> load_matrix(const std::filesystem::path& path) {
  const bool binary = path.extension() == ".pcsm" || path.extension() == ".bin";
  std::ifstream is(path, binary ? std::ios::binary : std::ios::in);
  if (!is) throw IoError("cannot open '" + path.string() + "' for reading");
  try {
    return binary ? read_binary<Scalar>(is) : read_csv<Scalar>(is);
  } catch (const IoError& err) {
    throw IoError(path.string() + ": " + err.what());
  }
}

#define SPCS_INSTANTIATE_IO(S)                                              \
  template void write_csv<S>(std::ostream&, const Matrix<S>&);              \
  template Matrix<S> read_csv<S>(std::istream&);                            \
  template void write_binary<S>(std::ostream&, const Matrix<S>&);           \
  template Matrix<S> read_binary<S>(std::istream&);                         \
  template void save_matrix<S>(const std::filesystem::path&, const Matrix<S>&); \
  template Matrix<S> load_matrix<S>(const std::filesystem::path&);

SPCS_INSTANTIATE_IO(double)
SPCS_INSTANTIATE_IO(cplx)

#undef SPCS_INSTANTIATE_IO

}  // namespace spcs
