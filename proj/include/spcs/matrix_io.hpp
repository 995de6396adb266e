#ifndef SPCS_MATRIX_IO_HPP_
#define SPCS_MATRIX_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "spcs/types.hpp"

namespace spcs {

// Text form: one matrix row per line, comma separated, each number in the
// shortest form that reads back bit-exactly; complex entries are written
// "a+bi" / "a-bi".
//
// Binary form ("PCSM"): a 16-byte little-endian header
//   bytes 0..3   magic "PCSM"
//   bytes 4..5   uint16 version (1)
//   bytes 6..7   uint16 dtype (1 = float64 real, 2 = complex128)
//   bytes 8..11  uint32 rows m
//   bytes 12..15 uint32 cols n
// followed by m*n entries in column-major order (complex as re, im pairs).

enum class DType : std::uint16_t { real64 = 1, complex128 = 2 };

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename Scalar>
void write_csv(std::ostream& os, const Matrix<Scalar>& M);
template <typename Scalar>
Matrix<Scalar> read_csv(std::istream& is);

template <typename Scalar>
void write_binary(std::ostream& os, const Matrix<Scalar>& M);
template <typename Scalar>
Matrix<Scalar> read_binary(std::istream& is);

/// Reads only the header; throws IoError on bad magic/version.
DType peek_binary_dtype(std::istream& is);

template <typename Scalar>
void save_matrix(const std::filesystem::path& path, const Matrix<Scalar>& M);
template <typename Scalar>
Matrix<Scalar> load_matrix(const std::filesystem::path& path);

/// Parses "a", "a+bi", "a-bi", "bi" (also accepts a trailing j).
cplx parse_complex(const std::string& token);
std::string format_scalar(double v);
std::string format_scalar(const cplx& v);

}  // namespace spcs

#endif  // SPCS_MATRIX_IO_HPP_
