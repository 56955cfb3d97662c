#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rqmc/errors.hpp"

namespace rqmc {

// Default digit count per coordinate: 32 in base 2, otherwise enough digits
// to fill 64 bits of resolution.
int default_precision(int base);

// b^e as double (exact while representable).
double power_double(int base, int exponent);

// Exact floor(x * b^k) for x in [0,1), computed on the binary expansion of x
// with integer arithmetic only. Requires k*log2(b) <= 63.
std::uint64_t digit_prefix(double x, int base, int k);

// Assembles sum_k digits[k] * b^-(k+1) into the nearest double. Exact when
// the base is 2 and there are at most 52 digits; otherwise correctly rounded
// to within an ulp (the extended-precision quotient of the exact integer
// numerator and b^E).
double value_from_digits(std::span<const std::uint8_t> digits, int base);

// van der Corput radical inverse: digits of i in base b, reversed across the
// radix point. Digits beyond `precision` positions are dropped.
double radical_inverse(std::uint64_t i, int base, int precision = 0);

// One E x E digit matrix per dimension over Z_b. Point i's coordinate j has
// digit vector (matrix_j * digits(i)) mod b with digits(i) least significant
// first.
class GeneratorMatrixSet {
public:
    GeneratorMatrixSet(int base, int dim, int precision,
                       std::vector<std::uint8_t> entries,
                       std::optional<int> declared_t = std::nullopt,
                       std::string provenance = {});

    int base() const { return base_; }
    int dim() const { return dim_; }
    int precision() const { return precision_; }
    std::optional<int> declared_t() const { return declared_t_; }
    const std::string& provenance() const { return provenance_; }

    // Entry (row r, column c) of dimension j's matrix; row r weights b^-(r+1).
    std::uint8_t entry(int j, int r, int c) const {
        return entries_[(static_cast<std::size_t>(j) * precision_ + r) * precision_ + c];
    }

    // Packed column c of dimension j (base 2 only): bit (E-1-r) holds row r.
    std::uint64_t packed_column(int j, int c) const {
        return packed_columns_[static_cast<std::size_t>(j) * precision_ + c];
    }

    // Largest index count representable in E digits (saturates at 2^64-1).
    std::uint64_t index_capacity() const { return index_capacity_; }

    // Digit vector of point i, coordinate j, most significant first.
    void point_digits(std::uint64_t i, int j, std::uint8_t* out) const;

private:
    int base_;
    int dim_;
    int precision_;
    std::optional<int> declared_t_;
    std::string provenance_;
    std::vector<std::uint8_t> entries_;         // dim x E x E, row-major
    std::vector<std::uint64_t> packed_columns_; // base 2 fast path
    std::uint64_t index_capacity_;
};

// Indices are emitted in natural order by default; Gray ordering permutes the
// visit order only, never the set of points.
enum class IndexOrder { natural, gray };

// A finite run of digital points with exact digit data and derived values.
class DigitalPointSet {
public:
    DigitalPointSet(int base, int dim, int precision, std::uint64_t index_start);

    int base() const { return base_; }
    int dim() const { return dim_; }
    int precision() const { return precision_; }
    std::uint64_t index_start() const { return index_start_; }
    std::size_t size() const { return count_; }

    double value(std::size_t p, int j) const { return values_[p * dim_ + j]; }
    std::span<const std::uint8_t> coord_digits(std::size_t p, int j) const {
        return {digits_.data() + (p * dim_ + j) * static_cast<std::size_t>(precision_),
                static_cast<std::size_t>(precision_)};
    }
    std::span<const double> point(std::size_t p) const {
        return {values_.data() + p * dim_, static_cast<std::size_t>(dim_)};
    }

    // First k digits of coordinate j as an integer in [0, b^k).
    std::uint64_t prefix(std::size_t p, int j, int k) const;

    // Appends a point given its digit block (dim x E, most significant first).
    void append(const std::uint8_t* digit_block);

    // Builds a set from plain coordinate values. Digits are recovered by exact
    // binary arithmetic, which is faithful only in base 2 with E <= 52;
    // with_digits=false leaves the digit store empty.
    static DigitalPointSet from_values(int base, int dim, int precision,
                                       const std::vector<double>& values,
                                       bool with_digits);

    bool has_digits() const { return !digits_.empty() || count_ == 0; }

private:
    int base_;
    int dim_;
    int precision_;
    std::uint64_t index_start_;
    std::size_t count_ = 0;
    std::vector<std::uint8_t> digits_;
    std::vector<double> values_;
};

// Generates `count` points starting at index i_start.
DigitalPointSet generate_points(const GeneratorMatrixSet& g, std::uint64_t i_start,
                                std::uint64_t count, IndexOrder order = IndexOrder::natural);

// Sobol' generator matrices from a Joe-Kuo format direction-number table
// ("d s a m_1..m_s" rows after a header line). Dimension 1 is the identity.
GeneratorMatrixSet sobol_matrices(std::istream& table, int dim, int precision = 0,
                                  std::string provenance = {});
GeneratorMatrixSet sobol_matrices_from_file(const std::string& path, int dim, int precision = 0);
// Built-in table (Joe-Kuo format, dimensions 2..16).
GeneratorMatrixSet default_sobol_matrices(int dim, int precision = 0);
const std::string& builtin_sobol_table();

// Row in a parsed direction-number table.
struct DirectionRow {
    int dimension;
    int degree;            // s
    std::uint32_t poly;    // a: middle coefficients of the primitive polynomial
    std::vector<std::uint32_t> initial;  // m_1..m_s, odd
};
std::vector<DirectionRow> parse_direction_table(std::istream& in);

// Faure matrices: dimension j uses the (j-1)-th power of the upper-triangular
// Pascal matrix mod b. Requires b prime and d <= b.
GeneratorMatrixSet faure_matrices(int base, int dim, int precision = 0);

// Elementary interval prod_j [c_j/b^(k_j), (c_j+1)/b^(k_j)).
struct ElementaryInterval {
    int base;
    std::vector<int> k;
    std::vector<std::uint64_t> c;
};

// Exact volume b^-|k| as a (base, exponent) pair.
struct IntervalVolume {
    int base;
    int exponent;  // |k|
    double value() const { return 1.0 / power_double(base, exponent); }
};
IntervalVolume interval_volume(const ElementaryInterval& e);

// Cell coordinates c_j = floor(x_j * b^k_j) of a point (exact digit
// arithmetic on the binary expansion of each coordinate).
std::vector<std::uint64_t> locate(std::span<const double> x, std::span<const int> k, int base);

// Membership in the half-open box; consistent with locate by construction.
bool interval_contains(const ElementaryInterval& e, std::span<const double> x);

} // namespace rqmc
