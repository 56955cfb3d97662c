#include "rqmc/netgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

namespace rqmc {

namespace {

using u128 = unsigned __int128;

constexpr u128 kOne128 = 1;

// b^e as a 128-bit integer; throws if it would not fit.
u128 ipow128(int base, int exponent) {
    u128 p = 1;
    for (int i = 0; i < exponent; ++i) {
        if (p > (~static_cast<u128>(0)) / static_cast<unsigned>(base))
            throw limit_error("power overflows 128 bits");
        p *= static_cast<unsigned>(base);
    }
    return p;
}

void check_base(int base) {
    if (base < 2 || base > 36) throw config_error("base must be in [2,36]");
}

void check_precision(int base, int precision) {
    if (precision < 1 || precision > 64)
        throw config_error("precision must be in [1,64]");
    // b^E must fit 128 bits so digit blocks can be assembled exactly
    ipow128(base, precision);
}

bool is_prime(int n) {
    if (n < 2) return false;
    for (int p = 2; p * p <= n; ++p)
        if (n % p == 0) return false;
    return true;
}

} // namespace

int default_precision(int base) {
    check_base(base);
    if (base == 2) return 32;
    // smallest E with b^E >= 2^64
    u128 p = 1;
    int e = 0;
    const u128 target = kOne128 << 64;
    while (p < target) {
        p *= static_cast<unsigned>(base);
        ++e;
    }
    return e;
}

double power_double(int base, int exponent) {
    check_base(base);
    if (exponent < 0) throw config_error("power_double: negative exponent");
    if (exponent <= 64) {
        bool fits = true;
        u128 p = 1;
        for (int i = 0; i < exponent && fits; ++i) {
            if (p > (~static_cast<u128>(0)) / static_cast<unsigned>(base)) fits = false;
            else p *= static_cast<unsigned>(base);
        }
        if (fits) return static_cast<double>(static_cast<long double>(p));
    }
    long double acc = 1.0L;
    for (int i = 0; i < exponent; ++i) acc *= base;
    return static_cast<double>(acc);
}

std::uint64_t digit_prefix(double x, int base, int k) {
    check_base(base);
    if (!(x >= 0.0 && x < 1.0)) throw config_error("digit_prefix: x must lie in [0,1)");
    if (k < 0) throw config_error("digit_prefix: negative k");
    if (k == 0 || x == 0.0) return 0;
    u128 bk = 1;
    for (int i = 0; i < k; ++i) {
        bk *= static_cast<unsigned>(base);
        if (bk > (kOne128 << 63)) throw limit_error("digit_prefix: b^k exceeds 63 bits");
    }
    // x = m * 2^(e-53) with m an integer < 2^53, so floor(x*b^k) is an exact
    // integer shift of m*b^k.
    int e = 0;
    const double mant = std::frexp(x, &e);
    const auto m = static_cast<std::uint64_t>(std::ldexp(mant, 53));
    const int shift = 53 - e;  // >= 53 since x < 1
    const u128 prod = static_cast<u128>(m) * bk;
    if (shift >= 128) return 0;
    return static_cast<std::uint64_t>(prod >> shift);
}

double value_from_digits(std::span<const std::uint8_t> digits, int base) {
    check_base(base);
    check_precision(base, static_cast<int>(digits.size()));
    u128 num = 0;
    for (const std::uint8_t d : digits) {
        if (d >= base) throw config_error("value_from_digits: digit out of range");
        num = num * static_cast<unsigned>(base) + d;
    }
    const u128 den = ipow128(base, static_cast<int>(digits.size()));
    return static_cast<double>(static_cast<long double>(num) / static_cast<long double>(den));
}

double radical_inverse(std::uint64_t i, int base, int precision) {
    check_base(base);
    if (precision == 0) precision = default_precision(base);
    check_precision(base, precision);
    std::uint8_t digits[64] = {};
    int pos = 0;
    while (i != 0 && pos < precision) {
        digits[pos++] = static_cast<std::uint8_t>(i % static_cast<unsigned>(base));
        i /= static_cast<unsigned>(base);
    }
    // digits of i past position E would land below b^-E and are dropped
    return value_from_digits({digits, static_cast<std::size_t>(precision)}, base);
}

GeneratorMatrixSet::GeneratorMatrixSet(int base, int dim, int precision,
                                       std::vector<std::uint8_t> entries,
                                       std::optional<int> declared_t,
                                       std::string provenance)
    : base_(base), dim_(dim), precision_(precision), declared_t_(declared_t),
      provenance_(std::move(provenance)), entries_(std::move(entries)) {
    check_base(base_);
    check_precision(base_, precision_);
    if (dim_ < 1) throw config_error("GeneratorMatrixSet: dim must be >= 1");
    const std::size_t expect = static_cast<std::size_t>(dim_) * precision_ * precision_;
    if (entries_.size() != expect)
        throw config_error("GeneratorMatrixSet: entry count mismatch");
    for (const std::uint8_t v : entries_)
        if (v >= base_) throw config_error("GeneratorMatrixSet: entry not a base-b digit");
    if (declared_t_ && *declared_t_ < 0)
        throw config_error("GeneratorMatrixSet: negative declared t");

    u128 cap = 1;
    bool saturated = false;
    for (int e = 0; e < precision_ && !saturated; ++e) {
        cap *= static_cast<unsigned>(base_);
        if (cap >= (kOne128 << 64)) saturated = true;
    }
    index_capacity_ = saturated ? ~0ull : static_cast<std::uint64_t>(cap);

    if (base_ == 2) {
        packed_columns_.assign(static_cast<std::size_t>(dim_) * precision_, 0);
        for (int j = 0; j < dim_; ++j)
            for (int c = 0; c < precision_; ++c) {
                std::uint64_t word = 0;
                for (int r = 0; r < precision_; ++r)
                    if (entry(j, r, c))
                        word |= 1ull << (precision_ - 1 - r);
                packed_columns_[static_cast<std::size_t>(j) * precision_ + c] = word;
            }
    }
}

void GeneratorMatrixSet::point_digits(std::uint64_t i, int j, std::uint8_t* out) const {
    if (base_ == 2) {
        std::uint64_t y = 0;
        std::uint64_t rest = i;
        int q = 0;
        while (rest != 0) {
            if (q >= precision_) throw limit_error("point index exceeds precision E");
            if (rest & 1u) y ^= packed_column(j, q);
            rest >>= 1;
            ++q;
        }
        for (int r = 0; r < precision_; ++r)
            out[r] = static_cast<std::uint8_t>((y >> (precision_ - 1 - r)) & 1u);
        return;
    }
    std::uint8_t a[64];
    int nz[64];
    int nnz = 0;
    std::uint64_t rest = i;
    int q = 0;
    while (rest != 0) {
        if (q >= precision_) throw limit_error("point index exceeds precision E");
        const auto d = static_cast<std::uint8_t>(rest % static_cast<unsigned>(base_));
        rest /= static_cast<unsigned>(base_);
        a[q] = d;
        if (d != 0) nz[nnz++] = q;
        ++q;
    }
    for (int r = 0; r < precision_; ++r) {
        unsigned acc = 0;
        for (int t = 0; t < nnz; ++t) acc += entry(j, r, nz[t]) * a[nz[t]];
        out[r] = static_cast<std::uint8_t>(acc % static_cast<unsigned>(base_));
    }
}

DigitalPointSet::DigitalPointSet(int base, int dim, int precision, std::uint64_t index_start)
    : base_(base), dim_(dim), precision_(precision), index_start_(index_start) {
    check_base(base_);
    check_precision(base_, precision_);
    if (dim_ < 1) throw config_error("DigitalPointSet: dim must be >= 1");
}

std::uint64_t DigitalPointSet::prefix(std::size_t p, int j, int k) const {
    if (k < 0 || k > precision_) throw config_error("prefix: depth out of range");
    const auto d = coord_digits(p, j);
    std::uint64_t acc = 0;
    for (int t = 0; t < k; ++t) acc = acc * static_cast<unsigned>(base_) + d[t];
    return acc;
}

void DigitalPointSet::append(const std::uint8_t* digit_block) {
    const std::size_t stride = static_cast<std::size_t>(dim_) * precision_;
    digits_.insert(digits_.end(), digit_block, digit_block + stride);
    for (int j = 0; j < dim_; ++j)
        values_.push_back(value_from_digits(
            {digit_block + static_cast<std::size_t>(j) * precision_,
             static_cast<std::size_t>(precision_)},
            base_));
    ++count_;
}

DigitalPointSet DigitalPointSet::from_values(int base, int dim, int precision,
                                             const std::vector<double>& values,
                                             bool with_digits) {
    DigitalPointSet set(base, dim, precision, 0);
    if (values.size() % static_cast<std::size_t>(dim) != 0)
        throw config_error("from_values: value count not divisible by dim");
    const std::size_t n = values.size() / static_cast<std::size_t>(dim);
    set.values_ = values;
    for (const double v : values)
        if (!(v >= 0.0 && v < 1.0)) throw config_error("from_values: coordinate outside [0,1)");
    set.count_ = n;
    if (with_digits) {
        set.digits_.resize(values.size() * static_cast<std::size_t>(precision));
        for (std::size_t p = 0; p < n; ++p)
            for (int j = 0; j < dim; ++j) {
                std::uint64_t code = digit_prefix(values[p * dim + j], base, precision);
                std::uint8_t* out =
                    set.digits_.data() + (p * dim + j) * static_cast<std::size_t>(precision);
                for (int t = precision - 1; t >= 0; --t) {
                    out[t] = static_cast<std::uint8_t>(code % static_cast<unsigned>(base));
                    code /= static_cast<unsigned>(base);
                }
            }
    }
    return set;
}

DigitalPointSet generate_points(const GeneratorMatrixSet& g, std::uint64_t i_start,
                                std::uint64_t count, IndexOrder order) {
    const std::uint64_t cap = g.index_capacity();
    if (i_start > cap || count > cap - i_start)
        throw limit_error("generate_points: index range exceeds b^E points");
    if (order == IndexOrder::gray && count != 0 && (count & (count - 1)) != 0)
        throw config_error("generate_points: gray order needs a power-of-two count");
    DigitalPointSet set(g.base(), g.dim(), g.precision(), i_start);
    std::vector<std::uint8_t> block(static_cast<std::size_t>(g.dim()) * g.precision());
    for (std::uint64_t t = 0; t < count; ++t) {
        const std::uint64_t offset = (order == IndexOrder::gray) ? (t ^ (t >> 1)) : t;
        const std::uint64_t i = i_start + offset;
        for (int j = 0; j < g.dim(); ++j)
            g.point_digits(i, j, block.data() + static_cast<std::size_t>(j) * g.precision());
        set.append(block.data());
    }
    return set;
}

std::vector<DirectionRow> parse_direction_table(std::istream& in) {
    std::vector<DirectionRow> rows;
    std::string line;
    std::size_t lineno = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        long long d = 0, s = 0, a = 0;
        if (!(ls >> d)) {
            if (first) { first = false; continue; }  // header line
            // skip blank lines silently
            std::istringstream probe(line);
            std::string tok;
            if (!(probe >> tok)) continue;
            throw parse_error("direction table line " + std::to_string(lineno) +
                              ": expected integer dimension");
        }
        if (first && !(ls >> s >> a)) {
            // a lone token on line one is a header we failed to reject above
            throw parse_error("direction table line 1: malformed row");
        }
        if (first) {
            first = false;
        } else if (!(ls >> s >> a)) {
            throw parse_error("direction table line " + std::to_string(lineno) +
                              ": expected 'd s a m_1..m_s'");
        }
        DirectionRow row;
        if (d < 2) throw parse_error("direction table line " + std::to_string(lineno) +
                                     ": dimension must be >= 2");
        if (s < 1 || s > 31)
            throw parse_error("direction table line " + std::to_string(lineno) +
                              ": degree out of range");
        if (a < 0 || (s > 1 && a >= (1ll << (s - 1))) || (s == 1 && a != 0))
            throw parse_error("direction table line " + std::to_string(lineno) +
                              ": polynomial code out of range for degree");
        row.dimension = static_cast<int>(d);
        row.degree = static_cast<int>(s);
        row.poly = static_cast<std::uint32_t>(a);
        for (int t = 1; t <= s; ++t) {
            long long m = 0;
            if (!(ls >> m))
                throw parse_error("direction table line " + std::to_string(lineno) +
                                  ": expected " + std::to_string(s) + " initial values");
            if (m < 1 || m % 2 == 0)
                throw parse_error("direction table line " + std::to_string(lineno) +
                                  ": initial values must be odd and positive");
            if (m >= (1ll << t))
                throw parse_error("direction table line " + std::to_string(lineno) +
                                  ": initial value m_" + std::to_string(t) + " must be < 2^" +
                                  std::to_string(t));
            row.initial.push_back(static_cast<std::uint32_t>(m));
        }
        long long extra = 0;
        if (ls >> extra)
            throw parse_error("direction table line " + std::to_string(lineno) +
                              ": trailing tokens after m_" + std::to_string(s));
        rows.push_back(std::move(row));
    }
    return rows;
}

GeneratorMatrixSet sobol_matrices(std::istream& table, int dim, int precision,
                                  std::string provenance) {
    if (dim < 1) throw config_error("sobol_matrices: dim must be >= 1");
    if (precision == 0) precision = default_precision(2);
    check_precision(2, precision);
    const auto rows = parse_direction_table(table);
    std::vector<const DirectionRow*> by_dim(static_cast<std::size_t>(dim) + 1, nullptr);
    for (const auto& r : rows)
        if (r.dimension <= dim) by_dim[static_cast<std::size_t>(r.dimension)] = &r;
    for (int j = 2; j <= dim; ++j)
        if (by_dim[static_cast<std::size_t>(j)] == nullptr)
            throw parse_error("direction table has no row for dimension " + std::to_string(j));

    const int E = precision;
    std::vector<std::uint8_t> entries(static_cast<std::size_t>(dim) * E * E, 0);
    auto at = [&](int j, int r, int c) -> std::uint8_t& {
        return entries[(static_cast<std::size_t>(j) * E + r) * E + c];
    };
    for (int r = 0; r < E; ++r) at(0, r, r) = 1;  // dimension 1: van der Corput
    for (int j = 2; j <= dim; ++j) {
        const DirectionRow& row = *by_dim[static_cast<std::size_t>(j)];
        const int s = row.degree;
        std::vector<std::uint64_t> m(static_cast<std::size_t>(E) + 1, 0);
        for (int t = 1; t <= std::min(s, E); ++t) m[static_cast<std::size_t>(t)] = row.initial[t - 1];
        for (int i = s + 1; i <= E; ++i) {
            std::uint64_t v = m[static_cast<std::size_t>(i - s)] ^
                              (m[static_cast<std::size_t>(i - s)] << s);
            for (int t = 1; t <= s - 1; ++t)
                if ((row.poly >> (s - 1 - t)) & 1u) v ^= m[static_cast<std::size_t>(i - t)] << t;
            m[static_cast<std::size_t>(i)] = v;
        }
        for (int c = 0; c < E; ++c) {
            const std::uint64_t mc = m[static_cast<std::size_t>(c) + 1];
            for (int r = 0; r <= c; ++r)
                at(j - 1, r, c) = static_cast<std::uint8_t>((mc >> (c - r)) & 1u);
        }
    }
    return {2, dim, E, std::move(entries), std::nullopt, std::move(provenance)};
}

GeneratorMatrixSet sobol_matrices_from_file(const std::string& path, int dim, int precision) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open direction table: " + path);
    return sobol_matrices(in, dim, precision, path);
}

GeneratorMatrixSet default_sobol_matrices(int dim, int precision) {
    std::istringstream in(builtin_sobol_table());
    return sobol_matrices(in, dim, precision, "builtin");
}

GeneratorMatrixSet faure_matrices(int base, int dim, int precision) {
    check_base(base);
    if (!is_prime(base)) throw config_error("faure_matrices: base must be prime");
    if (dim < 1 || dim > base)
        throw config_error("faure_matrices: need 1 <= dim <= base");
    if (precision == 0) precision = default_precision(base);
    check_precision(base, precision);
    const int E = precision;
    const auto b = static_cast<unsigned>(base);

    // upper-triangular Pascal matrix mod b: P[r][c] = C(c, r)
    std::vector<std::uint8_t> pascal(static_cast<std::size_t>(E) * E, 0);
    auto pas = [&](int r, int c) -> std::uint8_t& {
        return pascal[static_cast<std::size_t>(r) * E + c];
    };
    for (int c = 0; c < E; ++c) {
        pas(0, c) = 1;
        for (int r = 1; r <= c; ++r)
            pas(r, c) = static_cast<std::uint8_t>(
                (pas(r - 1, c - 1) + (r <= c - 1 ? pas(r, c - 1) : 0)) % b);
    }

    std::vector<std::uint8_t> entries(static_cast<std::size_t>(dim) * E * E, 0);
    std::vector<std::uint8_t> power(static_cast<std::size_t>(E) * E, 0);
    for (int r = 0; r < E; ++r) power[static_cast<std::size_t>(r) * E + r] = 1;
    std::vector<std::uint8_t> next(static_cast<std::size_t>(E) * E, 0);
    for (int j = 0; j < dim; ++j) {
        std::copy(power.begin(), power.end(),
                  entries.begin() + static_cast<std::size_t>(j) * E * E);
        if (j + 1 == dim) break;
        std::fill(next.begin(), next.end(), 0);
        for (int r = 0; r < E; ++r)
            for (int t = r; t < E; ++t) {
                const std::uint8_t prt = power[static_cast<std::size_t>(r) * E + t];
                if (prt == 0) continue;
                for (int c = t; c < E; ++c)
                    next[static_cast<std::size_t>(r) * E + c] = static_cast<std::uint8_t>(
                        (next[static_cast<std::size_t>(r) * E + c] + prt * pas(t, c)) % b);
            }
        power.swap(next);
    }
    return {base, dim, E, std::move(entries), 0,
            "faure b=" + std::to_string(base)};
}

IntervalVolume interval_volume(const ElementaryInterval& e) {
    check_base(e.base);
    if (e.k.size() != e.c.size())
        throw config_error("interval_volume: k and c length mismatch");
    int total = 0;
    for (std::size_t j = 0; j < e.k.size(); ++j) {
        if (e.k[j] < 0) throw config_error("interval_volume: negative k");
        const u128 bk = ipow128(e.base, e.k[j]);
        if (e.c[j] >= bk) throw config_error("interval_volume: cell index out of range");
        total += e.k[j];
    }
    return {e.base, total};
}

std::vector<std::uint64_t> locate(std::span<const double> x, std::span<const int> k, int base) {
    if (x.size() != k.size()) throw config_error("locate: x and k length mismatch");
    std::vector<std::uint64_t> c(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) c[j] = digit_prefix(x[j], base, k[j]);
    return c;
}

bool interval_contains(const ElementaryInterval& e, std::span<const double> x) {
    if (x.size() != e.k.size())
        throw config_error("interval_contains: dimension mismatch");
    interval_volume(e);  // validates cell indices
    for (std::size_t j = 0; j < x.size(); ++j)
        if (digit_prefix(x[j], e.base, e.k[j]) != e.c[j]) return false;
    return true;
}

} // namespace rqmc
