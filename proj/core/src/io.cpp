#include "rqmc/io.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "rqmc/errors.hpp"

namespace rqmc {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

char digit_char(std::uint8_t v) {
    return static_cast<char>(v < 10 ? '0' + v : 'a' + (v - 10));
}

int digit_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'z') return c - 'a' + 10;
    return -1;
}

void write_meta(std::ostream& out, const DumpMeta& meta, const char* format) {
    out << "# format " << format << '\n';
    if (!meta.kind.empty()) out << "# kind " << meta.kind << '\n';
    out << "# base " << meta.base << '\n';
    out << "# dim " << meta.dim << '\n';
    out << "# precision " << meta.precision << '\n';
    out << "# seed " << meta.seed << '\n';
    out << "# replicate " << meta.replicate << '\n';
    out << "# index_start " << meta.index_start << '\n';
    out << "# count " << meta.count << '\n';
    for (const auto& [key, value] : meta.extra) out << "# " << key << ' ' << value << '\n';
}

std::uint64_t parse_u64(const std::string& text, int line_no) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw parse_error("line " + std::to_string(line_no) + ": expected an integer, got '" + text + "'");
    return v;
}

int parse_int(const std::string& text, int line_no) {
    std::uint64_t v = parse_u64(text, line_no);
    if (v > 1u << 30) throw parse_error("line " + std::to_string(line_no) + ": value out of range");
    return static_cast<int>(v);
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

} // namespace

void write_points_text(std::ostream& out, const DumpMeta& meta, std::span<const double> values) {
    if (meta.dim < 1) throw config_error("dump dimension must be >= 1");
    if (values.size() != meta.count * static_cast<std::size_t>(meta.dim))
        throw config_error("value count does not match count x dim");
    write_meta(out, meta, "points-text");
    for (std::uint64_t p = 0; p < meta.count; ++p) {
        for (int j = 0; j < meta.dim; ++j) {
            if (j) out << ' ';
            out << format_double(values[p * static_cast<std::size_t>(meta.dim) + j]);
        }
        out << '\n';
    }
}

void write_points_digits(std::ostream& out, const DumpMeta& meta, const DigitalPointSet& pts) {
    if (!pts.has_digits()) throw config_error("digit dump needs exact digit data");
    if (pts.base() != meta.base || pts.dim() != meta.dim || pts.size() != meta.count ||
        pts.precision() != meta.precision)
        throw config_error("dump metadata does not match the point set");
    write_meta(out, meta, "points-digits");
    std::string tok(static_cast<std::size_t>(pts.precision()), '0');
    for (std::size_t p = 0; p < pts.size(); ++p) {
        for (int j = 0; j < pts.dim(); ++j) {
            auto digits = pts.coord_digits(p, j);
            for (int k = 0; k < pts.precision(); ++k) tok[static_cast<std::size_t>(k)] = digit_char(digits[k]);
            if (j) out << ' ';
            out << tok;
        }
        out << '\n';
    }
}

PointDump read_point_dump(std::istream& in) {
    PointDump dump;
    DumpMeta& meta = dump.meta;
    meta.base = 0;
    meta.dim = 0;
    std::string line;
    int line_no = 0;
    bool have_count = false;

    // Header block.
    while (in.peek() == '#') {
        std::getline(in, line);
        ++line_no;
        std::vector<std::string> tok = split_ws(line);
        if (tok.size() < 2 || tok[0] != "#") continue;
        const std::string& key = tok[1];
        std::string value = tok.size() > 2 ? tok[2] : "";
        for (std::size_t i = 3; i < tok.size(); ++i) value += ' ' + tok[i];
        if (key == "format") dump.format = value;
        else if (key == "kind") meta.kind = value;
        else if (key == "base") meta.base = parse_int(value, line_no);
        else if (key == "dim") meta.dim = parse_int(value, line_no);
        else if (key == "precision") meta.precision = parse_int(value, line_no);
        else if (key == "seed") meta.seed = parse_u64(value, line_no);
        else if (key == "replicate") meta.replicate = parse_u64(value, line_no);
        else if (key == "index_start") meta.index_start = parse_u64(value, line_no);
        else if (key == "count") { meta.count = parse_u64(value, line_no); have_count = true; }
        else meta.extra[key] = value;
    }
    if (dump.format != "points-text" && dump.format != "points-digits")
        throw parse_error("missing or unknown '# format' header");
    if (meta.dim < 1) throw parse_error("missing '# dim' header");
    bool digits_mode = dump.format == "points-digits";
    if (digits_mode) {
        if (meta.base < 2) throw parse_error("digit dump needs a '# base' header");
        if (meta.precision < 1) throw parse_error("digit dump needs a '# precision' header");
    }
    if (meta.base == 0) meta.base = 2;

    std::optional<DigitalPointSet> pts;
    std::vector<std::uint8_t> block;
    if (digits_mode) {
        pts.emplace(meta.base, meta.dim, meta.precision, meta.index_start);
        block.resize(static_cast<std::size_t>(meta.dim) * meta.precision);
    }

    std::uint64_t rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::vector<std::string> tok = split_ws(line);
        if (tok.empty()) continue;
        if (static_cast<int>(tok.size()) != meta.dim)
            throw parse_error("line " + std::to_string(line_no) + ": expected " +
                              std::to_string(meta.dim) + " columns, got " + std::to_string(tok.size()));
        if (digits_mode) {
            for (int j = 0; j < meta.dim; ++j) {
                const std::string& t = tok[static_cast<std::size_t>(j)];
                if (static_cast<int>(t.size()) != meta.precision)
                    throw parse_error("line " + std::to_string(line_no) + ": expected " +
                                      std::to_string(meta.precision) + " digits per coordinate");
                for (int k = 0; k < meta.precision; ++k) {
                    int v = digit_value(t[static_cast<std::size_t>(k)]);
                    if (v < 0 || v >= meta.base)
                        throw parse_error("line " + std::to_string(line_no) + ": digit '" +
                                          std::string(1, t[static_cast<std::size_t>(k)]) +
                                          "' is not a base-" + std::to_string(meta.base) + " digit");
                    block[static_cast<std::size_t>(j) * meta.precision + k] = static_cast<std::uint8_t>(v);
                }
            }
            pts->append(block.data());
        } else {
            for (int j = 0; j < meta.dim; ++j) {
                const std::string& t = tok[static_cast<std::size_t>(j)];
                char* end = nullptr;
                errno = 0;
                double v = std::strtod(t.c_str(), &end);
                if (errno != 0 || end != t.c_str() + t.size())
                    throw parse_error("line " + std::to_string(line_no) + ": bad number '" + t + "'");
                dump.values.push_back(v);
            }
        }
        ++rows;
    }
    if (have_count && rows != meta.count)
        throw parse_error("header count " + std::to_string(meta.count) + " but " +
                          std::to_string(rows) + " data rows");
    meta.count = rows;
    if (digits_mode) {
        for (std::size_t p = 0; p < pts->size(); ++p)
            for (int j = 0; j < meta.dim; ++j) dump.values.push_back(pts->value(p, j));
        dump.digits = std::move(pts);
    }
    return dump;
}

namespace {

void csv_cell(std::ostream& out, double v) {
    if (!std::isnan(v)) out << format_double(v);
}

} // namespace

void write_convergence_csv(std::ostream& out, const ConvergenceReport& report) {
    out << "n,mean,var,rmse,p_moment,gamma_bound_var,chebychev_tail,p_moment_bound,mc_var\n";
    for (const ConvergenceRow& row : report.rows) {
        out << row.n << ',';
        out << format_double(row.mean) << ',' << format_double(row.var) << ',';
        csv_cell(out, row.rmse);
        out << ',';
        csv_cell(out, row.p_moment);
        out << ',';
        csv_cell(out, row.gamma_bound_var);
        out << ',';
        csv_cell(out, row.chebychev_tail);
        out << ',';
        csv_cell(out, row.p_moment_bound);
        out << ',';
        csv_cell(out, row.mc_var);
        out << '\n';
    }
}

void write_slln_csv(std::ostream& out, const SllnReport& report) {
    out << "n,err_median,err_q90,err_max\n";
    for (std::size_t c = 0; c < report.ns.size(); ++c) {
        out << report.ns[c] << ',' << format_double(report.err_median[c]) << ','
            << format_double(report.err_q90[c]) << ',' << format_double(report.err_max[c]) << '\n';
    }
}

void write_file_atomic(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw io_error("cannot open '" + tmp + "' for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw io_error("write to '" + tmp + "' failed");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw io_error("rename '" + tmp + "' -> '" + path + "' failed: " + std::strerror(errno));
}

std::string config_echo_path(const std::string& artifact_path) {
    return artifact_path + ".config.json";
}

} // namespace rqmc
