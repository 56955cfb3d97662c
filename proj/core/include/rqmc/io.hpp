#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rqmc/estimate.hpp"
#include "rqmc/netgen.hpp"

namespace rqmc {

// printf %.17g: enough digits to round-trip any double exactly.
std::string format_double(double v);

// Header block of a point dump, serialized as leading "# key value" lines.
struct DumpMeta {
    std::string kind;  // generator description, e.g. "sobol" or "scrambled-sobol"
    int base = 2;
    int dim = 1;
    int precision = 0;
    std::uint64_t seed = 0;
    std::uint64_t replicate = 0;
    std::uint64_t index_start = 0;
    std::uint64_t count = 0;
    std::map<std::string, std::string> extra;  // free-form, written sorted by key
};

// One point per line, dim space-separated %.17g coordinates.
void write_points_text(std::ostream& out, const DumpMeta& meta, std::span<const double> values);

// One point per line, dim tokens of `precision` base-b digit characters
// (0-9a-z), most significant first. Exact: no float parsing on re-read.
void write_points_digits(std::ostream& out, const DumpMeta& meta, const DigitalPointSet& pts);

struct PointDump {
    DumpMeta meta;
    std::string format;                      // "points-text" or "points-digits"
    std::vector<double> values;              // count x dim, row-major
    std::optional<DigitalPointSet> digits;   // present for digit dumps
};

// Reads either dump flavor, deciding by the "# format" header line.
PointDump read_point_dump(std::istream& in);

// Fixed-header CSV of a convergence report; NaN cells print empty.
void write_convergence_csv(std::ostream& out, const ConvergenceReport& report);

// Schedule-study CSV: one row per schedule size with the error quantiles
// taken across seeds.
void write_slln_csv(std::ostream& out, const SllnReport& report);

// Writes content to path via a sibling temp file and rename, so readers never
// observe a partial artifact.
void write_file_atomic(const std::string& path, const std::string& content);

// Sidecar path for the machine-readable config echo.
std::string config_echo_path(const std::string& artifact_path);

} // namespace rqmc
