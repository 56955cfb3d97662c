#include "rqmc/netgen.hpp"

namespace rqmc {

// Direction numbers in the Joe-Kuo columnar layout: dimension, polynomial
// degree, encoded middle coefficients, then the initial odd values m_1..m_s.
// Dimension 1 (van der Corput) is implicit. Covers dimensions 2..16; larger
// runs should ingest an external table via the points/estimate tooling.
const std::string& builtin_sobol_table() {
    static const std::string table =
        "d s a m_i\n"
        "2 1 0 1\n"
        "3 2 1 1 3\n"
        "4 3 1 1 3 1\n"
        "5 3 2 1 1 1\n"
        "6 4 1 1 1 3 3\n"
        "7 4 4 1 3 5 13\n"
        "8 5 2 1 1 5 5 17\n"
        "9 5 4 1 1 5 5 5\n"
        "10 5 7 1 1 7 11 19\n"
        "11 5 11 1 1 5 1 1\n"
        "12 5 13 1 1 1 3 11\n"
        "13 5 14 1 3 5 5 31\n"
        "14 6 1 1 3 3 9 7 49\n"
        "15 6 13 1 1 1 15 21 21\n"
        "16 6 16 1 3 1 13 27 49\n";
    return table;
}

} // namespace rqmc
