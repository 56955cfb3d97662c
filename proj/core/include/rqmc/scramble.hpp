#pragma once

#include <cstdint>
#include <vector>

#include "rqmc/netgen.hpp"

namespace rqmc {

enum class ScrambleKind { none, nested_uniform, linear, digital_shift };

const char* to_string(ScrambleKind k);
ScrambleKind scramble_kind_from_string(const std::string& s);

// Everything random below is a pure function of (seed, replicate, dimension,
// digit path), so scrambles are reproducible point by point in any order.
struct ScrambleSpec {
    ScrambleKind kind = ScrambleKind::nested_uniform;
    int base = 2;
    int dim = 1;
    int depth = 0;  // digits scrambled per coordinate; 0 selects the base default
    std::uint64_t seed = 0;
    std::uint64_t replicate = 0;

    // Test hook: a digital shift under this seed is the identity shift.
    static constexpr std::uint64_t null_seed = ~0ull;
};

// Holder for the resolved spec plus any eagerly derived per-dimension state
// (linear matrices, shift vectors). Nested-uniform permutations are evaluated
// on demand from the keyed hash; re-querying a node always reproduces the
// same permutation, so no tree is ever stored.
class ScrambleState {
public:
    explicit ScrambleState(const ScrambleSpec& spec);

    const ScrambleSpec& spec() const { return spec_; }
    int depth() const { return spec_.depth; }
    // Digits at positions beyond this depth receive independent uniform
    // digital shifts keyed by the depth-16 ancestor node.
    int nest_depth() const { return nest_depth_; }

    // Scrambles one coordinate's digit vector (length depth()).
    void apply(int dim_index, const std::uint8_t* in, std::uint8_t* out) const;

private:
    ScrambleSpec spec_;
    int nest_depth_;
    std::vector<std::uint8_t> linear_;  // dim x E x E lower-triangular
    std::vector<std::uint8_t> shift_;   // dim x E
};

// Scrambles a materialized point set. The output keeps exact digit data; its
// precision equals spec.depth (>= the input precision, shorter inputs are
// zero-padded before scrambling).
DigitalPointSet scramble_points(const DigitalPointSet& pts, const ScrambleSpec& spec);

// Generates and scrambles points [i_start, i_start+count) of the digital
// sequence. Prefix-consistent: a longer run extends a shorter one.
DigitalPointSet scramble_stream(const GeneratorMatrixSet& g, const ScrambleSpec& spec,
                                std::uint64_t i_start, std::uint64_t count);

// Streaming access to scrambled coordinate values without retaining digits.
class ScrambledStream {
public:
    ScrambledStream(const GeneratorMatrixSet& g, const ScrambleSpec& spec,
                    std::uint64_t i_start = 0);

    std::uint64_t index() const { return index_; }
    // Writes the next point's dim() coordinate values and advances.
    void next(double* out_values);
    // Random access to a single point, independent of the cursor.
    void point_at(std::uint64_t i, double* out_values) const;
    int dim() const;

private:
    const GeneratorMatrixSet* g_;
    ScrambleState state_;
    std::uint64_t index_;
    mutable std::vector<std::uint8_t> raw_, mixed_;
};

} // namespace rqmc
