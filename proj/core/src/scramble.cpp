#include "rqmc/scramble.hpp"

#include <algorithm>
#include <cstring>

#include "rqmc/rng.hpp"

namespace rqmc {

const char* to_string(ScrambleKind k) {
    switch (k) {
        case ScrambleKind::none: return "none";
        case ScrambleKind::nested_uniform: return "nested_uniform";
        case ScrambleKind::linear: return "linear";
        case ScrambleKind::digital_shift: return "digital_shift";
    }
    return "?";
}

ScrambleKind scramble_kind_from_string(const std::string& s) {
    if (s == "none") return ScrambleKind::none;
    if (s == "nested_uniform" || s == "nested") return ScrambleKind::nested_uniform;
    if (s == "linear") return ScrambleKind::linear;
    if (s == "digital_shift" || s == "shift") return ScrambleKind::digital_shift;
    throw config_error("unknown scramble kind: " + s);
}

namespace {

constexpr int kMaxNest = 16;  // digit-path length fed to the keyed hash

void pack_path(std::uint64_t& p0, std::uint64_t& p1, int k, std::uint8_t digit) {
    if (k < 8) p0 |= static_cast<std::uint64_t>(digit) << (k * 8);
    else if (k < kMaxNest) p1 |= static_cast<std::uint64_t>(digit) << ((k - 8) * 8);
}

} // namespace

ScrambleState::ScrambleState(const ScrambleSpec& spec) : spec_(spec) {
    if (spec_.base < 2 || spec_.base > 36)
        throw config_error("ScrambleSpec: base must be in [2,36]");
    if (spec_.dim < 1) throw config_error("ScrambleSpec: dim must be >= 1");
    if (spec_.depth == 0) spec_.depth = default_precision(spec_.base);
    if (spec_.depth < 1 || spec_.depth > 64)
        throw config_error("ScrambleSpec: depth must be in [1,64]");
    if (spec_.kind == ScrambleKind::nested_uniform && spec_.base > 20)
        throw config_error("nested uniform scrambling supports bases up to 20");
    nest_depth_ = std::min(spec_.depth, kMaxNest);

    const int E = spec_.depth;
    const auto b = static_cast<unsigned>(spec_.base);
    if (spec_.kind == ScrambleKind::linear) {
        linear_.assign(static_cast<std::size_t>(spec_.dim) * E * E, 0);
        shift_.assign(static_cast<std::size_t>(spec_.dim) * E, 0);
        for (int j = 0; j < spec_.dim; ++j) {
            for (int r = 0; r < E; ++r) {
                for (int c = 0; c < r; ++c) {
                    const std::uint64_t h =
                        keyed_hash(spec_.seed, spec_.replicate,
                                   role_word(RandomRole::linear_matrix, static_cast<std::uint64_t>(j),
                                             static_cast<std::uint64_t>(r)),
                                   static_cast<std::uint64_t>(c), 0);
                    linear_[(static_cast<std::size_t>(j) * E + r) * E + c] =
                        static_cast<std::uint8_t>(uniform_below(h, b));
                }
                const std::uint64_t hd =
                    keyed_hash(spec_.seed, spec_.replicate,
                               role_word(RandomRole::linear_matrix, static_cast<std::uint64_t>(j),
                                         static_cast<std::uint64_t>(r)),
                               static_cast<std::uint64_t>(r), 1);
                // diagonal entries are uniform on the units {1,...,b-1}
                linear_[(static_cast<std::size_t>(j) * E + r) * E + r] =
                    static_cast<std::uint8_t>(1 + uniform_below(hd, b - 1));
                const std::uint64_t hs =
                    keyed_hash(spec_.seed, spec_.replicate,
                               role_word(RandomRole::digital_shift, static_cast<std::uint64_t>(j),
                                         static_cast<std::uint64_t>(r)));
                shift_[static_cast<std::size_t>(j) * E + r] =
                    static_cast<std::uint8_t>(uniform_below(hs, b));
            }
        }
    } else if (spec_.kind == ScrambleKind::digital_shift) {
        shift_.assign(static_cast<std::size_t>(spec_.dim) * E, 0);
        if (spec_.seed != ScrambleSpec::null_seed) {
            for (int j = 0; j < spec_.dim; ++j)
                for (int r = 0; r < E; ++r) {
                    const std::uint64_t h =
                        keyed_hash(spec_.seed, spec_.replicate,
                                   role_word(RandomRole::digital_shift,
                                             static_cast<std::uint64_t>(j),
                                             static_cast<std::uint64_t>(r)));
                    shift_[static_cast<std::size_t>(j) * E + r] =
                        static_cast<std::uint8_t>(uniform_below(h, b));
                }
        }
    }
}

void ScrambleState::apply(int j, const std::uint8_t* in, std::uint8_t* out) const {
    const int E = spec_.depth;
    const auto b = static_cast<unsigned>(spec_.base);
    switch (spec_.kind) {
        case ScrambleKind::none:
            std::memcpy(out, in, static_cast<std::size_t>(E));
            return;
        case ScrambleKind::digital_shift: {
            const std::uint8_t* e = shift_.data() + static_cast<std::size_t>(j) * E;
            for (int k = 0; k < E; ++k)
                out[k] = static_cast<std::uint8_t>((in[k] + e[k]) % b);
            return;
        }
        case ScrambleKind::linear: {
            const std::uint8_t* L = linear_.data() + static_cast<std::size_t>(j) * E * E;
            const std::uint8_t* e = shift_.data() + static_cast<std::size_t>(j) * E;
            for (int r = 0; r < E; ++r) {
                unsigned acc = e[r];
                const std::uint8_t* row = L + static_cast<std::size_t>(r) * E;
                for (int c = 0; c <= r; ++c) acc += row[c] * in[c];
                out[r] = static_cast<std::uint8_t>(acc % b);
            }
            return;
        }
        case ScrambleKind::nested_uniform: {
            // The permutation applied to digit k is keyed by the original
            // digits before it; past nest_depth the node collapses to an
            // independent uniform shift keyed by the depth-16 ancestor.
            std::uint64_t p0 = 0, p1 = 0;
            const auto jd = static_cast<std::uint64_t>(j);
            for (int k = 0; k < E; ++k) {
                if (k < nest_depth_) {
                    const std::uint64_t h = keyed_hash(
                        spec_.seed, spec_.replicate,
                        role_word(RandomRole::nested_perm, jd, static_cast<std::uint64_t>(k)),
                        p0, p1);
                    if (b == 2) {
                        out[k] = static_cast<std::uint8_t>(in[k] ^ (h & 1u));
                    } else {
                        std::uint8_t perm[20];
                        unrank_permutation(h, spec_.base, perm);
                        out[k] = perm[in[k]];
                    }
                } else {
                    const std::uint64_t h = keyed_hash(
                        spec_.seed, spec_.replicate,
                        role_word(RandomRole::nested_tail, jd, static_cast<std::uint64_t>(k)),
                        p0, p1);
                    out[k] = static_cast<std::uint8_t>((in[k] + uniform_below(h, b)) % b);
                }
                pack_path(p0, p1, k, in[k]);
            }
            return;
        }
    }
}

namespace {

void check_compat(const ScrambleSpec& spec, int base, int dim, int precision) {
    if (spec.base != base)
        throw config_error("scramble: spec base does not match point base");
    if (spec.dim != dim)
        throw config_error("scramble: spec dim does not match point dim");
    if (spec.depth != 0 && spec.depth < precision)
        throw config_error("scramble: depth is shallower than point precision");
}

} // namespace

DigitalPointSet scramble_points(const DigitalPointSet& pts, const ScrambleSpec& spec) {
    if (!pts.has_digits())
        throw config_error("scramble_points: point set has no digit data");
    ScrambleSpec s = spec;
    if (s.depth == 0) s.depth = std::max(default_precision(pts.base()), pts.precision());
    check_compat(s, pts.base(), pts.dim(), pts.precision());
    const ScrambleState state(s);
    const int E = state.depth();
    DigitalPointSet out(pts.base(), pts.dim(), E, pts.index_start());
    std::vector<std::uint8_t> in_block(static_cast<std::size_t>(pts.dim()) * E, 0);
    std::vector<std::uint8_t> out_block(in_block.size());
    for (std::size_t p = 0; p < pts.size(); ++p) {
        for (int j = 0; j < pts.dim(); ++j) {
            const auto d = pts.coord_digits(p, j);
            std::uint8_t* dst = in_block.data() + static_cast<std::size_t>(j) * E;
            std::fill(dst, dst + E, 0);
            std::copy(d.begin(), d.end(), dst);
            state.apply(j, dst, out_block.data() + static_cast<std::size_t>(j) * E);
        }
        out.append(out_block.data());
    }
    return out;
}

DigitalPointSet scramble_stream(const GeneratorMatrixSet& g, const ScrambleSpec& spec,
                                std::uint64_t i_start, std::uint64_t count) {
    ScrambleSpec s = spec;
    if (s.depth == 0) s.depth = std::max(default_precision(g.base()), g.precision());
    check_compat(s, g.base(), g.dim(), g.precision());
    const std::uint64_t cap = g.index_capacity();
    if (i_start > cap || count > cap - i_start)
        throw limit_error("scramble_stream: index range exceeds b^E points");
    const ScrambleState state(s);
    const int E = state.depth();
    const int Eg = g.precision();
    DigitalPointSet out(g.base(), g.dim(), E, i_start);
    std::vector<std::uint8_t> raw(static_cast<std::size_t>(Eg));
    std::vector<std::uint8_t> in_block(static_cast<std::size_t>(g.dim()) * E, 0);
    std::vector<std::uint8_t> out_block(in_block.size());
    for (std::uint64_t t = 0; t < count; ++t) {
        for (int j = 0; j < g.dim(); ++j) {
            g.point_digits(i_start + t, j, raw.data());
            std::uint8_t* dst = in_block.data() + static_cast<std::size_t>(j) * E;
            std::fill(dst, dst + E, 0);
            std::copy(raw.begin(), raw.end(), dst);
            state.apply(j, dst, out_block.data() + static_cast<std::size_t>(j) * E);
        }
        out.append(out_block.data());
    }
    return out;
}

ScrambledStream::ScrambledStream(const GeneratorMatrixSet& g, const ScrambleSpec& spec,
                                 std::uint64_t i_start)
    : g_(&g), state_([&] {
          ScrambleSpec s = spec;
          if (s.depth == 0) s.depth = std::max(default_precision(g.base()), g.precision());
          check_compat(s, g.base(), g.dim(), g.precision());
          return s;
      }()),
      index_(i_start) {
    raw_.resize(static_cast<std::size_t>(g.precision()));
    mixed_.resize(static_cast<std::size_t>(state_.depth()) * 2);
}

int ScrambledStream::dim() const { return g_->dim(); }

void ScrambledStream::point_at(std::uint64_t i, double* out_values) const {
    const int E = state_.depth();
    const int Eg = g_->precision();
    std::uint8_t* in = mixed_.data();
    std::uint8_t* out = mixed_.data() + E;
    for (int j = 0; j < g_->dim(); ++j) {
        g_->point_digits(i, j, raw_.data());
        std::fill(in, in + E, 0);
        std::copy(raw_.begin(), raw_.begin() + Eg, in);
        state_.apply(j, in, out);
        out_values[j] = value_from_digits({out, static_cast<std::size_t>(E)}, g_->base());
    }
}

void ScrambledStream::next(double* out_values) {
    point_at(index_, out_values);
    ++index_;
}

} // namespace rqmc
