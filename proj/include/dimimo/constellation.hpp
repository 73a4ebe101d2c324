#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dimimo {

using cplx = std::complex<double>;

// Gray-mapped square M-QAM on the odd-integer grid {±1, ±3, ...}.
// The constellation is deliberately left unnormalized so that symbol
// differences stay on the even-integer lattice. BPSK (M = 2) is treated as
// a real constellation occupying only the I axis.
//
// Bit convention per symbol: I-axis bits first, then Q-axis bits, each axis
// reflected-binary Gray coded MSB-first (00 -> -3, 01 -> -1, 11 -> +1,
// 10 -> +3 on a four-level axis).
struct Constellation {
    int order = 0;                 // M
    std::vector<int> pam_levels;   // per-axis amplitude levels, ascending
    int bits_per_symbol = 0;       // log2(M)
    int bits_per_axis = 0;         // log2(M)/2, or 1 for BPSK
    double avg_energy = 0.0;       // E_s: mean |symbol|^2 over the constellation
    bool has_q_axis = true;        // false only for BPSK
};

namespace detail {

inline int gray_encode(int i) { return i ^ (i >> 1); }

inline int gray_decode(int g) {
    int i = g;
    for (int shift = 1; shift < 16; shift <<= 1) i ^= i >> shift;
    return i;
}

}  // namespace detail

inline Constellation make_constellation(int order) {
    Constellation c;
    c.order = order;
    switch (order) {
        case 2:
            c.pam_levels = {-1, 1};
            c.bits_per_symbol = 1;
            c.bits_per_axis = 1;
            c.has_q_axis = false;
            c.avg_energy = 1.0;
            return c;
        case 4:
        case 16:
        case 64:
        case 256: {
            const int side = static_cast<int>(std::lround(std::sqrt(double(order))));
            c.bits_per_symbol = static_cast<int>(std::lround(std::log2(double(order))));
            c.bits_per_axis = c.bits_per_symbol / 2;
            c.pam_levels.resize(side);
            for (int i = 0; i < side; ++i) c.pam_levels[i] = 2 * i - (side - 1);
            // E_s = 2 * E[level^2] for square QAM.
            double acc = 0.0;
            for (int l : c.pam_levels) acc += double(l) * l;
            c.avg_energy = 2.0 * acc / side;
            return c;
        }
        default:
            throw std::invalid_argument("unsupported modulation order M=" + std::to_string(order));
    }
}

// Maps bits_per_axis bits (MSB first) to a PAM level and back.
inline int bits_to_level(const Constellation& c, unsigned bits) {
    const int idx = detail::gray_decode(static_cast<int>(bits));
    return c.pam_levels[static_cast<std::size_t>(idx)];
}

inline unsigned level_to_bits(const Constellation& c, int level) {
    const int side = static_cast<int>(c.pam_levels.size());
    const int idx = (level + side - 1) / 2;
    if (idx < 0 || idx >= side || c.pam_levels[static_cast<std::size_t>(idx)] != level)
        throw std::invalid_argument("value is not a constellation level");
    return static_cast<unsigned>(detail::gray_encode(idx));
}

inline std::vector<cplx> modulate(const std::vector<std::uint8_t>& bits, const Constellation& c) {
    if (bits.size() % static_cast<std::size_t>(c.bits_per_symbol) != 0)
        throw std::invalid_argument("bit count not divisible by bits per symbol");
    const std::size_t n_sym = bits.size() / static_cast<std::size_t>(c.bits_per_symbol);
    std::vector<cplx> out(n_sym);
    std::size_t pos = 0;
    for (std::size_t k = 0; k < n_sym; ++k) {
        unsigned vi = 0;
        for (int b = 0; b < c.bits_per_axis; ++b) vi = (vi << 1) | bits[pos++];
        const int i_level = bits_to_level(c, vi);
        int q_level = 0;
        if (c.has_q_axis) {
            unsigned vq = 0;
            for (int b = 0; b < c.bits_per_axis; ++b) vq = (vq << 1) | bits[pos++];
            q_level = bits_to_level(c, vq);
        }
        out[k] = cplx(i_level, q_level);
    }
    return out;
}

inline std::vector<std::uint8_t> demodulate(const std::vector<cplx>& symbols, const Constellation& c) {
    std::vector<std::uint8_t> bits;
    bits.reserve(symbols.size() * static_cast<std::size_t>(c.bits_per_symbol));
    for (const cplx& s : symbols) {
        const int i_level = static_cast<int>(std::lround(s.real()));
        const int q_level = static_cast<int>(std::lround(s.imag()));
        if (i_level != s.real() || q_level != s.imag())
            throw std::invalid_argument("symbol is not a constellation point");
        const unsigned vi = level_to_bits(c, i_level);
        for (int b = c.bits_per_axis - 1; b >= 0; --b)
            bits.push_back(static_cast<std::uint8_t>((vi >> b) & 1u));
        if (c.has_q_axis) {
            const unsigned vq = level_to_bits(c, q_level);
            for (int b = c.bits_per_axis - 1; b >= 0; --b)
                bits.push_back(static_cast<std::uint8_t>((vq >> b) & 1u));
        } else if (q_level != 0) {
            throw std::invalid_argument("BPSK symbol has nonzero imaginary part");
        }
    }
    return bits;
}

}  // namespace dimimo
