#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace dimimo {

// Terminated constraint-length-7 convolutional codes.
//   rate 1/3: generators (133, 171, 165) octal
//   rate 1/2: generators (133, 171) octal
//   rate 2/3: rate-1/2 mother code punctured with [1 1; 1 0]
// Every block is terminated with 6 tail zeros.
enum class CodeRate { R1_3, R1_2, R2_3 };

inline double rate_value(CodeRate r) {
    switch (r) {
        case CodeRate::R1_3: return 1.0 / 3.0;
        case CodeRate::R1_2: return 1.0 / 2.0;
        case CodeRate::R2_3: return 2.0 / 3.0;
    }
    return 0.0;
}

inline const char* to_string(CodeRate r) {
    switch (r) {
        case CodeRate::R1_3: return "1/3";
        case CodeRate::R1_2: return "1/2";
        case CodeRate::R2_3: return "2/3";
    }
    return "?";
}

namespace conv_detail {

constexpr int kMemory = 6;
constexpr int kStates = 1 << kMemory;
constexpr std::array<unsigned, 3> kGen13 = {0133, 0171, 0165};
constexpr std::array<unsigned, 2> kGen12 = {0133, 0171};

inline int parity(unsigned v) { return __builtin_popcount(v) & 1; }

// Window convention: bit 6 is the newest input bit, bits 5..0 the state.
inline unsigned window(int state, int bit) { return (static_cast<unsigned>(bit) << kMemory) | static_cast<unsigned>(state); }
inline int next_state(unsigned w) { return static_cast<int>(w >> 1); }

inline int n_streams(CodeRate r) { return r == CodeRate::R1_3 ? 3 : 2; }

// Puncture mask for rate 2/3: period parity -> which of the two rate-1/2
// outputs are transmitted.
inline bool punctured(CodeRate r, std::size_t period, int stream) {
    return r == CodeRate::R2_3 && (period % 2 == 1) && stream == 1;
}

template <typename Fn>
inline void for_each_output(CodeRate r, unsigned w, Fn&& fn) {
    if (r == CodeRate::R1_3) {
        for (int j = 0; j < 3; ++j) fn(j, parity(w & kGen13[static_cast<std::size_t>(j)]));
    } else {
        for (int j = 0; j < 2; ++j) fn(j, parity(w & kGen12[static_cast<std::size_t>(j)]));
    }
}

}  // namespace conv_detail

// Transmitted bits for a block of `block_len` info bits.
inline std::size_t coded_length(std::size_t block_len, CodeRate rate) {
    const std::size_t periods = block_len + conv_detail::kMemory;
    switch (rate) {
        case CodeRate::R1_3: return 3 * periods;
        case CodeRate::R1_2: return 2 * periods;
        case CodeRate::R2_3: return (2 * periods * 3 + 3) / 4;  // ceil(2p * 3/4)
    }
    return 0;
}

inline std::vector<std::uint8_t> conv_encode(const std::vector<std::uint8_t>& info, CodeRate rate) {
    using namespace conv_detail;
    std::vector<std::uint8_t> out;
    out.reserve(coded_length(info.size(), rate));
    int state = 0;
    const std::size_t periods = info.size() + kMemory;
    for (std::size_t t = 0; t < periods; ++t) {
        const int bit = t < info.size() ? info[t] : 0;
        const unsigned w = window(state, bit);
        for_each_output(rate, w, [&](int stream, int value) {
            if (!punctured(rate, t, stream)) out.push_back(static_cast<std::uint8_t>(value));
        });
        state = next_state(w);
    }
    return out;
}

// Hard-decision Viterbi over the terminated trellis; punctured positions
// carry no metric. Input length must match coded_length(block_len, rate).
inline std::vector<std::uint8_t> viterbi_decode(const std::vector<std::uint8_t>& coded,
                                                CodeRate rate, std::size_t block_len) {
    using namespace conv_detail;
    if (coded.size() != coded_length(block_len, rate))
        throw std::invalid_argument("coded block length mismatch");
    const std::size_t periods = block_len + kMemory;
    const int ns = n_streams(rate);

    // De-puncture into per-period received symbols; -1 marks an erasure.
    std::vector<std::array<int, 3>> rx(periods, {-1, -1, -1});
    std::size_t pos = 0;
    for (std::size_t t = 0; t < periods; ++t)
        for (int j = 0; j < ns; ++j)
            if (!punctured(rate, t, j)) rx[t][static_cast<std::size_t>(j)] = coded[pos++];

    constexpr int kInf = std::numeric_limits<int>::max() / 2;
    std::vector<int> metric(kStates, kInf), next_metric(kStates, kInf);
    metric[0] = 0;  // encoder starts in the all-zero state
    // decisions[t][s] = input bit of the survivor entering state s at step t
    std::vector<std::vector<std::uint8_t>> decisions(periods,
                                                     std::vector<std::uint8_t>(kStates, 0));
    std::vector<std::vector<int>> preds(periods, std::vector<int>(kStates, -1));

    for (std::size_t t = 0; t < periods; ++t) {
        std::fill(next_metric.begin(), next_metric.end(), kInf);
        const int max_bit = t < block_len ? 1 : 0;  // tail forces zeros
        for (int s = 0; s < kStates; ++s) {
            if (metric[s] >= kInf) continue;
            for (int bit = 0; bit <= max_bit; ++bit) {
                const unsigned w = window(s, bit);
                int bm = 0;
                for_each_output(rate, w, [&](int stream, int value) {
                    const int r = rx[t][static_cast<std::size_t>(stream)];
                    if (r >= 0 && r != value) ++bm;
                });
                const int s2 = next_state(w);
                const int cand = metric[s] + bm;
                if (cand < next_metric[s2]) {
                    next_metric[s2] = cand;
                    decisions[t][static_cast<std::size_t>(s2)] = static_cast<std::uint8_t>(bit);
                    preds[t][static_cast<std::size_t>(s2)] = s;
                }
            }
        }
        metric.swap(next_metric);
    }

    // Terminated: trace back from the all-zero state.
    std::vector<std::uint8_t> info(block_len);
    int s = 0;
    for (std::size_t t = periods; t-- > 0;) {
        const std::uint8_t bit = decisions[t][static_cast<std::size_t>(s)];
        if (t < block_len) info[t] = bit;
        s = preds[t][static_cast<std::size_t>(s)];
    }
    return info;
}

}  // namespace dimimo
