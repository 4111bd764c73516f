#include "chaoslink/bitcodec.hpp"

#include "chaoslink/errors.hpp"

#include <string>

namespace chaoslink::bits {

FrameSpec::FrameSpec(std::size_t m, std::size_t n) : m_(m), n_(n) {
    if (n == 0 || n > m) {
        throw ParameterError("frame needs 0 < n <= m (got m=" + std::to_string(m) +
                             ", n=" + std::to_string(n) + ")");
    }
    if (m % n != 0) {
        throw ParameterError("frame n=" + std::to_string(n) + " must divide m=" + std::to_string(m));
    }
}

void check_alphabet(std::span<const Bit> bits) {
    for (Bit b : bits) {
        if (b > 1) {
            throw ParameterError("bit sequence contains a value other than 0 or 1");
        }
    }
}

BitSequence spread(std::span<const Bit> info, const FrameSpec& spec) {
    if (info.size() != spec.n()) {
        throw LengthError("spread expects " + std::to_string(spec.n()) + " info bits, got " +
                          std::to_string(info.size()));
    }
    check_alphabet(info);
    BitSequence out;
    out.reserve(spec.m());
    for (Bit b : info) {
        out.insert(out.end(), spec.r(), b);
    }
    return out;
}

BitSequence mask_bits(std::span<const Bit> bits, std::span<const Bit> carrier) {
    if (bits.size() != carrier.size()) {
        throw LengthError("mask_bits length mismatch: " + std::to_string(bits.size()) + " vs " +
                          std::to_string(carrier.size()));
    }
    check_alphabet(bits);
    check_alphabet(carrier);
    BitSequence out(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        out[i] = bits[i] ^ carrier[i];
    }
    return out;
}

std::vector<double> correlate(std::span<const Bit> received, const FrameSpec& spec) {
    if (received.size() != spec.m()) {
        throw LengthError("correlate expects " + std::to_string(spec.m()) + " bits, got " +
                          std::to_string(received.size()));
    }
    check_alphabet(received);
    const std::size_t r = spec.r();
    std::vector<double> means;
    means.reserve(spec.n());
    for (std::size_t p = 0; p < spec.n(); ++p) {
        std::size_t ones = 0;
        for (std::size_t j = 0; j < r; ++j) {
            ones += received[p * r + j];
        }
        means.push_back(static_cast<double>(ones) / static_cast<double>(r));
    }
    return means;
}

BitSequence decide(std::span<const double> block_means, double threshold) {
    BitSequence out;
    out.reserve(block_means.size());
    for (double s : block_means) {
        out.push_back(s > threshold ? 1 : 0);
    }
    return out;
}

BitSequence carrier_from_states(std::span<const std::int16_t> states) {
    BitSequence out;
    out.reserve(states.size());
    for (std::int16_t s : states) {
        out.push_back(static_cast<Bit>(static_cast<std::uint16_t>(s) & 1u));
    }
    return out;
}

} // namespace chaoslink::bits
