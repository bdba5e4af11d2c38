#pragma once

// Injected randomness. Protocol operations take a RandomSource so that runs
// are reproducible under a fixed seed; production use plugs in SystemRng.

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "ecbs/field.hpp"

namespace ecbs {

class RandomSource {
public:
    virtual ~RandomSource() = default;

    virtual void fill(std::span<std::uint8_t> out) = 0;

    // Uniform draw from [0, bound) by rejection sampling. Virtual so tests
    // can script exact draw sequences.
    virtual BigInt uniform_below(const BigInt& bound) {
        if (bound <= 0)
            throw std::invalid_argument("uniform_below: bound must be positive");
        const std::size_t bits = bit_length(bound);
        const std::size_t nbytes = (bits + 7) / 8;
        const unsigned top_bits = static_cast<unsigned>(bits - 8 * (nbytes - 1));
        const std::uint8_t mask = static_cast<std::uint8_t>(0xFF >> (8 - top_bits));
        std::vector<std::uint8_t> buf(nbytes);
        for (;;) {
            fill(buf);
            buf[0] &= mask;
            BigInt v = bigint_from_bytes(buf);
            if (v < bound)
                return v;
        }
    }

    // Uniform draw from [1, modulus - 1].
    ModInt nonzero_scalar(const BigInt& modulus) {
        return ModInt(uniform_below(modulus - 1) + 1, modulus);
    }
};

// Deterministic source. Bytes come from successive mt19937_64 words taken
// big-endian; each fill() starts on a fresh word, so a given seed always
// yields the same byte stream for the same call sequence.
class SeededRng final : public RandomSource {
public:
    explicit SeededRng(std::uint64_t seed) : gen_(seed) {}

    void fill(std::span<std::uint8_t> out) override {
        std::size_t i = 0;
        while (i < out.size()) {
            std::uint64_t w = gen_();
            for (int b = 7; b >= 0 && i < out.size(); --b)
                out[i++] = static_cast<std::uint8_t>(w >> (8 * b));
        }
    }

private:
    std::mt19937_64 gen_;
};

// System entropy.
class SystemRng final : public RandomSource {
public:
    void fill(std::span<std::uint8_t> out) override {
        for (auto& byte : out)
            byte = static_cast<std::uint8_t>(dev_());
    }

private:
    std::random_device dev_;
};

}  // namespace ecbs
