#pragma once

#include <array>
#include <cstdint>

namespace modacv {

/// One application of the Philox4x32-10 block cipher (Random123 constants).
/// Exposed mainly so the known-answer vectors can be checked directly.
[[nodiscard]] std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                                      std::array<std::uint32_t, 2> key);

/// Composes a 64-bit stream id from coordinates of a simulation plan.
/// `slot` distinguishes outer loops (e.g. positions in a sample-size grid),
/// `item` the replicate index, `channel` the role within one replicate
/// (0 = latent process, 1 = censoring process, spare bits for more).
[[nodiscard]] constexpr std::uint64_t compose_stream(std::uint64_t slot, std::uint64_t item,
                                                     std::uint64_t channel) noexcept {
    return (slot << 40) | (item << 2) | (channel & 0x3u);
}

/// Counter-based generator: every (seed, stream) pair yields an independent,
/// reproducible sequence regardless of call interleaving elsewhere.  The
/// 64-bit stream id sits in the upper counter words, the running block index
/// in the lower ones, and the seed is the cipher key.
class PhiloxRng {
public:
    explicit PhiloxRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

    std::uint32_t next_u32();
    std::uint64_t next_u64();

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01();

    /// Standard normal via Box-Muller; the second value of each pair is cached.
    double normal();

    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] std::uint64_t stream() const noexcept { return stream_; }

private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int pos_ = 4;  // buffer exhausted
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace modacv
