#pragma once

// Counter-based random streams (Philox4x32-10). A stream is a pure function of
// (key, domain, index), so any draw can be regenerated without replaying the
// whole history. All samplers derive their randomness this way; no global
// generator state exists.

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>

namespace lbexact {

using Philox4x32Counter = std::array<std::uint32_t, 4>;
using Philox4x32Key = std::array<std::uint32_t, 2>;

// Ten-round Philox 4x32 block function (Salmon et al., SC'11).
Philox4x32Counter philox4x32(Philox4x32Counter counter, Philox4x32Key key) noexcept;

// Domains separate independent purposes that share one key.
enum class StreamDomain : std::uint32_t {
  kDraw = 1,        // master seed -> per-draw key
  kBackward = 2,    // dominating chain backward marks and reconstruction
  kStep = 3,        // per-time-index StepRandomness seeds
  kPolicy = 4,      // sub-draws expanded from one StepRandomness seed
  kCycle = 5,       // acceptance-rejection cycle marks
  kPermute = 6,     // output permutation of sorted draws
  kAux = 7,         // test / tool streams
};

// Satisfies UniformRandomBitGenerator with 64-bit output.
class CounterStream {
 public:
  using result_type = std::uint64_t;

  CounterStream(std::uint64_t key, StreamDomain domain, std::uint64_t index,
                std::uint32_t tag = 0) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() noexcept;
  // Uniform on (0, 1].
  double uniform01_open_closed() noexcept { return 1.0 - uniform01(); }
  // Uniform integer in [0, bound), bound > 0, unbiased (Lemire).
  std::uint64_t below(std::uint64_t bound) noexcept;
  bool bernoulli(double p) noexcept { return uniform01() < p; }

  std::uint64_t blocks_consumed() const noexcept { return block_; }

 private:
  void refill() noexcept;

  Philox4x32Key key_;
  std::uint32_t domain_word_;
  std::uint64_t index_;
  std::uint32_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  std::size_t buffered_ = 0;
};

// 64-bit key derived from (key, domain, index, tag); first output of the stream.
std::uint64_t derive_key(std::uint64_t key, StreamDomain domain, std::uint64_t index,
                         std::uint32_t tag = 0) noexcept;

}  // namespace lbexact
