#pragma once

#include <array>
#include <cstdint>

namespace ashang {

/// Counter-keyed random stream: xoshiro256++ seeded through splitmix64 from
/// (seed, stream_id). Identical (seed, stream_id) reproduces the identical
/// draw sequence; distinct stream_ids are mixed into independent states.
///
/// Normal variates use the Marsaglia polar method (one spare cached), so the
/// sequence is deterministic per build. Bitwise identity across platforms is
/// not promised (log/sqrt may differ in the last ulp between libms), but the
/// draw sequence and its consumption pattern are fixed.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next_u64();

  /// Uniform in [0, 1) with 53 random bits.
  double next_uniform();

  /// Standard normal via the polar method.
  double next_normal();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  std::array<std::uint64_t, 4> s_{};
  std::uint64_t seed_ = 0;
  std::uint64_t stream_id_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace ashang
