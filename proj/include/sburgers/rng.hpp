#pragma once

// Counter-based random streams.
//
// Stream derivation rule (fixed, part of the reproducibility contract):
//   key     = (lo32(master_seed), hi32(master_seed))
//   counter = (lo32(draw), hi32(draw), lo32(stream_index), hi32(stream_index))
// Each Philox4x32-10 block yields two 53-bit uniforms in (0,1), which are
// turned into two standard normals by Box-Muller (cos branch first).

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <string_view>

namespace sburgers {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// One Philox4x32 block with 10 rounds.
PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key);

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Seed for an independent experiment leg, e.g. derive_seed(seed, "ck-inner").
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view tag);

class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_index);

  std::uint64_t master_seed() const { return seed_; }
  std::uint64_t stream_index() const { return index_; }

  /// Uniform in the open interval (0,1).
  double uniform();
  double normal();

  template <typename Derived>
  void fill_normal(Eigen::DenseBase<Derived>& out) {
    for (Eigen::Index i = 0; i < out.size(); ++i) out.derived().coeffRef(i) = normal();
  }

 private:
  PhiloxCounter next_block();

  std::uint64_t seed_;
  std::uint64_t index_;
  std::uint64_t draw_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

inline RngStream derive_stream(std::uint64_t master_seed, std::uint64_t index) {
  return RngStream(master_seed, index);
}

}  // namespace sburgers
