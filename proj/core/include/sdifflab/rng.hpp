#pragma once

#include <cstdint>

namespace sdifflab {

/// Philox4x32-10 counter-based generator. A draw is a pure function of
/// (key, counter), so every path/step pair owns a private stream and the
/// results cannot depend on scheduling or thread count.
struct Philox {
    uint64_t key;      // derived from (seed, stream id)
    uint64_t counter;  // advances per 4x32 block

    static uint64_t mix(uint64_t seed, uint64_t stream);

    /// Next block of four 32-bit words.
    void block(uint32_t out[4]);
};

/// Sequential gaussian/uniform stream for one path, keyed by (seed, stream).
/// Gaussians come from Box-Muller on Philox uniforms; no rejection steps, so
/// the draw count per sample is fixed.
class PathRng {
  public:
    PathRng(uint64_t seed, uint64_t stream) : ph_{Philox::mix(seed, stream), 0}, have_(false) {}

    double next_u01();
    double next_gaussian();

  private:
    Philox ph_;
    bool have_;
    double spare_ = 0.0;
    uint32_t buf_[4] = {0, 0, 0, 0};
    int buf_pos_ = 4;
};

}  // namespace sdifflab
