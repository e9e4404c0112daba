#pragma once

// Continuous (Gaussian) phase-space baseline: the polarized component is
// pinned to 1 and the two transverse components are independent standard
// normals, so per-site and collective first and second moments match the
// discrete sampler at t = 0. Evolution and measurement reuse the classical
// dynamics and accumulator unchanged.

#include "dtwa/phase_space.hpp"
#include "dtwa/rng.hpp"

namespace dtwa {

SpinConfiguration sample_gaussian_initial(const ProductState& state, Xoshiro256pp& rng);
void sample_gaussian_initial_column(const ProductState& state, Xoshiro256pp& rng,
                                    SpinBatch& batch, int column);

}  // namespace dtwa
