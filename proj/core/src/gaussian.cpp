#include "dtwa/gaussian.hpp"

namespace dtwa {

SpinConfiguration sample_gaussian_initial(const ProductState& state, Xoshiro256pp& rng) {
    SpinConfiguration s(state.n_sites());
    for (int i = 0; i < state.n_sites(); ++i) {
        const auto& p = state.site(i);
        const double t0 = rng.normal();
        const double t1 = rng.normal();
        switch (p.axis) {
            case Axis::x:
                s.x[i] = static_cast<double>(p.sign);
                s.y[i] = t0;
                s.z[i] = t1;
                break;
            case Axis::y:
                s.x[i] = t0;
                s.y[i] = static_cast<double>(p.sign);
                s.z[i] = t1;
                break;
            default:
                s.x[i] = t0;
                s.y[i] = t1;
                s.z[i] = static_cast<double>(p.sign);
                break;
        }
    }
    return s;
}

void sample_gaussian_initial_column(const ProductState& state, Xoshiro256pp& rng,
                                    SpinBatch& batch, int column) {
    batch.set_column(column, sample_gaussian_initial(state, rng));
}

}  // namespace dtwa
