#include "waverc/fields.hpp"

#include <cmath>

#include "waverc/rng.hpp"

namespace waverc {

void SpeedField::validate(const GridSpec& spec) const {
    if (values.n() != spec.n) throw ConfigError("SpeedField: grid size mismatch");
    if (values.min() <= 0.0) throw ConfigError("SpeedField: all speeds must be positive");
    if (values.max() > spec.c_ref * (1.0 + 1e-12))
        throw ConfigError("SpeedField: speed exceeds c_ref (courant violation)");
}

void DampingField::validate() const {
    if (k_min > k_max) throw ConfigError("DampingField: k_min > k_max");
    const double lo = std::min(kx.min(), ky.min());
    const double hi = std::max(kx.max(), ky.max());
    if (lo < k_min - 1e-12 || hi > k_max + 1e-12)
        throw ConfigError("DampingField: entries outside [k_min, k_max]");
}

SpeedField init_speed_field(const GridSpec& spec, double c0, double grad_per_row,
                            double noise_amp, std::uint64_t seed) {
    spec.validate();
    if (c0 <= 0.0) throw ConfigError("init_speed_field: c0 must be positive");
    if (noise_amp < 0.0) throw ConfigError("init_speed_field: noise_amp must be >= 0");

    SpeedField f;
    f.values = Grid2d(spec.n, 0.0);
    Rng rng(seed);
    for (int i = 0; i < spec.n; ++i) {
        for (int j = 0; j < spec.n; ++j) {
            const double u = noise_amp > 0.0 ? rng.uniform(0.0, noise_amp) : 0.0;
            f.values.at(i, j) = c0 + grad_per_row * i - u;
        }
    }
    f.scale_accum = 0.0;
    f.validate(spec);
    return f;
}

DampingField init_damping_field(const GridSpec& spec, double k0, double k_min, double k_max) {
    spec.validate();
    if (k0 < k_min || k0 > k_max)
        throw ConfigError("init_damping_field: k0 outside [k_min, k_max]");
    DampingField f;
    f.kx = Grid2d(spec.n, k0);
    f.ky = Grid2d(spec.n, k0);
    f.k_min = k_min;
    f.k_max = k_max;
    f.validate();
    return f;
}

}  // namespace waverc
