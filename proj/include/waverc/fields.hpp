#pragma once

#include <cstdint>

#include "waverc/grid.hpp"

namespace waverc {

/// Per-cell wave speed. scale_accum tracks the cumulative relative change
/// applied by the synchronization adaptation (delta_sum in the c-update).
struct SpeedField {
    Grid2d values;
    double scale_accum = 0.0;

    void validate(const GridSpec& spec) const;
};

/// Per-o-neuron damping. sign = +1 means positive k damps (the prose
/// convention); sign = -1 flips to the amplifying convention of the
/// printed equations.
struct DampingField {
    Grid2d kx, ky;
    double k_min = -0.01;
    double k_max = 0.1;
    double sign = 1.0;

    void validate() const;
};

/// values[i][j] = c0 + grad_per_row*i - u_ij with u_ij ~ U[0, noise_amp),
/// drawn row-major from an Rng seeded with `seed`. Row 0 is the fast end.
SpeedField init_speed_field(const GridSpec& spec, double c0, double grad_per_row,
                            double noise_amp, std::uint64_t seed);

DampingField init_damping_field(const GridSpec& spec, double k0,
                                double k_min = -0.01, double k_max = 0.1);

}  // namespace waverc
