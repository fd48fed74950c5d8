#pragma once

#include <Eigen/Dense>

#include <vector>

#include "waverc/errors.hpp"

namespace waverc {

/// Square FDTD grid description. n is the number of p-cells per side,
/// dt the sample period in seconds, c_ref the speed at which the scheme
/// sits exactly on its stability limit (grid spacing dx = c_ref*dt*sqrt(2),
/// so the 2-D courant condition c <= c_ref holds with equality at c_ref).
struct GridSpec {
    int n = 40;
    double dt = 0.006;
    double c_ref = 300.0;

    int p_count() const { return n * n; }
    int o_count() const { return 2 * n * n; }
    int state_dim() const { return 3 * n * n; }

    void validate() const {
        if (n < 2) throw ConfigError("GridSpec: n must be >= 2");
        if (dt <= 0.0) throw ConfigError("GridSpec: dt must be positive");
        if (c_ref <= 0.0) throw ConfigError("GridSpec: c_ref must be positive");
    }
};

/// Row-major n x n grid of doubles. Row 0 is the fast end.
class Grid2d {
public:
    Grid2d() = default;
    Grid2d(int n, double fill) : n_(n), v_(static_cast<size_t>(n) * n, fill) {}

    int n() const { return n_; }
    double& at(int i, int j) { return v_[static_cast<size_t>(i) * n_ + j]; }
    double at(int i, int j) const { return v_[static_cast<size_t>(i) * n_ + j]; }
    double& flat(int idx) { return v_[static_cast<size_t>(idx)]; }
    double flat(int idx) const { return v_[static_cast<size_t>(idx)]; }

    const std::vector<double>& data() const { return v_; }
    std::vector<double>& data() { return v_; }

    double min() const;
    double max() const;

    bool operator==(const Grid2d&) const = default;

private:
    int n_ = 0;
    std::vector<double> v_;
};

/// Stacked FDTD state [p; ox; oy]. ox's last column and oy's last row are
/// structurally zero (rigid walls), kept so the state dimension is exactly
/// 3n^2 with the flattening (i, j) -> i*n + j shared by all three blocks.
struct WaveState {
    Grid2d p, ox, oy;

    explicit WaveState(int n) : p(n, 0.0), ox(n, 0.0), oy(n, 0.0) {}
    WaveState() = default;

    Eigen::VectorXd to_vector() const;
    static WaveState from_vector(const Eigen::VectorXd& x, int n);
};

}  // namespace waverc
