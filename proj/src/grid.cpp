#include "waverc/grid.hpp"

#include <algorithm>

namespace waverc {

double Grid2d::min() const { return *std::min_element(v_.begin(), v_.end()); }
double Grid2d::max() const { return *std::max_element(v_.begin(), v_.end()); }

Eigen::VectorXd WaveState::to_vector() const {
    const int nn = p.n() * p.n();
    Eigen::VectorXd x(3 * nn);
    for (int i = 0; i < nn; ++i) x[i] = p.flat(i);
    for (int i = 0; i < nn; ++i) x[nn + i] = ox.flat(i);
    for (int i = 0; i < nn; ++i) x[2 * nn + i] = oy.flat(i);
    return x;
}

WaveState WaveState::from_vector(const Eigen::VectorXd& x, int n) {
    const int nn = n * n;
    if (x.size() != 3 * nn) throw ConfigError("WaveState: vector dimension mismatch");
    WaveState s(n);
    for (int i = 0; i < nn; ++i) s.p.flat(i) = x[i];
    for (int i = 0; i < nn; ++i) s.ox.flat(i) = x[nn + i];
    for (int i = 0; i < nn; ++i) s.oy.flat(i) = x[2 * nn + i];
    return s;
}

}  // namespace waverc
