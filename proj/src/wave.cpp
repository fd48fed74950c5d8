#include "waverc/wave.hpp"

#include <cmath>
#include <complex>
#include <vector>

#include "waverc/rng.hpp"

namespace waverc {

namespace {

inline double div_coef(const SpeedField& c, const GridSpec& spec, int i, int j) {
    const double lam = c.values.at(i, j) / spec.c_ref;
    return 0.5 * lam * lam;
}

}  // namespace

WaveState fdtd_step(const WaveState& state, const SpeedField& c,
                    const DampingField& k, const GridSpec& spec) {
    const int n = spec.n;
    if (state.p.n() != n || c.values.n() != n || k.kx.n() != n)
        throw ConfigError("fdtd_step: dimension mismatch");

    WaveState out(n);
    // p from old o
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double div = state.ox.at(i, j) + state.oy.at(i, j);
            if (j > 0) div -= state.ox.at(i, j - 1);
            if (i > 0) div -= state.oy.at(i - 1, j);
            out.p.at(i, j) = state.p.at(i, j) - div_coef(c, spec, i, j) * div;
        }
    }
    // o from new p; boundary o-neurons stay clamped to zero (rigid walls)
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n - 1; ++j) {
            out.ox.at(i, j) = (1.0 - k.sign * k.kx.at(i, j)) * state.ox.at(i, j)
                              - (out.p.at(i, j + 1) - out.p.at(i, j));
        }
        out.ox.at(i, n - 1) = 0.0;
    }
    for (int i = 0; i < n - 1; ++i) {
        for (int j = 0; j < n; ++j) {
            out.oy.at(i, j) = (1.0 - k.sign * k.ky.at(i, j)) * state.oy.at(i, j)
                              - (out.p.at(i + 1, j) - out.p.at(i, j));
        }
    }
    for (int j = 0; j < n; ++j) out.oy.at(n - 1, j) = 0.0;
    return out;
}

SparseMat build_coupling_matrix(const SpeedField& c, const DampingField& k,
                                const GridSpec& spec) {
    c.validate(spec);
    k.validate();
    const int n = spec.n;
    const int nn = n * n;
    const int dim = 3 * nn;
    const auto pid = [nn, n](int i, int j) { return i * n + j; };
    const auto oxid = [nn, n](int i, int j) { return nn + i * n + j; };
    const auto oyid = [nn, n](int i, int j) { return 2 * nn + i * n + j; };

    using T = Eigen::Triplet<double>;

    // S1: p update from old o, identity on o
    std::vector<T> t1;
    t1.reserve(static_cast<size_t>(dim) * 3);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const int r = pid(i, j);
            const double cf = div_coef(c, spec, i, j);
            t1.emplace_back(r, r, 1.0);
            t1.emplace_back(r, oxid(i, j), -cf);
            t1.emplace_back(r, oyid(i, j), -cf);
            if (j > 0) t1.emplace_back(r, oxid(i, j - 1), cf);
            if (i > 0) t1.emplace_back(r, oyid(i - 1, j), cf);
        }
    }
    for (int idx = nn; idx < dim; ++idx) t1.emplace_back(idx, idx, 1.0);
    SparseMat s1(dim, dim);
    s1.setFromTriplets(t1.begin(), t1.end());

    // S2: o update from new p, identity on p. Boundary rows are left empty
    // so the structural zeros of ox/oy are enforced by the matrix itself.
    std::vector<T> t2;
    t2.reserve(static_cast<size_t>(dim) * 3);
    for (int idx = 0; idx < nn; ++idx) t2.emplace_back(idx, idx, 1.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n - 1; ++j) {
            const int r = oxid(i, j);
            t2.emplace_back(r, r, 1.0 - k.sign * k.kx.at(i, j));
            t2.emplace_back(r, pid(i, j + 1), -1.0);
            t2.emplace_back(r, pid(i, j), 1.0);
        }
    }
    for (int i = 0; i < n - 1; ++i) {
        for (int j = 0; j < n; ++j) {
            const int r = oyid(i, j);
            t2.emplace_back(r, r, 1.0 - k.sign * k.ky.at(i, j));
            t2.emplace_back(r, pid(i + 1, j), -1.0);
            t2.emplace_back(r, pid(i, j), 1.0);
        }
    }
    SparseMat s2(dim, dim);
    s2.setFromTriplets(t2.begin(), t2.end());

    SparseMat a = s2 * s1;
    a.prune(0.0);
    a.makeCompressed();
    return a;
}

SparseMat coupling_to_reservoir_weights(const SparseMat& a, double alpha) {
    if (alpha <= 0.0 || alpha > 1.0)
        throw ConfigError("coupling_to_reservoir_weights: alpha must be in (0, 1]");
    SparseMat id(a.rows(), a.cols());
    id.setIdentity();
    SparseMat w = (a - (1.0 - alpha) * id) / alpha;
    w.makeCompressed();
    return w;
}

double spectral_radius_dense(const SparseMat& a) {
    Eigen::MatrixXd dense(a);
    Eigen::EigenSolver<Eigen::MatrixXd> es(dense, /*computeEigenvectors=*/false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

double resonant_radius_dense(const SparseMat& a) {
    Eigen::MatrixXd dense(a);
    Eigen::EigenSolver<Eigen::MatrixXd> es(dense, false);
    const auto& ev = es.eigenvalues();
    Eigen::Index steady = 0;
    double best = std::abs(ev[0] - std::complex<double>(1.0, 0.0));
    for (Eigen::Index i = 1; i < ev.size(); ++i) {
        const double d = std::abs(ev[i] - std::complex<double>(1.0, 0.0));
        if (d < best) {
            best = d;
            steady = i;
        }
    }
    double r = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (i != steady) r = std::max(r, std::abs(ev[i]));
    return r;
}

double spectral_radius_power(const SparseMat& a, std::uint64_t seed, int iters) {
    Rng rng(seed);
    Eigen::VectorXd x(a.cols());
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.uniform(-1.0, 1.0);
    x.normalize();
    double log_growth = 0.0;
    int counted = 0;
    const int burn = iters / 4;
    for (int it = 0; it < iters; ++it) {
        Eigen::VectorXd y = a * x;
        const double nrm = y.norm();
        if (!(nrm > 0.0) || !std::isfinite(nrm))
            throw NumericalError("spectral_radius_power: iteration collapsed");
        if (it >= burn) {
            log_growth += std::log(nrm);
            ++counted;
        }
        x = y / nrm;
    }
    return std::exp(log_growth / counted);
}

double leapfrog_energy(const WaveState& state, const SpeedField& c, const GridSpec& spec) {
    const int n = spec.n;
    double e = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double cf = div_coef(c, spec, i, j);
            const double p = state.p.at(i, j);
            e += p * p / cf;
            const double ox = state.ox.at(i, j);
            const double oy = state.oy.at(i, j);
            e += ox * ox + oy * oy;
            const double gx = (j < n - 1) ? state.p.at(i, j + 1) - state.p.at(i, j) : 0.0;
            const double gy = (i < n - 1) ? state.p.at(i + 1, j) - state.p.at(i, j) : 0.0;
            e += ox * gx + oy * gy;
        }
    }
    return e;
}

}  // namespace waverc
