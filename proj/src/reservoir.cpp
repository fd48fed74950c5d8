#include "waverc/reservoir.hpp"

#include <cmath>

namespace waverc {

namespace {

SparseMat build_random_weights(const GridSpec& spec, const RandomWeightsSpec& rnd,
                               double alpha) {
    if (rnd.density <= 0.0 || rnd.density >= 1.0)
        throw ConfigError("random weights: density must be in (0, 1)");
    if (rnd.spectral_radius <= 0.0)
        throw ConfigError("random weights: spectral radius must be positive");
    const int dim = spec.state_dim();
    Rng rng(rnd.matrix_seed);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<size_t>(rnd.density * dim * double(dim) * 1.1) + 16);
    for (int r = 0; r < dim; ++r)
        for (int col = 0; col < dim; ++col) {
            const double gate = rng.next_double();
            const double val = rng.uniform(-1.0, 1.0);
            if (gate < rnd.density) trips.emplace_back(r, col, val);
        }
    SparseMat a(dim, dim);
    a.setFromTriplets(trips.begin(), trips.end());
    a.makeCompressed();
    const double est = spectral_radius_power(a, derive_seed(rnd.matrix_seed, 0x9a));
    a = a * (rnd.spectral_radius / est);
    // The random matrix plays the role of W directly (Eq.-1-style reservoir);
    // store it as-is.
    (void)alpha;
    return a;
}

}  // namespace

void ReservoirModel::rebuild_weights() {
    if (kind == WeightsKind::Wave) {
        const SparseMat a = build_coupling_matrix(c, k, spec);
        w = coupling_to_reservoir_weights(a, alpha);
    } else {
        w = build_random_weights(spec, random, alpha);
    }
}

ReservoirModel init_reservoir(const GridSpec& spec, const SpeedField& c,
                              const DampingField& k, double alpha,
                              double input_gain, double noise_amp,
                              std::uint64_t input_seed) {
    spec.validate();
    if (input_gain < 0.0) throw ConfigError("init_reservoir: input_gain must be >= 0");
    if (noise_amp < 0.0) throw ConfigError("init_reservoir: noise_amp must be >= 0");

    ReservoirModel m;
    m.spec = spec;
    m.c = c;
    m.k = k;
    m.alpha = alpha;
    m.input_gain = input_gain;
    m.noise_amp = noise_amp;
    m.input_seed = input_seed;
    m.rebuild_weights();

    m.w_in = Eigen::VectorXd::Zero(spec.state_dim());
    Rng rng(input_seed);
    for (int j = 0; j < spec.n; ++j) m.w_in[j] = rng.uniform(0.0, input_gain);
    return m;
}

ReservoirRunner::ReservoirRunner(const ReservoirModel& model, std::uint64_t noise_seed)
    : model_(&model),
      noise_(noise_seed),
      x_(Eigen::VectorXd::Zero(model.spec.state_dim())),
      pre_(Eigen::VectorXd::Zero(model.spec.state_dim())) {}

void ReservoirRunner::step(double input) {
    const auto& m = *model_;
    pre_.noalias() = m.w * x_;
    if (input != 0.0) pre_ += input * m.w_in;
    const double a = m.noise_amp;
    double* pre = pre_.data();
    const Eigen::Index dim = x_.size();
    if (a > 0.0) {
        for (Eigen::Index i = 0; i < dim; ++i)
            pre[i] += noise_.uniform(-a, a);
    }
    const double alpha = m.alpha;
    x_ = (1.0 - alpha) * x_.array() + alpha * pre_.array().tanh();
}

StateTrace run_reservoir(const ReservoirModel& model, const Signal& signal,
                         std::uint64_t noise_seed, bool record_full) {
    if (signal.samples.empty()) throw ConfigError("run_reservoir: empty signal");
    const int T = signal.length();
    const int np = model.spec.p_count();
    StateTrace trace;
    trace.p.resize(T, np);
    if (record_full) trace.full.resize(T, model.spec.state_dim());
    trace.inputs = signal.samples;

    ReservoirRunner runner(model, noise_seed);
    for (int t = 0; t < T; ++t) {
        runner.step(signal.samples[static_cast<size_t>(t)]);
        trace.p.row(t) = runner.state().head(np);
        if (record_full) trace.full.row(t) = runner.state();
    }
    return trace;
}

}  // namespace waverc
