#include "waverc/eval.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

namespace waverc {

std::vector<double> detect_peaks(const std::vector<double>& series, double dt,
                                 double min_height, double min_separation_s) {
    if (min_separation_s <= dt)
        throw ConfigError("detect_peaks: min_separation must exceed dt");
    const int len = static_cast<int>(series.size());
    std::vector<int> cand;
    for (int t = 1; t + 1 < len; ++t) {
        if (series[t] > min_height && series[t] >= series[t - 1] && series[t] > series[t + 1])
            cand.push_back(t);
    }
    std::sort(cand.begin(), cand.end(), [&](int a, int b) {
        if (series[a] != series[b]) return series[a] > series[b];
        return a < b;
    });
    std::vector<int> kept;
    const double sep = min_separation_s / dt;
    for (int t : cand) {
        bool ok = true;
        for (int u : kept)
            if (std::abs(t - u) < sep) {
                ok = false;
                break;
            }
        if (ok) kept.push_back(t);
    }
    std::sort(kept.begin(), kept.end());

    std::vector<double> times;
    for (int t : kept) {
        const double y0 = series[t - 1], y1 = series[t], y2 = series[t + 1];
        const double denom = y0 - 2.0 * y1 + y2;
        double shift = 0.0;
        if (std::abs(denom) > 1e-300) shift = 0.5 * (y0 - y2) / denom;
        shift = std::clamp(shift, -0.5, 0.5);
        times.push_back((t + shift) * dt);
    }
    return times;
}

OffsetStats time_offset_ratio(const std::vector<double>& pred_peaks,
                              const std::vector<double>& target_peaks,
                              double target_interval_s) {
    if (target_interval_s <= 0.0)
        throw ConfigError("time_offset_ratio: interval must be positive");
    if (target_peaks.empty())
        throw ConfigError("time_offset_ratio: empty target peak list");

    const double gate = 0.5 * target_interval_s;
    // all candidate pairs within the gate, matched greedily by distance so
    // the result is stable under permutations of either list
    std::vector<std::tuple<double, int, int>> pairs;
    for (int i = 0; i < static_cast<int>(target_peaks.size()); ++i)
        for (int j = 0; j < static_cast<int>(pred_peaks.size()); ++j) {
            const double d = std::abs(target_peaks[i] - pred_peaks[j]);
            if (d <= gate) pairs.emplace_back(d, i, j);
        }
    std::sort(pairs.begin(), pairs.end());

    std::vector<char> t_used(target_peaks.size(), 0), p_used(pred_peaks.size(), 0);
    std::vector<std::pair<int, int>> matches;
    for (const auto& [d, i, j] : pairs) {
        if (t_used[i] || p_used[j]) continue;
        t_used[i] = p_used[j] = 1;
        matches.emplace_back(i, j);
    }
    std::sort(matches.begin(), matches.end());

    OffsetStats st;
    for (const auto& [i, j] : matches)
        st.ratios.push_back((target_peaks[i] - pred_peaks[j]) / target_interval_s);
    st.matched_count = static_cast<int>(st.ratios.size());
    st.missed_count = static_cast<int>(target_peaks.size()) - st.matched_count;
    st.spurious_count = static_cast<int>(pred_peaks.size()) - st.matched_count;
    if (!st.ratios.empty()) {
        double s = 0.0;
        for (double r : st.ratios) s += r;
        st.mean = s / st.ratios.size();
        double v = 0.0;
        for (double r : st.ratios) v += (r - st.mean) * (r - st.mean);
        st.variance = v / st.ratios.size();
    }
    return st;
}

std::vector<double> target_peak_times(const Signal& sig, int horizon_steps) {
    if (horizon_steps < 0)
        throw ConfigError("target_peak_times: horizon must be >= 0");
    const double shift = horizon_steps * sig.dt;
    std::vector<double> peaks;
    peaks.reserve(sig.beat_times.size());
    for (double b : sig.beat_times)
        if (b - shift >= 0.0) peaks.push_back(b - shift);
    return peaks;
}

IntervalErrors interval_errors(const std::vector<double>& pred_peaks,
                               double target_interval_s) {
    IntervalErrors res;
    if (pred_peaks.size() < 2) return res;
    std::vector<double> errs;
    for (size_t i = 1; i < pred_peaks.size(); ++i)
        errs.push_back(pred_peaks[i] - pred_peaks[i - 1] - target_interval_s);
    double mae = 0.0, mean = 0.0;
    for (double e : errs) {
        mae += std::abs(e);
        mean += e;
    }
    mae /= errs.size();
    mean /= errs.size();
    double var = 0.0;
    for (double e : errs) var += (e - mean) * (e - mean);
    res.mean_abs_error_s = mae;
    res.variance = var / errs.size();
    res.defined = true;
    return res;
}

namespace {

int next_pow2(int v) {
    int p = 1;
    while (p < v) p <<= 1;
    return p;
}

}  // namespace

ResonanceMap resonance_map_from_trace(const StateTrace& trace, int n, double dt,
                                      int settle_steps, bool keep_spectra) {
    const int total = trace.length();
    const int len = total - settle_steps;
    if (len < 2048)
        throw ConfigError("resonance_map: need >= 2048 steps after settling");
    const int nfft = next_pow2(len);
    const int nbins = nfft / 2 + 1;
    const int np = n * n;

    std::vector<double> window(static_cast<size_t>(len));
    for (int t = 0; t < len; ++t)
        window[t] = 0.5 * (1.0 - std::cos(2.0 * M_PI * t / (len - 1)));

    std::vector<double> in(static_cast<size_t>(nfft), 0.0);
    std::vector<fftw_complex> out(static_cast<size_t>(nbins));
    fftw_plan plan = fftw_plan_dft_r2c_1d(nfft, in.data(), out.data(), FFTW_ESTIMATE);

    ResonanceMap map;
    map.dominant_freq = Grid2d(n, 0.0);
    map.freq_resolution = 1.0 / (nfft * dt);
    if (keep_spectra) map.spectra.resize(static_cast<size_t>(np));

    for (int i = 0; i < np; ++i) {
        for (int t = 0; t < len; ++t)
            in[t] = trace.p(settle_steps + t, i) * window[t];
        std::fill(in.begin() + len, in.end(), 0.0);
        fftw_execute(plan);
        int best = 1;
        double best_mag = 0.0;
        std::vector<double> mags;
        if (keep_spectra) mags.resize(static_cast<size_t>(nbins));
        for (int b = 0; b < nbins; ++b) {
            const double mag = std::hypot(out[b][0], out[b][1]);
            if (keep_spectra) mags[b] = mag;
            if (b >= 1 && mag > best_mag) {
                best_mag = mag;
                best = b;
            }
        }
        map.dominant_freq.flat(i) = best_mag > 0.0 ? best * map.freq_resolution : 0.0;
        if (keep_spectra) map.spectra[static_cast<size_t>(i)] = std::move(mags);
    }
    fftw_destroy_plan(plan);
    return map;
}

ResonanceMap resonance_map(const ReservoirModel& model, const Signal& excitation,
                           int settle_steps, bool keep_spectra) {
    ReservoirModel quiet = model;
    quiet.noise_amp = 0.0;
    const StateTrace trace = run_reservoir(quiet, excitation, /*noise_seed=*/0);
    return resonance_map_from_trace(trace, model.spec.n, excitation.dt, settle_steps,
                                    keep_spectra);
}

ReservoirModel random_reservoir(const GridSpec& spec, double density,
                                double spectral_radius, std::uint64_t seed,
                                const ReservoirModel& like) {
    ReservoirModel m = like;
    m.spec = spec;
    m.kind = WeightsKind::Random;
    m.random.density = density;
    m.random.spectral_radius = spectral_radius;
    m.random.matrix_seed = seed;
    m.rebuild_weights();
    return m;
}

double cross_correlation_lag(const std::vector<double>& pred,
                             const std::vector<double>& target, double dt,
                             double max_lag_s) {
    const int len = static_cast<int>(std::min(pred.size(), target.size()));
    if (len < 2) throw ConfigError("cross_correlation_lag: series too short");
    double pm = 0.0, tm = 0.0;
    for (int t = 0; t < len; ++t) {
        pm += pred[t];
        tm += target[t];
    }
    pm /= len;
    tm /= len;
    const int max_lag = static_cast<int>(max_lag_s / dt);
    double best = -std::numeric_limits<double>::infinity();
    int best_lag = 0;
    for (int lag = -max_lag; lag <= max_lag; ++lag) {
        double acc = 0.0;
        int cnt = 0;
        for (int t = 0; t < len; ++t) {
            const int u = t - lag;
            if (u < 0 || u >= len) continue;
            acc += (pred[t] - pm) * (target[u] - tm);
            ++cnt;
        }
        // Raw sum, not per-overlap mean: for periodic signals the correlation
        // peaks repeat every period, and the shrinking overlap at larger |lag|
        // breaks those ties toward the fundamental lag.
        (void)cnt;
        if (acc > best) {
            best = acc;
            best_lag = lag;
        }
    }
    return best_lag * dt;
}

}  // namespace waverc
