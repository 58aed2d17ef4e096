#include "ctqw/noise.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "ctqw/rng.hpp"

namespace ctqw {

std::uint64_t NoiseEnsembleSeed::stream() const {
    return mix_seed(mix_seed(master, realization), link);
}

double TelegraphTrajectory::value_at(double t) const {
    return amplitude * sign_at(t);
}

int TelegraphTrajectory::sign_at(double t) const {
    if (t < 0.0 || t > t_max) throw std::out_of_range("telegraph lookup outside [0, t_max]");
    const auto flips =
        std::upper_bound(switch_times.begin(), switch_times.end(), t) - switch_times.begin();
    return (flips % 2 == 0) ? initial_sign : -initial_sign;
}

TelegraphTrajectory sample_trajectory(double gamma, double amplitude, double t_max,
                                      std::uint64_t stream_seed) {
    if (!(gamma > 0.0)) throw std::invalid_argument("telegraph gamma must be positive");
    if (amplitude < 0.0) throw std::invalid_argument("telegraph amplitude must be non-negative");
    if (!(t_max > 0.0)) throw std::invalid_argument("telegraph t_max must be positive");

    SplitMix64 rng(stream_seed);
    TelegraphTrajectory traj;
    traj.amplitude = amplitude;
    traj.t_max = t_max;
    traj.initial_sign = (rng.next() >> 63) ? -1 : +1;

    double t = 0.0;
    for (;;) {
        t += -std::log(rng.next_u01()) / gamma;
        if (t > t_max) break;
        traj.switch_times.push_back(t);
    }
    return traj;
}

std::vector<FlipEvent> merge_events(const std::vector<TelegraphTrajectory>& trajectories) {
    for (const auto& traj : trajectories)
        if (traj.t_max != trajectories.front().t_max)
            throw std::invalid_argument("merge_events: trajectories disagree on t_max");
    std::vector<FlipEvent> events;
    std::size_t total = 0;
    for (const auto& traj : trajectories) total += traj.switch_times.size();
    events.reserve(total);
    for (int l = 0; l < static_cast<int>(trajectories.size()); ++l)
        for (double t : trajectories[l].switch_times) events.push_back({t, l});
    std::sort(events.begin(), events.end(), [](const FlipEvent& x, const FlipEvent& y) {
        return x.t != y.t ? x.t < y.t : x.link < y.link;
    });
    return events;
}

AutocorrelationEstimate empirical_autocorrelation(double gamma, double amplitude,
                                                  const std::vector<double>& lags,
                                                  int n_samples, std::uint64_t seed) {
    if (lags.empty()) throw std::invalid_argument("autocorrelation needs at least one lag");
    for (double lag : lags)
        if (lag < 0.0) throw std::invalid_argument("autocorrelation lags must be non-negative");
    if (n_samples < 1000)
        throw std::invalid_argument("autocorrelation needs at least 1000 samples");

    // Sample at least one mean holding time so a lag-0-only request still
    // draws well-formed trajectories.
    const double t_max =
        std::max(*std::max_element(lags.begin(), lags.end()), 1.0 / gamma);
    std::vector<double> sum(lags.size(), 0.0), sumsq(lags.size(), 0.0);

    for (int s = 0; s < n_samples; ++s) {
        const auto traj = sample_trajectory(gamma, amplitude, t_max, mix_seed(seed, s));
        const double g0 = traj.value_at(0.0);
        for (std::size_t k = 0; k < lags.size(); ++k) {
            const double prod = g0 * traj.value_at(lags[k]);
            sum[k] += prod;
            sumsq[k] += prod * prod;
        }
    }

    AutocorrelationEstimate est;
    est.lags = lags;
    est.estimates.resize(lags.size());
    est.std_errors.resize(lags.size());
    for (std::size_t k = 0; k < lags.size(); ++k) {
        const double mean = sum[k] / n_samples;
        const double var = std::max(0.0, sumsq[k] / n_samples - mean * mean);
        est.estimates[k] = mean;
        est.std_errors[k] = std::sqrt(var / (n_samples - 1));
    }
    return est;
}

namespace {

// 0.99 quantile of chi-square via the Wilson-Hilferty cube approximation,
// adequate for pass/fail bookkeeping at the dof sizes used here.
double chi_square_q99(int dof) {
    const double z99 = 2.3263478740408408;
    const double h = 2.0 / (9.0 * dof);
    const double c = 1.0 - h + z99 * std::sqrt(h);
    return dof * c * c * c;
}

}  // namespace

SwitchCountTest switch_count_chi_square(double gamma, double window, int n_samples,
                                        std::uint64_t seed) {
    if (!(window > 0.0)) throw std::invalid_argument("chi-square window must be positive");
    if (n_samples < 1000) throw std::invalid_argument("chi-square needs at least 1000 samples");

    const double mean = gamma * window;

    // Poisson pmf until the remaining tail is negligible.
    std::vector<double> pmf;
    double p = std::exp(-mean), cum = 0.0;
    for (int k = 0; cum < 1.0 - 1e-12 && k < 4096; ++k) {
        pmf.push_back(p);
        cum += p;
        p *= mean / (k + 1);
    }

    // Pool consecutive counts so every bin expects at least 5 samples.
    SwitchCountTest test;
    std::vector<double> bin_prob;
    double acc = 0.0;
    int lower = 0;
    for (std::size_t k = 0; k < pmf.size(); ++k) {
        if (acc == 0.0) lower = static_cast<int>(k);
        acc += pmf[k];
        if (acc * n_samples >= 5.0) {
            test.bin_lower.push_back(lower);
            bin_prob.push_back(acc);
            acc = 0.0;
        }
    }
    const double tail = std::max(0.0, 1.0 - cum) + acc;
    if (!bin_prob.empty() && tail * n_samples < 5.0) {
        bin_prob.back() += tail;
    } else {
        test.bin_lower.push_back(lower);
        bin_prob.push_back(tail);
    }
    if (bin_prob.size() < 2) throw std::invalid_argument("chi-square window too small to bin");

    test.observed.assign(bin_prob.size(), 0.0);
    for (int s = 0; s < n_samples; ++s) {
        const auto traj = sample_trajectory(gamma, 1.0, window, mix_seed(seed, s));
        const int count = static_cast<int>(traj.switch_times.size());
        std::size_t b = 0;
        while (b + 1 < test.bin_lower.size() && count >= test.bin_lower[b + 1]) ++b;
        test.observed[b] += 1.0;
    }

    test.expected.resize(bin_prob.size());
    for (std::size_t b = 0; b < bin_prob.size(); ++b) {
        test.expected[b] = bin_prob[b] * n_samples;
        const double d = test.observed[b] - test.expected[b];
        test.statistic += d * d / test.expected[b];
    }
    test.dof = static_cast<int>(bin_prob.size()) - 1;
    test.critical_value = chi_square_q99(test.dof);
    test.consistent = test.statistic <= test.critical_value;
    return test;
}

void dump_trajectories(std::ostream& out, const std::vector<TelegraphTrajectory>& trajectories) {
    out.precision(17);
    for (std::size_t l = 0; l < trajectories.size(); ++l) {
        const auto& traj = trajectories[l];
        out << l << ' ' << traj.initial_sign;
        for (double t : traj.switch_times) out << ' ' << t;
        out << '\n';
    }
}

std::vector<TelegraphTrajectory> load_trajectories(std::istream& in, double amplitude,
                                                   double t_max) {
    std::vector<TelegraphTrajectory> trajectories;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::size_t link;
        TelegraphTrajectory traj;
        traj.amplitude = amplitude;
        traj.t_max = t_max;
        if (!(row >> link >> traj.initial_sign))
            throw std::invalid_argument("malformed trajectory record");
        double t;
        while (row >> t) traj.switch_times.push_back(t);
        if (link != trajectories.size())
            throw std::invalid_argument("trajectory records out of order");
        trajectories.push_back(std::move(traj));
    }
    return trajectories;
}

}  // namespace ctqw
