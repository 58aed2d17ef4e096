#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace ctqw {

// Identifies the random stream feeding one link of one realization.
struct NoiseEnsembleSeed {
    std::uint64_t master = 0;
    std::uint64_t realization = 0;
    std::uint64_t link = 0;

    std::uint64_t stream() const;
};

// One sampled telegraph process on [0, t_max]: the value starts at
// initial_sign * amplitude and flips sign at each switch time.
struct TelegraphTrajectory {
    int initial_sign = +1;            // +1 or -1
    std::vector<double> switch_times;  // strictly increasing, all in (0, t_max]
    double amplitude = 0.0;
    double t_max = 0.0;

    // Value g(t) for t in [0, t_max]; O(log n_switches).
    double value_at(double t) const;

    int sign_at(double t) const;
};

// Draws the initial sign (fair coin) and exponential(gamma) holding times.
TelegraphTrajectory sample_trajectory(double gamma, double amplitude, double t_max,
                                      std::uint64_t stream_seed);

// A link flip event inside one realization.
struct FlipEvent {
    double t;
    int link;
};

// Interleaves per-link switch times into one time-ordered event list
// (ties broken by link index so the ordering is total and reproducible).
std::vector<FlipEvent> merge_events(const std::vector<TelegraphTrajectory>& trajectories);

struct AutocorrelationEstimate {
    std::vector<double> lags;
    std::vector<double> estimates;   // mean of g(0) g(lag) over samples
    std::vector<double> std_errors;  // standard error of that mean
};

// Monte Carlo estimate of E[g(0) g(t)] for each requested lag; the exact
// value for the telegraph process is amplitude^2 * exp(-2 gamma t).
AutocorrelationEstimate empirical_autocorrelation(double gamma, double amplitude,
                                                  const std::vector<double>& lags,
                                                  int n_samples, std::uint64_t seed);

struct SwitchCountTest {
    double statistic = 0.0;      // Pearson chi-square over pooled count bins
    int dof = 0;
    double critical_value = 0.0; // 0.99 quantile for that dof
    bool consistent = false;     // statistic <= critical_value
    std::vector<int> bin_lower;  // first count in each bin (last bin open-ended)
    std::vector<double> observed;
    std::vector<double> expected;
};

// Compares the distribution of switch counts on [0, window] against
// Poisson(gamma * window) at the 0.01 significance level. Bins with
// expected occupancy below 5 are pooled into their neighbour.
SwitchCountTest switch_count_chi_square(double gamma, double window, int n_samples,
                                        std::uint64_t seed);

// Line-delimited dump, one trajectory per line:
//   <link> <initial_sign> <t1> <t2> ...
void dump_trajectories(std::ostream& out, const std::vector<TelegraphTrajectory>& trajectories);
std::vector<TelegraphTrajectory> load_trajectories(std::istream& in, double amplitude,
                                                   double t_max);

}  // namespace ctqw
