#include "ctqw/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

#include "ctqw/rng.hpp"
#include "ctqw/states.hpp"

namespace ctqw {

void EvolutionPlan::validate() const {
    config.validate();
    if (checkpoints.empty()) throw std::invalid_argument("plan.checkpoints must not be empty");
    double prev = -std::numeric_limits<double>::infinity();
    for (double t : checkpoints) {
        if (t < 0.0) throw std::invalid_argument("plan.checkpoints must be non-negative");
        if (!(t > prev))
            throw std::invalid_argument("plan.checkpoints must be strictly increasing");
        prev = t;
    }
    if (n_realizations < 1)
        throw std::invalid_argument("plan.n_realizations must be at least 1");
    if (!(chebyshev_tol > 0.0))
        throw std::invalid_argument("plan.chebyshev_tol must be positive");
}

int chebyshev_terms(double z, double tol, std::vector<Complex>& coeffs) {
    if (z < 0.0) throw std::invalid_argument("chebyshev phase argument must be non-negative");
    if (!(tol > 0.0)) throw std::invalid_argument("chebyshev tolerance must be positive");

    if (z == 0.0) {
        coeffs.assign(1, Complex(1.0, 0.0));
        return 1;
    }

    // Smallest K with sum_{k>K} 2 (z/2)^k / k! <= tol, evaluated in log space.
    // The sum is bounded by its first term times a geometric factor 1/(1-q).
    const double log_half_z = std::log(0.5 * z);
    const double log_tol = std::log(tol);
    const int cap = static_cast<int>(1.5 * z) + 96;
    int terms = -1;
    for (int k = 0; k <= cap; ++k) {
        const double q = 0.5 * z / (k + 2);
        if (q >= 1.0) continue;
        const double log_tail =
            std::log(2.0) + (k + 1) * log_half_z - std::lgamma(k + 2.0) - std::log1p(-q);
        if (log_tail <= log_tol) {
            terms = k + 1;
            break;
        }
    }
    if (terms < 0)
        throw NumericalError("chebyshev expansion stalled: tolerance " + std::to_string(tol) +
                             " unreachable for phase extent " + std::to_string(z));

    std::vector<double> jk(terms);
    if (z <= 0.5) {
        // Maclaurin evaluation, exact to ~1e-17 relative for z this small.
        const double u = 0.25 * z * z;
        double prefix = 1.0;  // (z/2)^k / k!
        for (int k = 0; k < terms; ++k) {
            if (k > 0) prefix *= 0.5 * z / k;
            double term = 1.0, sum = 1.0;
            for (int m = 1; m <= 16; ++m) {
                term *= -u / (m * (k + m));
                sum += term;
                if (std::abs(term) < 1e-18 * std::abs(sum)) break;
            }
            jk[k] = prefix * sum;
        }
    } else {
        for (int k = 0; k < terms; ++k) jk[k] = std::cyl_bessel_j(k, z);
    }

    coeffs.resize(terms);
    Complex ik(1.0, 0.0);  // (-i)^k
    for (int k = 0; k < terms; ++k) {
        coeffs[k] = (k == 0 ? 1.0 : 2.0) * ik * jk[k];
        ik *= Complex(0.0, -1.0);
    }
    return terms;
}

namespace {

// One Chebyshev recurrence sweep over the row-major n x m block.
//   first step:  v = B x            (writes t1)
//   later steps: v = 2 B cur - prev (writes next)
// both fused with acc += coeff * v. Neighbour rows wrap; open ends are
// encoded as zero hop coefficients, so the wrapped read is harmless.

inline void cheb_first(const double* cl, const double* cr, int n, int m, const Complex* x,
                       Complex* t1, Complex* acc, Complex c1) {
    for (int i = 0; i < n; ++i) {
        const int im1 = (i == 0) ? n - 1 : i - 1;
        const int ip1 = (i == n - 1) ? 0 : i + 1;
        const double wl = cl[i], wr = cr[i];
        const Complex* xl = x + static_cast<std::size_t>(im1) * m;
        const Complex* xr = x + static_cast<std::size_t>(ip1) * m;
        Complex* out = t1 + static_cast<std::size_t>(i) * m;
        Complex* ac = acc + static_cast<std::size_t>(i) * m;
        for (int c = 0; c < m; ++c) {
            const Complex v = wl * xl[c] + wr * xr[c];
            out[c] = v;
            ac[c] += c1 * v;
        }
    }
}

inline void cheb_step(const double* cl, const double* cr, int n, int m, const Complex* cur,
                      const Complex* prev, Complex* next, Complex* acc, Complex ck) {
    for (int i = 0; i < n; ++i) {
        const int im1 = (i == 0) ? n - 1 : i - 1;
        const int ip1 = (i == n - 1) ? 0 : i + 1;
        const double wl = 2.0 * cl[i], wr = 2.0 * cr[i];
        const Complex* xl = cur + static_cast<std::size_t>(im1) * m;
        const Complex* xr = cur + static_cast<std::size_t>(ip1) * m;
        const Complex* pv = prev + static_cast<std::size_t>(i) * m;
        Complex* out = next + static_cast<std::size_t>(i) * m;
        Complex* ac = acc + static_cast<std::size_t>(i) * m;
        for (int c = 0; c < m; ++c) {
            const Complex v = wl * xl[c] + wr * xr[c] - pv[c];
            out[c] = v;
            ac[c] += ck * v;
        }
    }
}

// acc = sum_k coeffs[k] * phase * T_k(B) t0. Clobbers t0/t1/t2.
void apply_chebyshev(const std::vector<Complex>& coeffs, int terms, Complex phase,
                     const double* cl, const double* cr, int n, int m, Complex* t0, Complex* t1,
                     Complex* t2, Complex* acc) {
    const std::size_t sz = static_cast<std::size_t>(n) * m;
    const Complex c0 = phase * coeffs[0];
    for (std::size_t s = 0; s < sz; ++s) acc[s] = c0 * t0[s];
    if (terms == 1) return;

    cheb_first(cl, cr, n, m, t0, t1, acc, phase * coeffs[1]);
    Complex* prev = t0;
    Complex* cur = t1;
    Complex* next = t2;
    for (int k = 2; k < terms; ++k) {
        cheb_step(cl, cr, n, m, cur, prev, next, acc, phase * coeffs[k]);
        Complex* tmp = prev;
        prev = cur;
        cur = next;
        next = tmp;
    }
}

// Drives one noise realization of an n x m block through the event-driven
// piecewise-constant evolution, emitting the raw block at each checkpoint.
void walk_realization(const LatticeConfig& config, double chebyshev_tol,
                      const std::vector<double>& checkpoints, std::uint64_t master_seed,
                      int realization, const Eigen::MatrixXcd& initial_block,
                      const std::function<void(int, const Complex*, int)>& emit) {
    const int n = config.n_sites;
    const int m = static_cast<int>(initial_block.cols());
    const int nl = config.n_links();
    const bool ring = config.boundary == Boundary::ring;
    const double t_end = checkpoints.back();

    std::vector<int> sign(nl, +1);
    std::vector<FlipEvent> events;
    if (config.a > 0.0 && t_end > 0.0) {
        const auto trajs =
            sample_realization_trajectories(config, t_end, master_seed, realization);
        for (int l = 0; l < nl; ++l) sign[l] = trajs[l].initial_sign;
        events = merge_events(trajs);
    }

    // Hop coefficients of B = (H - eps I)/r with r covering the full
    // spectral range 2(1+a) of any coupling pattern.
    const double radius = 2.0 * (1.0 + config.a);
    const auto link_coef = [&](int l) { return (-1.0 + config.a * sign[l]) / radius; };
    std::vector<double> cl(n, 0.0), cr(n, 0.0);
    for (int i = 0; i + 1 < n; ++i) cr[i] = link_coef(i);
    for (int i = 1; i < n; ++i) cl[i] = link_coef(i - 1);
    if (ring) {
        cr[n - 1] = link_coef(n - 1);
        cl[0] = link_coef(n - 1);
    }

    const std::size_t sz = static_cast<std::size_t>(n) * m;
    std::vector<Complex> bufA(sz), bufB(sz), bufC(sz), bufD(sz);
    Complex* state = bufA.data();
    Complex* s1 = bufB.data();
    Complex* s2 = bufC.data();
    Complex* acc = bufD.data();
    double initial_mass = 0.0;
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < m; ++c) {
            state[static_cast<std::size_t>(i) * m + c] = initial_block(i, c);
            initial_mass += std::norm(initial_block(i, c));
        }

    std::vector<Complex> coeffs;
    double t = 0.0;
    std::size_t ei = 0;
    int ci = 0;
    while (ci < static_cast<int>(checkpoints.size())) {
        const double t_event =
            ei < events.size() ? events[ei].t : std::numeric_limits<double>::infinity();
        const double t_ckpt = checkpoints[ci];
        const double t_next = std::min(t_event, t_ckpt);
        const double dt = t_next - t;
        if (dt > 0.0) {
            const double tol_i = std::max(chebyshev_tol * dt / t_end, 1e-15);
            const int terms = chebyshev_terms(radius * dt, tol_i, coeffs);
            const Complex phase = std::exp(Complex(0.0, -config.epsilon * dt));
            apply_chebyshev(coeffs, terms, phase, cl.data(), cr.data(), n, m, state, s1, s2, acc);
            std::swap(state, acc);
        }
        if (t_ckpt <= t_event) {
            emit(ci, state, m);
            ++ci;
        } else {
            const int l = events[ei].link;
            sign[l] = -sign[l];
            cr[l] = link_coef(l);
            cl[(l + 1) % n] = link_coef(l);
            ++ei;
        }
        t = t_next;
    }

    double final_mass = 0.0;
    for (std::size_t s = 0; s < sz; ++s) final_mass += std::norm(state[s]);
    if (std::abs(final_mass - initial_mass) > 1e-6 * std::max(1.0, initial_mass))
        throw NumericalError("propagation norm drift exceeded 1e-6 over one realization");
}

}  // namespace

Eigen::VectorXcd interval_propagate(const SparseHamiltonian& h, const CouplingVector& g,
                                    const Eigen::VectorXcd& psi, double dt, double tol) {
    const LatticeConfig& config = h.config();
    const int n = config.n_sites;
    if (static_cast<int>(g.size()) != config.n_links())
        throw std::invalid_argument("coupling vector length does not match link count");
    if (psi.size() != n) throw std::invalid_argument("state dimension does not match lattice");
    if (dt < 0.0) throw std::invalid_argument("propagation time must be non-negative");
    if (!(tol > 0.0)) throw std::invalid_argument("propagation tolerance must be positive");
    if (dt == 0.0) return psi;

    double max_hop = 0.0;
    for (double gl : g) max_hop = std::max(max_hop, std::abs(-1.0 + gl));
    const double radius = std::max(2.0 * max_hop, 1e-30);

    const bool ring = config.boundary == Boundary::ring;
    std::vector<double> cl(n, 0.0), cr(n, 0.0);
    for (int i = 0; i + 1 < n; ++i) cr[i] = (-1.0 + g[i]) / radius;
    for (int i = 1; i < n; ++i) cl[i] = (-1.0 + g[i - 1]) / radius;
    if (ring) {
        cr[n - 1] = (-1.0 + g[n - 1]) / radius;
        cl[0] = (-1.0 + g[n - 1]) / radius;
    }

    std::vector<Complex> coeffs;
    const int terms = chebyshev_terms(radius * dt, tol, coeffs);
    const Complex phase = std::exp(Complex(0.0, -config.epsilon * dt));

    std::vector<Complex> t0(psi.data(), psi.data() + n), t1(n), t2(n), acc(n);
    apply_chebyshev(coeffs, terms, phase, cl.data(), cr.data(), n, 1, t0.data(), t1.data(),
                    t2.data(), acc.data());
    return Eigen::Map<Eigen::VectorXcd>(acc.data(), n);
}

std::vector<TelegraphTrajectory> sample_realization_trajectories(const LatticeConfig& config,
                                                                 double t_max,
                                                                 std::uint64_t master_seed,
                                                                 int realization_index) {
    config.validate();
    if (realization_index < 0) throw std::invalid_argument("realization index must be >= 0");
    const int nl = config.n_links();
    std::vector<TelegraphTrajectory> trajs;
    trajs.reserve(nl);
    for (int l = 0; l < nl; ++l) {
        const NoiseEnsembleSeed seed{master_seed, static_cast<std::uint64_t>(realization_index),
                                     static_cast<std::uint64_t>(l)};
        trajs.push_back(sample_trajectory(config.gamma, config.a, t_max, seed.stream()));
    }
    return trajs;
}

TrajectoryResult evolve_realization(const EvolutionPlan& plan, const Eigen::VectorXcd& psi0,
                                    int realization_index) {
    plan.validate();
    if (psi0.size() != plan.config.n_sites)
        throw std::invalid_argument("state dimension does not match lattice");
    if (realization_index < 0 || realization_index >= plan.n_realizations)
        throw std::invalid_argument("realization index out of range");

    TrajectoryResult result;
    result.states.resize(plan.checkpoints.size());
    walk_realization(plan.config, plan.chebyshev_tol, plan.checkpoints, plan.master_seed,
                     realization_index, psi0,
                     [&](int ci, const Complex* data, int) {
                         result.states[ci] = Eigen::Map<const Eigen::VectorXcd>(data, psi0.size());
                     });
    return result;
}

namespace {

struct BlockResult {
    std::vector<Eigen::VectorXd> diag;
    std::vector<Eigen::MatrixXcd> rho;
    int count = 0;
};

}  // namespace

EnsembleAccumulation run_ensemble(const EnsembleSpec& spec) {
    spec.plan.validate();
    const int n = spec.plan.config.n_sites;
    const int nc = static_cast<int>(spec.plan.checkpoints.size());
    const int R = spec.plan.n_realizations;
    if (spec.initial_block.rows() != n)
        throw std::invalid_argument("initial block row count does not match lattice");
    if (spec.initial_block.cols() < 1)
        throw std::invalid_argument("initial block needs at least one column");
    if (spec.options.threads < 1) throw std::invalid_argument("options.threads must be >= 1");
    if (spec.options.block_size < 1)
        throw std::invalid_argument("options.block_size must be >= 1");
    if (spec.options.batch_count < 1)
        throw std::invalid_argument("options.batch_count must be >= 1");

    const int bs = spec.options.block_size;
    const int n_blocks = (R + bs - 1) / bs;
    const int n_batches = std::min(spec.options.batch_count, n_blocks);
    const auto batch_of_block = [&](int b) {
        return static_cast<int>((static_cast<long long>(b) * n_batches) / n_blocks);
    };
    const bool want_rho = spec.want_density;
    const int n_obs = static_cast<int>(spec.batch_observables.size());

    EnsembleAccumulation out;
    out.site_weights.assign(nc, Eigen::VectorXd::Zero(n));
    if (want_rho) out.densities.assign(nc, Eigen::MatrixXcd::Zero(n, n));
    out.batch_series.resize(n_obs);
    for (int o = 0; o < n_obs; ++o) {
        out.batch_series[o].name = spec.batch_observables[o].first;
        out.batch_series[o].values.assign(n_batches, std::vector<double>(nc, 0.0));
    }
    out.batch_counts.assign(n_batches, 0);

    // Per-batch running sums, reset after each batch closes.
    std::vector<Eigen::VectorXd> batch_diag(nc, Eigen::VectorXd::Zero(n));
    std::vector<Eigen::MatrixXcd> batch_rho;
    if (want_rho) batch_rho.assign(nc, Eigen::MatrixXcd::Zero(n, n));
    int batch_members = 0;

    const auto process_block = [&](int b) {
        BlockResult res;
        res.diag.assign(nc, Eigen::VectorXd::Zero(n));
        if (want_rho) res.rho.assign(nc, Eigen::MatrixXcd::Zero(n, n));
        const int r_lo = b * bs;
        const int r_hi = std::min(R, r_lo + bs);
        res.count = r_hi - r_lo;
        const int m = static_cast<int>(spec.initial_block.cols());
        Eigen::MatrixXcd scratch(n, m);
        for (int r = r_lo; r < r_hi; ++r) {
            walk_realization(spec.plan.config, spec.plan.chebyshev_tol, spec.plan.checkpoints,
                             spec.plan.master_seed, r, spec.initial_block,
                             [&](int ci, const Complex* data, int cols) {
                                 auto& d = res.diag[ci];
                                 for (int i = 0; i < n; ++i) {
                                     double w = 0.0;
                                     const Complex* row =
                                         data + static_cast<std::size_t>(i) * cols;
                                     for (int c = 0; c < cols; ++c) w += std::norm(row[c]);
                                     d[i] += w;
                                 }
                                 if (want_rho) {
                                     for (int i = 0; i < n; ++i)
                                         for (int c = 0; c < cols; ++c)
                                             scratch(i, c) =
                                                 data[static_cast<std::size_t>(i) * cols + c];
                                     res.rho[ci]
                                         .selfadjointView<Eigen::Lower>()
                                         .rankUpdate(scratch, 1.0);
                                 }
                             });
        }
        return res;
    };

    Eigen::VectorXd mean_diag(n);
    Eigen::MatrixXcd mean_rho;
    if (want_rho) mean_rho.resize(n, n);

    const auto fold_block = [&](int b, BlockResult&& res) {
        for (int c = 0; c < nc; ++c) {
            out.site_weights[c] += res.diag[c];
            batch_diag[c] += res.diag[c];
            if (want_rho) {
                out.densities[c] += res.rho[c];
                batch_rho[c] += res.rho[c];
            }
        }
        batch_members += res.count;
        const int bat = batch_of_block(b);
        const bool closes = (b + 1 == n_blocks) || (batch_of_block(b + 1) != bat);
        if (closes) {
            out.batch_counts[bat] = batch_members;
            for (int c = 0; c < nc; ++c) {
                mean_diag = batch_diag[c] / batch_members;
                const Eigen::MatrixXcd* rho_ptr = nullptr;
                if (want_rho) {
                    mean_rho = batch_rho[c].selfadjointView<Eigen::Lower>();
                    mean_rho /= batch_members;
                    rho_ptr = &mean_rho;
                }
                for (int o = 0; o < n_obs; ++o)
                    out.batch_series[o].values[bat][c] =
                        spec.batch_observables[o].second(c, mean_diag, rho_ptr);
            }
            for (int c = 0; c < nc; ++c) {
                batch_diag[c].setZero();
                if (want_rho) batch_rho[c].setZero();
            }
            batch_members = 0;
        }
    };

    const int workers = std::min(spec.options.threads, n_blocks);
    if (workers <= 1) {
        for (int b = 0; b < n_blocks; ++b) fold_block(b, process_block(b));
    } else {
        std::mutex mtx;
        std::condition_variable cv;
        std::map<int, BlockResult> parked;
        int next_claim = 0, next_fold = 0;
        std::exception_ptr failure;
        const int max_ahead = 2 * workers + 2;

        const auto worker = [&] {
            for (;;) {
                int b;
                {
                    std::unique_lock<std::mutex> lock(mtx);
                    cv.wait(lock, [&] {
                        return failure || next_claim >= n_blocks ||
                               next_claim - next_fold < max_ahead;
                    });
                    if (failure || next_claim >= n_blocks) return;
                    b = next_claim++;
                }
                BlockResult res;
                try {
                    res = process_block(b);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(mtx);
                    if (!failure) failure = std::current_exception();
                    cv.notify_all();
                    return;
                }
                std::lock_guard<std::mutex> lock(mtx);
                parked.emplace(b, std::move(res));
                while (!parked.empty() && parked.begin()->first == next_fold) {
                    auto node = parked.extract(parked.begin());
                    fold_block(next_fold, std::move(node.mapped()));
                    ++next_fold;
                }
                cv.notify_all();
            }
        };

        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
        if (failure) std::rethrow_exception(failure);
    }

    for (int c = 0; c < nc; ++c) {
        out.site_weights[c] /= R;
        if (want_rho) {
            out.densities[c] = out.densities[c].selfadjointView<Eigen::Lower>();
            out.densities[c] /= R;
        }
    }
    return out;
}

std::vector<double> batch_standard_error(const BatchScalarSeries& series) {
    const int nb = static_cast<int>(series.values.size());
    if (nb == 0) return {};
    const int nc = static_cast<int>(series.values[0].size());
    std::vector<double> se(nc, 0.0);
    if (nb < 2) return se;
    for (int c = 0; c < nc; ++c) {
        double mean = 0.0;
        for (int b = 0; b < nb; ++b) mean += series.values[b][c];
        mean /= nb;
        double var = 0.0;
        for (int b = 0; b < nb; ++b) {
            const double d = series.values[b][c] - mean;
            var += d * d;
        }
        se[c] = std::sqrt(var / (static_cast<double>(nb) * (nb - 1)));
    }
    return se;
}

std::vector<Eigen::MatrixXcd> ensemble_density(const EvolutionPlan& plan,
                                               const Eigen::VectorXcd& psi0,
                                               const EnsembleOptions& options) {
    if (psi0.size() != plan.config.n_sites)
        throw std::invalid_argument("state dimension does not match lattice");
    EnsembleSpec spec;
    spec.plan = plan;
    spec.initial_block = psi0;
    spec.want_density = true;
    spec.options = options;
    return run_ensemble(spec).densities;
}

std::vector<Eigen::MatrixXcd> evolve_density_fresh_series(
    const LatticeConfig& config, const std::vector<double>& durations, int n_realizations,
    std::uint64_t seed, const Eigen::MatrixXcd& rho_in, double chebyshev_tol, double weight_tol,
    const EnsembleOptions& options) {
    if (rho_in.rows() != config.n_sites || rho_in.cols() != config.n_sites)
        throw std::invalid_argument("density matrix dimension does not match lattice");

    const auto ensemble = spectral_ensemble(rho_in, weight_tol);
    if (ensemble.empty())
        throw std::invalid_argument("density matrix carries no positive weight");
    double retained = 0.0;
    for (const auto& [w, v] : ensemble) retained += w;

    const int n = config.n_sites;
    const int m = static_cast<int>(ensemble.size());
    Eigen::MatrixXcd block(n, m);
    for (int c = 0; c < m; ++c)
        block.col(c) = std::sqrt(ensemble[c].first / retained) * ensemble[c].second;

    EnsembleSpec spec;
    spec.plan.config = config;
    spec.plan.checkpoints = durations;
    spec.plan.n_realizations = n_realizations;
    spec.plan.master_seed = seed;
    spec.plan.chebyshev_tol = chebyshev_tol;
    spec.initial_block = std::move(block);
    spec.want_density = true;
    spec.options = options;
    return run_ensemble(spec).densities;
}

Eigen::MatrixXcd evolve_density_fresh(const LatticeConfig& config, double duration,
                                      int n_realizations, std::uint64_t seed,
                                      const Eigen::MatrixXcd& rho_in, double chebyshev_tol,
                                      double weight_tol, const EnsembleOptions& options) {
    return evolve_density_fresh_series(config, {duration}, n_realizations, seed, rho_in,
                                       chebyshev_tol, weight_tol, options)
        .front();
}

}  // namespace ctqw
