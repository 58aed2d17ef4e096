#include "ctqw/observables.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ctqw {

namespace {

std::vector<double> clean_distribution(std::vector<double> p) {
    double sum = 0.0;
    bool clamped = false;
    for (double& v : p) {
        if (v < -1e-12)
            throw std::invalid_argument("site probability below -1e-12");
        if (v < 0.0) {
            v = 0.0;
            clamped = true;
        }
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-6)
        throw std::invalid_argument("site probabilities do not sum to 1");
    if (clamped)
        for (double& v : p) v /= sum;
    return p;
}

}  // namespace

std::vector<double> site_distribution(const Eigen::MatrixXcd& rho) {
    if (rho.rows() != rho.cols()) throw std::invalid_argument("density matrix must be square");
    std::vector<double> p(rho.rows());
    for (Eigen::Index i = 0; i < rho.rows(); ++i) p[i] = rho(i, i).real();
    return clean_distribution(std::move(p));
}

std::vector<double> site_distribution(const Eigen::VectorXd& diagonal) {
    return clean_distribution(std::vector<double>(diagonal.data(), diagonal.data() + diagonal.size()));
}

PositionMoments position_moments(const std::vector<double>& distribution) {
    if (distribution.empty()) throw std::invalid_argument("empty distribution");
    PositionMoments moments;
    for (std::size_t i = 0; i < distribution.size(); ++i)
        moments.mean += (i + 1.0) * distribution[i];
    for (std::size_t i = 0; i < distribution.size(); ++i) {
        const double d = (i + 1.0) - moments.mean;
        moments.variance += d * d * distribution[i];
    }
    return moments;
}

double negentropy(const std::vector<double>& distribution) {
    const auto moments = position_moments(distribution);
    if (!(moments.variance > 0.0))
        throw std::domain_error("negentropy undefined for zero-variance distribution");
    double shannon = 0.0;  // actually -H, accumulated as sum p log p
    for (double p : distribution)
        if (p > 0.0) shannon += p * std::log(p);
    return 0.5 * (1.0 + std::log(2.0 * M_PI * moments.variance)) + shannon;
}

double coherence_l1(const Eigen::MatrixXcd& rho) {
    if (rho.rows() != rho.cols()) throw std::invalid_argument("density matrix must be square");
    double sum = 0.0;
    for (Eigen::Index j = 0; j < rho.cols(); ++j)
        for (Eigen::Index i = 0; i < rho.rows(); ++i)
            if (i != j) sum += std::abs(rho(i, j));
    return sum;
}

double trace_distance(const Eigen::MatrixXcd& rho1, const Eigen::MatrixXcd& rho2) {
    if (rho1.rows() != rho2.rows() || rho1.cols() != rho2.cols())
        throw std::invalid_argument("trace distance needs equal dimensions");
    if (rho1.rows() != rho1.cols()) throw std::invalid_argument("density matrix must be square");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho1 - rho2, Eigen::EigenvaluesOnly);
    const double d = 0.5 * solver.eigenvalues().cwiseAbs().sum();
    return std::min(1.0, std::max(0.0, d));
}

CrossoverFit fit_crossover(const std::vector<double>& taus, const std::vector<double>& values) {
    const int n = static_cast<int>(taus.size());
    if (n != static_cast<int>(values.size()))
        throw std::invalid_argument("crossover fit needs matching series lengths");
    if (n < 6) throw std::invalid_argument("crossover fit needs at least 6 points");

    std::vector<double> lx(n), ly(n);
    for (int i = 0; i < n; ++i) {
        if (!(taus[i] > 0.0) || !(values[i] > 0.0))
            throw std::invalid_argument("crossover fit needs positive times and values");
        if (i > 0 && !(taus[i] > taus[i - 1]))
            throw std::invalid_argument("crossover fit needs strictly increasing times");
        lx[i] = std::log(taus[i]);
        ly[i] = std::log(values[i]);
    }

    // Segmented model y = b + s_e min(x - xc, 0) + s_l max(x - xc, 0): two
    // lines sharing their value at the breakpoint xc. For fixed xc the three
    // linear parameters have a closed-form least-squares solution; returns the
    // total squared residual (infinity when the normal equations degenerate).
    double s_early = 0.0, s_late = 0.0;
    const auto ssr_at = [&](double xc) {
        double m[3][3] = {};
        double rhs[3] = {};
        for (int i = 0; i < n; ++i) {
            const double row[3] = {1.0, std::min(lx[i] - xc, 0.0), std::max(lx[i] - xc, 0.0)};
            for (int r = 0; r < 3; ++r) {
                rhs[r] += row[r] * ly[i];
                for (int c = 0; c < 3; ++c) m[r][c] += row[r] * row[c];
            }
        }
        double aug[3][4];
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) aug[r][c] = m[r][c];
            aug[r][3] = rhs[r];
        }
        for (int c = 0; c < 3; ++c) {
            int pivot = c;
            for (int r = c + 1; r < 3; ++r)
                if (std::abs(aug[r][c]) > std::abs(aug[pivot][c])) pivot = r;
            for (int k = 0; k < 4; ++k) std::swap(aug[c][k], aug[pivot][k]);
            if (std::abs(aug[c][c]) < 1e-12) return std::numeric_limits<double>::infinity();
            for (int r = 0; r < 3; ++r) {
                if (r == c) continue;
                const double f = aug[r][c] / aug[c][c];
                for (int k = c; k < 4; ++k) aug[r][k] -= f * aug[c][k];
            }
        }
        const double b = aug[0][3] / aug[0][0];
        s_early = aug[1][3] / aug[1][1];
        s_late = aug[2][3] / aug[2][2];
        double ssr = 0.0;
        for (int i = 0; i < n; ++i) {
            const double d =
                ly[i] - (b + s_early * std::min(lx[i] - xc, 0.0) + s_late * std::max(lx[i] - xc, 0.0));
            ssr += d * d;
        }
        return ssr;
    };

    // The breakpoint is confined so at least three points sit strictly on each
    // side. Dense scan over that interval, then golden-section refinement of
    // the best bracket (the objective is piecewise smooth in xc).
    const double lo = lx[2], hi = lx[n - 3];
    const int n_scan = 512;
    double best_xc = 0.5 * (lo + hi);
    double best_ssr = std::numeric_limits<double>::infinity();
    for (int i = 1; i < n_scan; ++i) {
        const double xc = lo + (hi - lo) * i / n_scan;
        const double ssr = ssr_at(xc);
        if (ssr < best_ssr) {
            best_ssr = ssr;
            best_xc = xc;
        }
    }
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = std::max(lo, best_xc - (hi - lo) / n_scan);
    double b = std::min(hi, best_xc + (hi - lo) / n_scan);
    double c = b - phi * (b - a), d = a + phi * (b - a);
    double fc = ssr_at(c), fd = ssr_at(d);
    for (int it = 0; it < 80; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = ssr_at(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = ssr_at(d);
        }
    }
    const double xc = 0.5 * (a + b);
    const double ssr = ssr_at(xc);

    CrossoverFit best;
    if (ssr < best_ssr) {
        best.tau_c = std::exp(xc);
        best.residual = ssr;
    } else {
        best.tau_c = std::exp(best_xc);
        best.residual = ssr_at(best_xc);
    }
    best.exponent_early = s_early;
    best.exponent_late = s_late;
    return best;
}

}  // namespace ctqw
