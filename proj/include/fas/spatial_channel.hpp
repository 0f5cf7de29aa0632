#pragma once

#include <complex>
#include <concepts>
#include <cstddef>
#include <numbers>
#include <vector>

#include <Eigen/Core>

#include "fas/random.hpp"
#include "fas/special_functions.hpp"

namespace fas {

/// Linear fluid-antenna aperture: N ports uniformly spread over W carrier
/// wavelengths. All distances are in wavelengths.
struct ApertureConfig {
    int num_ports = 1;
    double aperture_width = 0.0;
    /// Per-port mean channel power; empty means all ports have unit power.
    std::vector<double> mean_powers;

    /// Throws DomainError on N < 1, W < 0, a size mismatch, or a
    /// nonpositive power.
    void validate() const;
    double mean_power(int port) const;
    bool normalized_powers() const;
};

inline constexpr double kDefaultRankThreshold = 1e-10;

/// Spatial correlation matrix with its descending eigen-factorization.
struct CorrelationModel {
    Eigen::MatrixXd matrix;
    /// Descending; unclamped values straight from the eigensolver.
    Eigen::VectorXd eigenvalues;
    /// Descending, with values below the rank threshold set to zero.
    Eigen::VectorXd sampling_eigenvalues;
    Eigen::MatrixXd eigenvectors;
    int effective_rank = 0;
    /// Sum of ln(lambda_n) over the retained eigenvalues.
    double pseudo_log_det = 0.0;
    double rank_threshold = kDefaultRankThreshold;

    int size() const noexcept { return int(matrix.rows()); }
};

struct ChannelDraw {
    std::vector<std::complex<double>> coefficients;
    int best_port = 0;  // zero-based
    double best_gain = 0.0;
    /// ||z||^2 over the source components that reach the ports (nonzero eigenvalues).
    double source_energy = 0.0;
    /// Number of source components counted in source_energy; 0 means all ports.
    int source_dof = 0;
    /// Likelihood ratio of the draw under its sampling law; 1 for plain sampling.
    double weight = 1.0;
};

/// Distance between ports i and j (one-based) in wavelengths.
double port_spacing(int i, int j, const ApertureConfig& cfg);

/// Jakes correlation matrix J_ij = J0(2 pi W |i-j| / (N-1)), exactly symmetric.
template <std::floating_point Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> jakes_correlation(const ApertureConfig& cfg)
{
    cfg.validate();
    const int n = cfg.num_ports;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> j(n, n);
    const Scalar step = n > 1 ? Scalar(2) * std::numbers::pi_v<Scalar> * Scalar(cfg.aperture_width) /
                                    Scalar(n - 1)
                              : Scalar(0);
    for (int r = 0; r < n; ++r) {
        j(r, r) = Scalar(1);
        for (int c = r + 1; c < n; ++c) {
            const Scalar value = bessel_j0(step * Scalar(c - r));
            j(r, c) = value;
            j(c, r) = value;
        }
    }
    return j;
}

/// Factorize a symmetric PSD correlation matrix. Throws ModelError if an
/// eigenvalue is below -1e-8 * lambda_max.
CorrelationModel factorize_correlation(const Eigen::MatrixXd& matrix,
                                       double rank_threshold = kDefaultRankThreshold);

CorrelationModel build_jakes_model(const ApertureConfig& cfg,
                                   double rank_threshold = kDefaultRankThreshold);

inline int effective_rank(const CorrelationModel& model) noexcept { return model.effective_rank; }

/// Precomputed h = T U Lambda^{1/2} z sampler with best-port selection.
class ChannelSampler {
public:
    ChannelSampler(const CorrelationModel& model, const ApertureConfig& cfg);

    int num_ports() const noexcept { return int(mixing_.rows()); }
    const Eigen::MatrixXd& mixing() const noexcept { return mixing_; }

    ChannelDraw operator()(RandomStream& stream) const;

    /// Fill `draw` in place, reusing its storage.
    void sample(RandomStream& stream, ChannelDraw& draw) const;

private:
    Eigen::MatrixXd mixing_;
    int active_ = 0;
};

ChannelDraw sample_channel(const CorrelationModel& model, const ApertureConfig& cfg,
                           RandomStream& stream);

/// Pick the strongest port; ties go to the lowest index.
void select_best_port(ChannelDraw& draw) noexcept;

/// gamma_FAS = mean_snr * g_FAS^2.
double instantaneous_snr(const ChannelDraw& draw, double mean_snr);

} // namespace fas
