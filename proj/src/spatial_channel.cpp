#include "fas/spatial_channel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "fas/errors.hpp"

namespace fas {

void ApertureConfig::validate() const
{
    if (num_ports < 1)
        throw DomainError("ApertureConfig: num_ports must be >= 1");
    if (!(aperture_width >= 0.0) || !std::isfinite(aperture_width))
        throw DomainError("ApertureConfig: aperture_width must be finite and >= 0");
    if (!mean_powers.empty()) {
        if (int(mean_powers.size()) != num_ports)
            throw DomainError("ApertureConfig: mean_powers has " + std::to_string(mean_powers.size()) +
                              " entries for " + std::to_string(num_ports) + " ports");
        for (double power : mean_powers)
            if (!(power > 0.0) || !std::isfinite(power))
                throw DomainError("ApertureConfig: mean powers must be finite and > 0");
    }
}

double ApertureConfig::mean_power(int port) const
{
    return mean_powers.empty() ? 1.0 : mean_powers.at(std::size_t(port));
}

bool ApertureConfig::normalized_powers() const
{
    return std::all_of(mean_powers.begin(), mean_powers.end(), [](double p) { return p == 1.0; });
}

double port_spacing(int i, int j, const ApertureConfig& cfg)
{
    cfg.validate();
    if (cfg.num_ports < 2)
        throw DomainError("port_spacing: a single-port aperture has no port pairs");
    if (i < 1 || i > cfg.num_ports || j < 1 || j > cfg.num_ports)
        throw DomainError("port_spacing: port index out of range");
    return double(std::abs(i - j)) * cfg.aperture_width / double(cfg.num_ports - 1);
}

CorrelationModel factorize_correlation(const Eigen::MatrixXd& matrix, double rank_threshold)
{
    if (!(rank_threshold > 0.0))
        throw DomainError("rank_threshold must be > 0");
    if (matrix.rows() != matrix.cols() || matrix.rows() == 0)
        throw DomainError("correlation matrix must be square and nonempty");

    CorrelationModel model;
    model.matrix = matrix;
    model.rank_threshold = rank_threshold;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix);
    if (solver.info() != Eigen::Success)
        throw ModelError("eigendecomposition of the correlation matrix failed");

    // Eigen returns ascending order.
    model.eigenvalues = solver.eigenvalues().reverse();
    model.eigenvectors = solver.eigenvectors().rowwise().reverse();

    const auto n = model.eigenvalues.size();
    const double largest = model.eigenvalues(0);
    if (!(largest > 0.0))
        throw ModelError("correlation matrix has no positive eigenvalue");
    if (model.eigenvalues(n - 1) < -1e-8 * largest)
        throw ModelError("correlation matrix is not positive semidefinite (eigenvalue " +
                         std::to_string(model.eigenvalues(n - 1)) + ")");

    const double cutoff = rank_threshold * largest;
    model.sampling_eigenvalues = model.eigenvalues;
    model.effective_rank = 0;
    model.pseudo_log_det = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        const double lambda = model.eigenvalues(k);
        if (lambda > cutoff) {
            ++model.effective_rank;
            model.pseudo_log_det += std::log(lambda);
        } else {
            model.sampling_eigenvalues(k) = 0.0;
        }
    }
    return model;
}

CorrelationModel build_jakes_model(const ApertureConfig& cfg, double rank_threshold)
{
    return factorize_correlation(jakes_correlation<double>(cfg), rank_threshold);
}

ChannelSampler::ChannelSampler(const CorrelationModel& model, const ApertureConfig& cfg)
{
    cfg.validate();
    if (cfg.num_ports != model.size())
        throw DomainError("ChannelSampler: aperture and correlation model sizes differ");
    const Eigen::VectorXd root = model.sampling_eigenvalues.cwiseSqrt();
    mixing_ = model.eigenvectors * root.asDiagonal();
    active_ = int((model.sampling_eigenvalues.array() > 0.0).count());
    for (int row = 0; row < cfg.num_ports; ++row)
        mixing_.row(row) *= std::sqrt(cfg.mean_power(row));
}

void ChannelSampler::sample(RandomStream& stream, ChannelDraw& draw) const
{
    const int n = num_ports();
    thread_local std::vector<std::complex<double>> source;
    source.resize(std::size_t(n));
    double energy = 0.0;
    for (int col = 0; col < n; ++col) {
        source[std::size_t(col)] = stream.complex_normal();
        if (col < active_)
            energy += std::norm(source[std::size_t(col)]);
    }
    draw.coefficients.assign(std::size_t(n), {0.0, 0.0});
    for (int col = 0; col < n; ++col) {
        const std::complex<double> z = source[std::size_t(col)];
        for (int row = 0; row < n; ++row)
            draw.coefficients[std::size_t(row)] += mixing_(row, col) * z;
    }
    draw.source_energy = energy;
    draw.source_dof = active_;
    select_best_port(draw);
}

ChannelDraw ChannelSampler::operator()(RandomStream& stream) const
{
    ChannelDraw draw;
    sample(stream, draw);
    return draw;
}

ChannelDraw sample_channel(const CorrelationModel& model, const ApertureConfig& cfg,
                           RandomStream& stream)
{
    return ChannelSampler(model, cfg)(stream);
}

void select_best_port(ChannelDraw& draw) noexcept
{
    draw.best_port = 0;
    double best = -1.0;
    for (std::size_t n = 0; n < draw.coefficients.size(); ++n) {
        const double gain = std::abs(draw.coefficients[n]);
        if (gain > best) {
            best = gain;
            draw.best_port = int(n);
        }
    }
    draw.best_gain = std::max(best, 0.0);
}

double instantaneous_snr(const ChannelDraw& draw, double mean_snr)
{
    if (!(mean_snr > 0.0))
        throw DomainError("instantaneous_snr: mean SNR must be > 0");
    return mean_snr * draw.best_gain * draw.best_gain;
}

} // namespace fas
