#pragma once

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include "fas/modulation.hpp"
#include "fas/random.hpp"
#include "fas/spatial_channel.hpp"

namespace fas {

/// How each trial contributes to the SER average.
///  - SemiAnalytic: p Q(sqrt(k g^2 snr)) at the drawn channel.
///  - Conditional: the same quantity averaged in closed form over the radial
///    part ||z||^2 ~ Gamma(r, 1) of the source vector (r retained eigenvalues),
///    keeping only its direction random. Directions are importance sampled
///    toward the weak eigenvectors; ChannelDraw::weight carries the ratio.
///    Unbiased for the same expectation, with bounded relative variance at
///    high SNR.
///  - SymbolLevel: one uniformly drawn symbol through the best port, detected
///    against unit-variance complex noise; counts symbol errors.
enum class Estimator { SemiAnalytic, Conditional, SymbolLevel };

std::string_view estimator_name(Estimator estimator) noexcept;
Estimator parse_estimator(std::string_view name);

/// Trials per work unit; fixed so that results do not depend on worker count.
inline constexpr std::uint64_t kChunkTrials = 4096;

struct SimulationConfig {
    ApertureConfig aperture;
    ModulationSpec spec;
    std::vector<double> snr_grid_db;
    std::uint64_t trials = 1'000'000;
    std::uint64_t master_seed = 42;
    Estimator estimator = Estimator::Conditional;
    unsigned workers = 1;
    double rank_threshold = kDefaultRankThreshold;

    void validate() const;
};

struct SerEstimate {
    double snr_db = 0.0;
    double ser_mean = 0.0;
    double ser_stderr = 0.0;
    std::uint64_t trials = 0;

    bool operator==(const SerEstimate&) const = default;
};

/// Fills a ChannelDraw from a per-trial stream.
using ChannelSource = std::function<void(RandomStream&, ChannelDraw&)>;

/// Jakes-correlated FAS channel for the configured aperture.
std::vector<SerEstimate> estimate_ser(const SimulationConfig& cfg);

/// Same engine with a caller-provided channel.
std::vector<SerEstimate> estimate_ser(const SimulationConfig& cfg, const ChannelSource& source);

/// E[Q(sqrt(2 b Y))] for Y ~ Gamma(dof, 1):
///   ((1-mu)/2)^L sum_{l<L} C(L-1+l, l) ((1+mu)/2)^l,  mu = sqrt(b/(1+b)).
double gamma_averaged_q(double b, int dof);

/// |g_FAS|^2 for `count` trials of the Jakes channel (trial i uses stream i).
std::vector<double> sample_selected_gains(const CorrelationModel& model, const ApertureConfig& cfg,
                                          std::uint64_t master_seed, std::uint64_t count,
                                          unsigned workers = 1);

/// Worker count for "use the machine".
unsigned default_workers() noexcept;

} // namespace fas
