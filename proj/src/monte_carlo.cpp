#include "fas/monte_carlo.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "fas/asymptotics.hpp"
#include "fas/errors.hpp"
#include "fas/special_functions.hpp"

namespace fas {

namespace {

// Running summary, merged in chunk order. `sum` is a plain ordered sum so
// that the reported mean is monotone in every per-trial value; mean/M2 are
// Welford terms used only for the spread.
struct Moments {
    std::uint64_t count = 0;
    double sum = 0.0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) noexcept
    {
        ++count;
        sum += x;
        const double delta = x - mean;
        mean += delta / double(count);
        m2 += delta * (x - mean);
    }

    void merge(const Moments& other) noexcept
    {
        if (other.count == 0)
            return;
        if (count == 0) {
            *this = other;
            return;
        }
        sum += other.sum;
        const double total = double(count + other.count);
        const double delta = other.mean - mean;
        mean += delta * double(other.count) / total;
        m2 += other.m2 + delta * delta * double(count) * double(other.count) / total;
        count += other.count;
    }
};

// Runs fn(chunk) for chunk in [0, chunks) over `workers` threads. The first
// exception thrown by any chunk is rethrown on the caller.
template <typename Fn>
void for_each_chunk(std::uint64_t chunks, unsigned workers, Fn&& fn)
{
    workers = std::max(1u, std::min<unsigned>(workers, unsigned(std::max<std::uint64_t>(chunks, 1))));
    if (workers == 1) {
        for (std::uint64_t c = 0; c < chunks; ++c)
            fn(c);
        return;
    }
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto body = [&] {
        for (;;) {
            const std::uint64_t c = next.fetch_add(1);
            if (c >= chunks)
                return;
            try {
                fn(c);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                next.store(chunks);
                return;
            }
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back(body);
    pool.clear();
    if (failure)
        std::rethrow_exception(failure);
}

// Draws the source vector from an equal mixture of complex Gaussians
// CN(0, diag(s_j)) with s_jk = (lambda_1 / lambda_k)^alpha_j, which puts more
// directions near the weak eigenvectors where the selected gain is small.
// The weight is the ratio of the uniform density on the sphere to the mixture
// of angular central Gaussian densities det(S)^-1 (d^H S^-1 d)^-r.
class DirectionalSampler {
public:
    static constexpr std::array<double, 5> kTilts{0.0, 0.25, 0.5, 0.75, 1.0};

    DirectionalSampler(const CorrelationModel& model, const ApertureConfig& cfg)
    {
        const ChannelSampler base(model, cfg);
        rank_ = int((model.sampling_eigenvalues.array() > 0.0).count());
        mixing_ = base.mixing().leftCols(rank_);
        const double top = model.sampling_eigenvalues(0);
        for (std::size_t j = 0; j < kTilts.size(); ++j) {
            root_[j].resize(rank_);
            inverse_[j].resize(rank_);
            log_det_[j] = 0.0;
            for (int k = 0; k < rank_; ++k) {
                const double scale = std::pow(top / model.sampling_eigenvalues(k), kTilts[j]);
                root_[j](k) = std::sqrt(scale);
                inverse_[j](k) = 1.0 / scale;
                log_det_[j] += std::log(scale);
            }
        }
    }

    void sample(RandomStream& stream, ChannelDraw& draw) const
    {
        const auto pick = stream.uniform_index(kTilts.size());
        thread_local Eigen::VectorXcd source;
        thread_local Eigen::VectorXd power;
        source.resize(rank_);
        power.resize(rank_);
        double energy = 0.0;
        for (int k = 0; k < rank_; ++k) {
            source(k) = root_[pick](k) * stream.complex_normal();
            power(k) = std::norm(source(k));
            energy += power(k);
        }
        const Eigen::VectorXcd h = mixing_ * source;
        draw.coefficients.assign(h.data(), h.data() + h.size());
        select_best_port(draw);
        draw.source_energy = energy;
        draw.source_dof = rank_;

        std::array<double, kTilts.size()> log_density;
        for (std::size_t j = 0; j < kTilts.size(); ++j)
            log_density[j] = -log_det_[j] - rank_ * std::log(power.dot(inverse_[j]) / energy);
        const double peak = *std::max_element(log_density.begin(), log_density.end());
        double mix = 0.0;
        for (double v : log_density)
            mix += std::exp(v - peak);
        draw.weight = std::exp(-peak) * double(kTilts.size()) / mix;
    }

private:
    int rank_ = 0;
    Eigen::MatrixXcd mixing_;
    std::array<Eigen::VectorXd, kTilts.size()> root_;
    std::array<Eigen::VectorXd, kTilts.size()> inverse_;
    std::array<double, kTilts.size()> log_det_{};
};

std::uint64_t chunk_count(std::uint64_t trials) noexcept
{
    return (trials + kChunkTrials - 1) / kChunkTrials;
}

} // namespace

std::string_view estimator_name(Estimator estimator) noexcept
{
    switch (estimator) {
    case Estimator::SemiAnalytic: return "semi_analytic";
    case Estimator::Conditional: return "conditional";
    case Estimator::SymbolLevel: return "symbol_level";
    }
    return "?";
}

Estimator parse_estimator(std::string_view name)
{
    if (name == "semi_analytic") return Estimator::SemiAnalytic;
    if (name == "conditional") return Estimator::Conditional;
    if (name == "symbol_level") return Estimator::SymbolLevel;
    throw ConfigError("unknown estimator '" + std::string(name) +
                      "' (expected semi_analytic, conditional or symbol_level)");
}

void SimulationConfig::validate() const
{
    aperture.validate();
    if (trials < 1)
        throw ConfigError("trials must be >= 1");
    if (snr_grid_db.empty())
        throw ConfigError("SNR grid is empty");
    for (std::size_t i = 0; i < snr_grid_db.size(); ++i) {
        if (!std::isfinite(snr_grid_db[i]))
            throw ConfigError("SNR grid contains a non-finite value");
        if (i > 0 && !(snr_grid_db[i] > snr_grid_db[i - 1]))
            throw ConfigError("SNR grid must be strictly increasing");
    }
    if (workers < 1)
        throw ConfigError("workers must be >= 1");
}

double gamma_averaged_q(double b, int dof)
{
    if (!(b >= 0.0))
        throw DomainError("gamma_averaged_q: b must be >= 0");
    if (dof < 1)
        throw DomainError("gamma_averaged_q: dof must be >= 1");
    const double mu = std::sqrt(b / (1.0 + b));
    // (1 - mu) / 2 without cancellation.
    const double low = 0.5 / ((1.0 + b) * (1.0 + mu));
    const double high = 0.5 * (1.0 + mu);
    double term = 1.0;
    double sum = 1.0;
    for (int l = 1; l < dof; ++l) {
        term *= double(dof - 1 + l) / double(l) * high;
        sum += term;
    }
    return std::exp(dof * std::log(low) + std::log(sum));
}

std::vector<SerEstimate> estimate_ser(const SimulationConfig& cfg)
{
    cfg.validate();
    const CorrelationModel model = build_jakes_model(cfg.aperture, cfg.rank_threshold);
    if (cfg.estimator == Estimator::Conditional) {
        const DirectionalSampler sampler(model, cfg.aperture);
        return estimate_ser(cfg, [&sampler](RandomStream& stream, ChannelDraw& draw) {
            sampler.sample(stream, draw);
        });
    }
    const ChannelSampler sampler(model, cfg.aperture);
    return estimate_ser(cfg, [&sampler](RandomStream& stream, ChannelDraw& draw) {
        sampler.sample(stream, draw);
    });
}

std::vector<SerEstimate> estimate_ser(const SimulationConfig& cfg, const ChannelSource& source)
{
    cfg.validate();
    const std::size_t points = cfg.snr_grid_db.size();
    std::vector<double> snr(points);
    std::transform(cfg.snr_grid_db.begin(), cfg.snr_grid_db.end(), snr.begin(), db_to_linear);

    const std::uint64_t chunks = chunk_count(cfg.trials);
    const ModulationSpec spec = cfg.spec;
    const Constellation constellation =
        cfg.estimator == Estimator::SymbolLevel ? build_constellation(spec) : Constellation{};

    // chunk-major: per_chunk[c * points + s]
    std::vector<Moments> per_chunk(chunks * points);
    std::vector<std::uint64_t> errors(cfg.estimator == Estimator::SymbolLevel ? chunks * points : 0);

    for_each_chunk(chunks, cfg.workers, [&](std::uint64_t chunk) {
        const std::uint64_t first = chunk * kChunkTrials;
        const std::uint64_t last = std::min(cfg.trials, first + kChunkTrials);
        Moments* moments = per_chunk.data() + chunk * points;
        ChannelDraw draw;
        for (std::uint64_t trial = first; trial < last; ++trial) {
            RandomStream stream = derive_stream(cfg.master_seed, trial);
            source(stream, draw);
            const double gain2 = draw.best_gain * draw.best_gain;
            switch (cfg.estimator) {
            case Estimator::SemiAnalytic:
                for (std::size_t s = 0; s < points; ++s)
                    moments[s].add(conditional_ser(gain2, snr[s], spec));
                break;
            case Estimator::Conditional: {
                if (!(draw.source_energy > 0.0))
                    throw ModelError("conditional estimator needs a channel draw with source energy > 0");
                const double direction_gain = gain2 / draw.source_energy;
                const int dof = draw.source_dof > 0 ? draw.source_dof : int(draw.coefficients.size());
                for (std::size_t s = 0; s < points; ++s)
                    moments[s].add(draw.weight * spec.p *
                                   gamma_averaged_q(0.5 * spec.k * direction_gain * snr[s], dof));
                break;
            }
            case Estimator::SymbolLevel: {
                const auto symbol = stream.uniform_index(constellation.size());
                const std::complex<double> noise = stream.complex_normal();
                std::uint64_t* count = errors.data() + chunk * points;
                for (std::size_t s = 0; s < points; ++s) {
                    const double amplitude = std::sqrt(snr[s]) * draw.best_gain;
                    const std::complex<double> received = amplitude * constellation.points[symbol] + noise;
                    if (detect(received, amplitude, constellation) != int(symbol))
                        ++count[s];
                }
                break;
            }
            }
        }
    });

    std::vector<SerEstimate> out(points);
    for (std::size_t s = 0; s < points; ++s) {
        SerEstimate& e = out[s];
        e.snr_db = cfg.snr_grid_db[s];
        e.trials = cfg.trials;
        const double n = double(cfg.trials);
        if (cfg.estimator == Estimator::SymbolLevel) {
            std::uint64_t total = 0;
            for (std::uint64_t c = 0; c < chunks; ++c)
                total += errors[c * points + s];
            e.ser_mean = double(total) / n;
            e.ser_stderr = std::sqrt(e.ser_mean * (1.0 - e.ser_mean) / n);
        } else {
            Moments sum;
            for (std::uint64_t c = 0; c < chunks; ++c)
                sum.merge(per_chunk[c * points + s]);
            e.ser_mean = sum.sum / n;
            const double variance = sum.count > 1 ? std::max(0.0, sum.m2 / double(sum.count - 1)) : 0.0;
            e.ser_stderr = std::sqrt(variance / n);
        }
    }
    return out;
}

std::vector<double> sample_selected_gains(const CorrelationModel& model, const ApertureConfig& cfg,
                                          std::uint64_t master_seed, std::uint64_t count,
                                          unsigned workers)
{
    const ChannelSampler sampler(model, cfg);
    std::vector<double> gains(count);
    for_each_chunk(chunk_count(count), workers, [&](std::uint64_t chunk) {
        const std::uint64_t first = chunk * kChunkTrials;
        const std::uint64_t last = std::min(count, first + kChunkTrials);
        ChannelDraw draw;
        for (std::uint64_t trial = first; trial < last; ++trial) {
            RandomStream stream = derive_stream(master_seed, trial);
            sampler.sample(stream, draw);
            gains[trial] = draw.best_gain * draw.best_gain;
        }
    });
    return gains;
}

unsigned default_workers() noexcept
{
    return std::max(1u, std::thread::hardware_concurrency());
}

} // namespace fas
