#include "fas/asymptotics.hpp"

#include <cmath>
#include <numbers>

#include "fas/errors.hpp"
#include "fas/special_functions.hpp"

namespace fas {

namespace {

double log_power_product(std::span<const double> mean_powers, int num_ports)
{
    if (mean_powers.empty())
        return 0.0;
    if (int(mean_powers.size()) != num_ports)
        throw DomainError("mean_powers size does not match the port count");
    double sum = 0.0;
    for (double power : mean_powers) {
        if (!(power > 0.0))
            throw DomainError("mean powers must be > 0");
        sum += std::log(power);
    }
    return sum;
}

bool all_unit(std::span<const double> mean_powers)
{
    for (double power : mean_powers)
        if (power != 1.0)
            return false;
    return true;
}

} // namespace

double asymptotic_pdf(double x, int num_ports, double pseudo_log_det, std::span<const double> mean_powers)
{
    if (!(x >= 0.0))
        throw DomainError("asymptotic_pdf: x must be >= 0");
    if (num_ports < 1)
        throw DomainError("asymptotic_pdf: N must be >= 1");
    const double log_norm = pseudo_log_det + log_power_product(mean_powers, num_ports);
    if (num_ports == 1)
        return std::exp(-log_norm);
    if (x == 0.0)
        return 0.0;
    return std::exp(std::log(double(num_ports)) + (num_ports - 1) * std::log(x) - log_norm);
}

double asymptotic_cdf(double x, int num_ports, double pseudo_log_det, std::span<const double> mean_powers)
{
    if (!(x >= 0.0))
        throw DomainError("asymptotic_cdf: x must be >= 0");
    if (num_ports < 1)
        throw DomainError("asymptotic_cdf: N must be >= 1");
    if (x == 0.0)
        return 0.0;
    return std::exp(num_ports * std::log(x) - pseudo_log_det -
                    log_power_product(mean_powers, num_ports));
}

double asymptotic_log_coefficient(const ModulationSpec& spec, const CorrelationModel& model,
                                  std::span<const double> mean_powers)
{
    const int rank = model.effective_rank;
    double log_powers = 0.0;
    if (!mean_powers.empty() && !all_unit(mean_powers)) {
        if (rank != model.size())
            throw DomainError("asymptotic prediction with non-unit port powers is only defined "
                              "for a full-rank correlation matrix");
        log_powers = log_power_product(mean_powers, model.size());
    }
    return std::log(spec.p) + log_double_factorial_odd(rank) - std::numbers::ln2 -
           rank * std::log(spec.k) - model.pseudo_log_det - log_powers;
}

double asymptotic_ser(double mean_snr, const ModulationSpec& spec, const CorrelationModel& model,
                      std::span<const double> mean_powers)
{
    if (!(mean_snr > 0.0) || !std::isfinite(mean_snr))
        throw DomainError("asymptotic_ser: mean SNR must be finite and > 0");
    return std::exp(asymptotic_log_coefficient(spec, model, mean_powers) -
                    model.effective_rank * std::log(mean_snr));
}

double coding_gain(const CorrelationModel& model, const ModulationSpec& spec)
{
    const int rank = model.effective_rank;
    const double log_gc = (std::numbers::ln2 + rank * std::log(spec.k) - std::log(spec.p) -
                           log_double_factorial_odd(rank) + model.pseudo_log_det) /
                          rank;
    return std::exp(log_gc);
}

AsymptoticPrediction predict(const CorrelationModel& model, const ModulationSpec& spec,
                             std::span<const double> snr_db)
{
    AsymptoticPrediction out;
    out.n_eff = model.effective_rank;
    out.diversity_gain = diversity_gain(model);
    out.coding_gain = coding_gain(model, spec);
    out.coefficient_log = asymptotic_log_coefficient(spec, model);
    out.snr_db.assign(snr_db.begin(), snr_db.end());
    for (double db : snr_db)
        out.ser_log10.push_back((out.coefficient_log - out.n_eff * std::log(db_to_linear(db))) /
                                std::numbers::ln10);
    return out;
}

double fit_slope(std::span<const std::pair<double, double>> points)
{
    if (points.size() < 2)
        throw DomainError("fit_slope: need at least two points");
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (const auto& [db, ser] : points) {
        if (!(ser > 0.0) || !std::isfinite(ser))
            throw DomainError("fit_slope: SER values must be finite and > 0");
        mean_x += db / 10.0;
        mean_y += std::log10(ser);
    }
    mean_x /= double(points.size());
    mean_y /= double(points.size());
    double sxx = 0.0;
    double sxy = 0.0;
    for (const auto& [db, ser] : points) {
        const double dx = db / 10.0 - mean_x;
        sxx += dx * dx;
        sxy += dx * (std::log10(ser) - mean_y);
    }
    if (!(sxx > 0.0))
        throw DomainError("fit_slope: SNR values must be distinct");
    return -sxy / sxx;
}

} // namespace fas
