#pragma once

#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "fas/modulation.hpp"
#include "fas/spatial_channel.hpp"

namespace fas {

/// Small-x density of x = |g_FAS|^2:
///   f(x) ~ N x^{N-1} / (det(J) prod gamma_n).
/// `mean_powers` empty means unit powers.
double asymptotic_pdf(double x, int num_ports, double pseudo_log_det,
                      std::span<const double> mean_powers = {});

/// Matching small-x CDF x^N / (det(J) prod gamma_n).
double asymptotic_cdf(double x, int num_ports, double pseudo_log_det,
                      std::span<const double> mean_powers = {});

/// ln C in P_E ~ C * snr^{-r}, r = effective rank:
///   C = p (2r-1)!! / (2 k^r prod_{retained} lambda_n prod gamma_n).
/// At full rank prod lambda_n = det(J). Per-port powers other than one are
/// only accepted at full rank, where the product runs over every port.
double asymptotic_log_coefficient(const ModulationSpec& spec, const CorrelationModel& model,
                                  std::span<const double> mean_powers = {});

/// High-SNR SER C * snr^{-r}; throws DomainError for snr <= 0.
double asymptotic_ser(double mean_snr, const ModulationSpec& spec, const CorrelationModel& model,
                      std::span<const double> mean_powers = {});

inline int diversity_gain(const CorrelationModel& model) noexcept { return effective_rank(model); }

/// G_c with P_E ~ (G_c snr)^{-G_d}, unit per-port powers.
double coding_gain(const CorrelationModel& model, const ModulationSpec& spec);

struct AsymptoticPrediction {
    std::vector<double> snr_db;
    std::vector<double> ser_log10;
    int diversity_gain = 0;
    double coding_gain = 0.0;
    int n_eff = 0;
    double coefficient_log = 0.0;
};

AsymptoticPrediction predict(const CorrelationModel& model, const ModulationSpec& spec,
                             std::span<const double> snr_db);

/// Negated least-squares slope of log10(ser) against log10(snr).
/// Points are (snr_db, ser).
double fit_slope(std::span<const std::pair<double, double>> points);

inline double db_to_linear(double db) noexcept { return std::pow(10.0, db / 10.0); }

} // namespace fas
