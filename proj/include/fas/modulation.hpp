#pragma once

#include <complex>
#include <string>
#include <string_view>
#include <vector>

namespace fas {

enum class Scheme { BPSK, MPSK, MPAM, MQAM };

/// Config spelling: "bpsk", "psk", "pam", "qam".
std::string_view scheme_name(Scheme scheme) noexcept;
Scheme parse_scheme(std::string_view name);

/// Coherent modulation with conditional SER p * Q(sqrt(k * x * snr)).
struct ModulationSpec {
    Scheme scheme = Scheme::BPSK;
    int order = 2;
    double p = 1.0;
    double k = 2.0;

    std::string label() const;  // e.g. "16qam"
};

/// Throws DomainError for an order the scheme does not admit (e.g. 8-QAM).
ModulationSpec params_of(Scheme scheme, int order);

/// p * Q(sqrt(k * x * mean_snr)).
double conditional_ser(double x, double mean_snr, const ModulationSpec& spec);

struct Constellation {
    std::vector<std::complex<double>> points;
    std::vector<int> labels;

    std::size_t size() const noexcept { return points.size(); }
};

/// Unit average energy constellation for the spec.
Constellation build_constellation(const ModulationSpec& spec);

/// Index of the point minimizing |received - gain * point|; lowest index on ties.
int detect(std::complex<double> received, double effective_gain, const Constellation& constellation);

} // namespace fas
