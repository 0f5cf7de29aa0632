#include "fas/modulation.hpp"

#include <cmath>
#include <numbers>

#include "fas/errors.hpp"
#include "fas/special_functions.hpp"

namespace fas {

namespace {

bool is_power_of_two(int m) noexcept { return m > 0 && (m & (m - 1)) == 0; }

int exact_sqrt(int m) noexcept
{
    const int root = int(std::lround(std::sqrt(double(m))));
    return root * root == m ? root : -1;
}

} // namespace

std::string_view scheme_name(Scheme scheme) noexcept
{
    switch (scheme) {
    case Scheme::BPSK: return "bpsk";
    case Scheme::MPSK: return "psk";
    case Scheme::MPAM: return "pam";
    case Scheme::MQAM: return "qam";
    }
    return "?";
}

Scheme parse_scheme(std::string_view name)
{
    if (name == "bpsk") return Scheme::BPSK;
    if (name == "psk") return Scheme::MPSK;
    if (name == "pam") return Scheme::MPAM;
    if (name == "qam") return Scheme::MQAM;
    throw DomainError("unknown modulation scheme '" + std::string(name) +
                      "' (expected bpsk, psk, pam or qam)");
}

std::string ModulationSpec::label() const
{
    return std::to_string(order) + std::string(scheme_name(scheme));
}

ModulationSpec params_of(Scheme scheme, int order)
{
    ModulationSpec spec{scheme, order, 0.0, 0.0};
    const double m = order;
    switch (scheme) {
    case Scheme::BPSK:
        if (order != 2)
            throw DomainError("bpsk requires order 2");
        spec.p = 1.0;
        spec.k = 2.0;
        break;
    case Scheme::MPSK:
        if (order < 4 || !is_power_of_two(order))
            throw DomainError("psk requires a power-of-two order >= 4 (use bpsk for M = 2)");
        spec.p = 2.0;
        {
            const double s = std::sin(std::numbers::pi / m);
            spec.k = 2.0 * s * s;
        }
        break;
    case Scheme::MPAM:
        if (order < 2)
            throw DomainError("pam requires order >= 2");
        spec.p = 2.0 * (1.0 - 1.0 / m);
        spec.k = 6.0 / (m * m - 1.0);
        break;
    case Scheme::MQAM:
        if (order < 4 || !is_power_of_two(order) || exact_sqrt(order) < 0)
            throw DomainError("qam requires a square power-of-two order >= 4 (got " +
                              std::to_string(order) + ")");
        spec.p = 4.0 * (1.0 - 1.0 / std::sqrt(m));
        spec.k = 3.0 / (m - 1.0);
        break;
    }
    return spec;
}

double conditional_ser(double x, double mean_snr, const ModulationSpec& spec)
{
    if (!(x >= 0.0))
        throw DomainError("conditional_ser: x must be >= 0");
    if (!(mean_snr > 0.0))
        throw DomainError("conditional_ser: mean SNR must be > 0");
    return spec.p * gaussian_q(std::sqrt(spec.k * x * mean_snr));
}

Constellation build_constellation(const ModulationSpec& spec)
{
    Constellation c;
    const int m = spec.order;
    switch (spec.scheme) {
    case Scheme::BPSK:
        c.points = {{1.0, 0.0}, {-1.0, 0.0}};
        break;
    case Scheme::MPSK:
        for (int i = 0; i < m; ++i)
            c.points.push_back(std::polar(1.0, 2.0 * std::numbers::pi * i / m));
        break;
    case Scheme::MPAM: {
        // Odd-integer grid, mean energy (M^2 - 1) / 3.
        const double scale = 1.0 / std::sqrt((double(m) * m - 1.0) / 3.0);
        for (int i = 0; i < m; ++i)
            c.points.push_back({(2.0 * i - (m - 1)) * scale, 0.0});
        break;
    }
    case Scheme::MQAM: {
        const int side = exact_sqrt(m);
        // Square grid, mean energy 2 (M - 1) / 3.
        const double scale = 1.0 / std::sqrt(2.0 * (m - 1.0) / 3.0);
        for (int re = 0; re < side; ++re)
            for (int im = 0; im < side; ++im)
                c.points.push_back({(2.0 * re - (side - 1)) * scale, (2.0 * im - (side - 1)) * scale});
        break;
    }
    }
    c.labels.resize(c.points.size());
    for (std::size_t i = 0; i < c.labels.size(); ++i)
        c.labels[i] = int(i);
    return c;
}

int detect(std::complex<double> received, double effective_gain, const Constellation& constellation)
{
    int best = 0;
    double best_distance = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < constellation.points.size(); ++i) {
        const double distance = std::norm(received - effective_gain * constellation.points[i]);
        if (distance < best_distance) {
            best_distance = distance;
            best = int(i);
        }
    }
    return best;
}

} // namespace fas
