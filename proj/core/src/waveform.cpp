#include "oamem/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace oamem {

namespace {

double gaussian_amplitude(double t, double t_peak, double fwhm) {
    const double x = (t - t_peak) / fwhm;
    return std::exp(-2.0 * std::numbers::ln2 * x * x);
}

}  // namespace

double Waveform::end_time() const noexcept {
    return samples.empty() ? t0_ns : time(samples.size() - 1);
}

std::complex<double> Waveform::value_at(double t_ns) const {
    if (samples.empty()) return {};
    const double u = (t_ns - t0_ns) / dt_ns;
    if (u < 0.0 || u > static_cast<double>(samples.size() - 1)) return {};
    const auto i = static_cast<std::size_t>(u);
    if (i + 1 >= samples.size()) return samples.back();
    const double frac = u - static_cast<double>(i);
    return samples[i] + frac * (samples[i + 1] - samples[i]);
}

double Waveform::energy() const {
    if (samples.size() < 2) return 0.0;
    double sum = 0.5 * (std::norm(samples.front()) + std::norm(samples.back()));
    for (std::size_t i = 1; i + 1 < samples.size(); ++i) sum += std::norm(samples[i]);
    return sum * dt_ns;
}

double Waveform::peak_time() const {
    if (samples.empty()) throw std::invalid_argument("peak_time: empty waveform");
    std::size_t k = 0;
    for (std::size_t i = 1; i < samples.size(); ++i) {
        if (std::norm(samples[i]) > std::norm(samples[k])) k = i;
    }
    if (k == 0 || k + 1 == samples.size()) return time(k);
    const double ym = std::norm(samples[k - 1]);
    const double y0 = std::norm(samples[k]);
    const double yp = std::norm(samples[k + 1]);
    const double denom = ym - 2.0 * y0 + yp;
    const double shift = denom != 0.0 ? 0.5 * (ym - yp) / denom : 0.0;
    return time(k) + shift * dt_ns;
}

void Waveform::validate() const {
    if (!(dt_ns > 0.0) || !std::isfinite(dt_ns)) throw std::invalid_argument("waveform: dt must be > 0");
    if (!std::isfinite(t0_ns)) throw std::invalid_argument("waveform: t0 must be finite");
    for (const auto& s : samples) {
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) {
            throw std::invalid_argument("waveform: non-finite sample");
        }
    }
}

Waveform truncated_gaussian(double fwhm_ns, double truncation_fraction, double total_duration_ns,
                            double dt_ns) {
    if (!(fwhm_ns > 0.0)) throw std::invalid_argument("truncated_gaussian: fwhm must be > 0");
    if (!(truncation_fraction > 0.0) || truncation_fraction > 1.0) {
        throw std::invalid_argument("truncated_gaussian: truncation fraction must be in (0, 1]");
    }
    if (!(total_duration_ns > 0.0)) throw std::invalid_argument("truncated_gaussian: duration must be > 0");
    if (!(dt_ns > 0.0)) throw std::invalid_argument("truncated_gaussian: dt must be > 0");

    const double cut_after_peak =
        fwhm_ns * std::sqrt(std::log(1.0 / truncation_fraction) / (2.0 * std::numbers::ln2));
    const double t_peak = std::max(total_duration_ns - cut_after_peak, 0.5 * total_duration_ns);
    const double t_cut = t_peak + cut_after_peak;

    Waveform w;
    w.t0_ns = 0.0;
    w.dt_ns = dt_ns;
    const auto n = static_cast<std::size_t>(std::floor(total_duration_ns / dt_ns + 1e-9)) + 1;
    w.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = w.time(i);
        w.samples[i] = t <= t_cut + 1e-9 * dt_ns ? gaussian_amplitude(t, t_peak, fwhm_ns) : 0.0;
    }
    return w;
}

Waveform full_gaussian(double fwhm_ns, double dt_ns) {
    if (!(fwhm_ns > 0.0)) throw std::invalid_argument("full_gaussian: fwhm must be > 0");
    Waveform w;
    w.t0_ns = 0.0;
    w.dt_ns = dt_ns;
    const double span = 6.0 * fwhm_ns;
    const auto n = static_cast<std::size_t>(std::floor(span / dt_ns + 1e-9)) + 1;
    w.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) w.samples[i] = gaussian_amplitude(w.time(i), 0.5 * span, fwhm_ns);
    return w;
}

}  // namespace oamem
