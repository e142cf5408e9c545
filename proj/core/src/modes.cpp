#include "oamem/modes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "oamem/errors.hpp"

namespace oamem {

namespace {

constexpr double kQuadratureTol = 1e-8;
constexpr double kTruncationWaists = 8.0;

void check_mode(const LGMode& mode) {
    if (mode.l < 0) throw std::invalid_argument("LG mode: l must be >= 0");
    if (!(mode.w0_um > 0.0) || !std::isfinite(mode.w0_um)) {
        throw std::invalid_argument("LG mode: w0 must be > 0");
    }
}

}  // namespace

EnsembleConfig EnsembleConfig::rb87_d1() {
    EnsembleConfig e;
    e.gamma_e = 2.0 * std::numbers::pi * 5.75e6;
    e.gamma_12 = 1e-3 * e.gamma_e;
    return e;
}

void EnsembleConfig::validate() const {
    if (!(peak_od >= 0.0) || !std::isfinite(peak_od)) throw std::invalid_argument("ensemble: peak_od must be >= 0");
    if (!(sigma_t_um > 0.0)) throw std::invalid_argument("ensemble: sigma_t must be > 0");
    if (!(length_mm > 0.0)) throw std::invalid_argument("ensemble: length must be > 0");
    if (!(gamma_e > 0.0) || !std::isfinite(gamma_e)) throw std::invalid_argument("ensemble: gamma_e must be > 0");
    if (!(gamma_12 >= 0.0) || !(gamma_12 < gamma_e)) {
        throw std::invalid_argument("ensemble: gamma_12 must satisfy 0 <= gamma_12 < gamma_e");
    }
}

double mode_waist(int l, double w0_um) {
    check_mode({l, w0_um});
    return std::sqrt(static_cast<double>(l) + 1.0) * w0_um;
}

double lg_intensity(const LGMode& mode, double r_um) {
    check_mode(mode);
    if (r_um < 0.0) throw std::invalid_argument("lg_intensity: r must be >= 0");
    const double l = mode.l;
    const double w2 = mode.w0_um * mode.w0_um;
    const double gauss = -2.0 * r_um * r_um / w2;
    if (mode.l == 0) return 2.0 / (std::numbers::pi * w2) * std::exp(gauss);
    if (r_um == 0.0) return 0.0;
    // Log space keeps r^{2l} / l! finite for large l.
    const double log_norm = (l + 1.0) * std::log(2.0) - std::log(std::numbers::pi) -
                            std::lgamma(l + 1.0) - (l + 1.0) * std::log(w2);
    return std::exp(log_norm + 2.0 * l * std::log(r_um) + gauss);
}

double column_profile(const EnsembleConfig& ens, double r_um) {
    return std::exp(-r_um * r_um / (2.0 * ens.sigma_t_um * ens.sigma_t_um));
}

double effective_od(const LGMode& mode, const EnsembleConfig& ens) {
    check_mode(mode);
    ens.validate();
    if (ens.peak_od == 0.0) return 0.0;

    const double r_max = kTruncationWaists * std::max(mode_waist(mode.l, mode.w0_um), ens.sigma_t_um);
    auto integrand = [&](double r) {
        return lg_intensity(mode, r) * column_profile(ens, r) * 2.0 * std::numbers::pi * r;
    };
    // Split at the two length scales so a narrow mode inside a wide cloud
    // (or the reverse) is not skipped by the first Kronrod pass.
    const double waist = mode_waist(mode.l, mode.w0_um);
    std::vector<double> cuts{0.0, r_max};
    for (double c : {waist, 3.0 * waist, ens.sigma_t_um, 3.0 * ens.sigma_t_um}) {
        if (c < r_max) cuts.push_back(c);
    }
    std::sort(cuts.begin(), cuts.end());
    double overlap = 0.0;
    double err = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i + 1] <= cuts[i]) continue;
        double seg_err = 0.0;
        overlap += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
            integrand, cuts[i], cuts[i + 1], 20, kQuadratureTol, &seg_err);
        err += seg_err;
    }
    if (!std::isfinite(overlap) || err > kQuadratureTol * std::max(std::abs(overlap), 1e-300) * 10.0) {
        std::ostringstream msg;
        msg << "effective_od: quadrature did not converge (l=" << mode.l << ", w0=" << mode.w0_um
            << " um, sigma_t=" << ens.sigma_t_um << " um, estimate=" << overlap
            << ", error=" << err << ")";
        throw numeric_error(msg.str());
    }
    return ens.peak_od * overlap;
}

}  // namespace oamem
