#include "oamem/eit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

#include "oamem/errors.hpp"

namespace oamem {

namespace {

using cvec = std::vector<cplx>;

constexpr double kSpeedOfLightMmPerNs = 299.792458;
// RK4 stays stable for h * |lambda| up to ~2.8 on the negative real axis.
constexpr double kRk4StabilityLimit = 2.5;

double raised_cosine_down(double x) { return 0.5 * (1.0 + std::cos(std::numbers::pi * x)); }

// Weak-probe Maxwell-Bloch right-hand side on a fixed z grid, in units where
// time is scaled by Gamma, z by L and the coherences are multiplied by Gamma
// so that the probe keeps its input units.
class MaxwellBloch {
public:
    MaxwellBloch(int nz, double od, double g12)
        : nz_(nz), dz_(1.0 / nz), half_od_(0.5 * od), g12_(g12), field_(nz + 1) {}

    const cvec& field() const { return field_; }

    void rebuild_field(cplx input, const cvec& s13) {
        const cplx step = cplx(0.0, half_od_ * 0.5 * dz_);
        field_[0] = input;
        for (int j = 1; j <= nz_; ++j) field_[j] = field_[j - 1] + step * (s13[j - 1] + s13[j]);
    }

    void derivatives(cplx input, double wc, const cvec& s12, const cvec& s13, cvec& d12, cvec& d13) {
        rebuild_field(input, s13);
        const cplx half_i(0.0, 0.5);
        for (int j = 0; j <= nz_; ++j) {
            d12[j] = -g12_ * s12[j] + half_i * wc * s13[j];
            d13[j] = -0.5 * s13[j] + half_i * (field_[j] + wc * s12[j]);
        }
    }

    // Trapezoid over z of the local loss density |s13|^2 + 2 g12 |s12|^2.
    double loss_density(const cvec& s12, const cvec& s13) const {
        auto at = [&](int j) { return std::norm(s13[j]) + 2.0 * g12_ * std::norm(s12[j]); };
        double sum = 0.5 * (at(0) + at(nz_));
        for (int j = 1; j < nz_; ++j) sum += at(j);
        return sum * dz_;
    }

    double excitation(const cvec& s12, const cvec& s13) const {
        auto at = [&](int j) { return std::norm(s13[j]) + std::norm(s12[j]); };
        double sum = 0.5 * (at(0) + at(nz_));
        for (int j = 1; j < nz_; ++j) sum += at(j);
        return sum * dz_;
    }

private:
    int nz_;
    double dz_;
    double half_od_;
    double g12_;
    cvec field_;
};

cplx transfer_exponent(double delta_over_gamma, double od, double g12_over_gamma, double wc) {
    const cplx i(0.0, 1.0);
    const cplx spin = g12_over_gamma - i * delta_over_gamma;
    const cplx optical = 0.5 - i * delta_over_gamma;
    // spin / (optical spin + wc^2/4), written so that spin -> 0 has a finite limit.
    if (spin == 0.0) return wc == 0.0 ? -(od / 4.0) / optical : cplx(0.0);
    return -(od / 4.0) / (optical + 0.25 * wc * wc / spin);
}

}  // namespace

StorageProtocol StorageProtocol::constant(double rabi, double window_ns) {
    StorageProtocol p;
    p.control_rabi = rabi;
    p.retrieval_window_ns = window_ns;
    return p;
}

StorageProtocol StorageProtocol::store(double rabi, double switch_off_ns, double storage_ns,
                                       double ramp_ns, double window_ns) {
    StorageProtocol p;
    p.control_rabi = rabi;
    p.switch_off_ns = switch_off_ns;
    p.switch_on_ns = switch_off_ns + storage_ns;
    p.ramp_ns = ramp_ns;
    p.retrieval_window_ns = window_ns;
    return p;
}

bool StorageProtocol::switches() const noexcept { return std::isfinite(switch_off_ns); }

void StorageProtocol::validate() const {
    if (!(control_rabi >= 0.0) || !std::isfinite(control_rabi)) {
        throw std::invalid_argument("protocol: control Rabi frequency must be finite and >= 0");
    }
    if (!(ramp_ns >= 0.0)) throw std::invalid_argument("protocol: ramp duration must be >= 0");
    if (!(retrieval_window_ns > 0.0)) throw std::invalid_argument("protocol: retrieval window must be > 0");
    if (switches()) {
        if (!std::isfinite(switch_on_ns)) throw std::invalid_argument("protocol: switch-on time must be finite");
        if (switch_on_ns < switch_off_ns + ramp_ns) {
            throw std::invalid_argument("protocol: storage time shorter than the ramp duration");
        }
    }
}

double control_envelope(const StorageProtocol& proto, double t_ns) {
    const double peak = proto.control_rabi;
    if (!proto.switches() || t_ns < proto.switch_off_ns) return peak;
    const double ramp = proto.ramp_ns;
    if (t_ns < proto.switch_off_ns + ramp) return peak * raised_cosine_down((t_ns - proto.switch_off_ns) / ramp);
    if (t_ns < proto.switch_on_ns) return 0.0;
    if (t_ns < proto.switch_on_ns + ramp) {
        return peak * (1.0 - raised_cosine_down((t_ns - proto.switch_on_ns) / ramp));
    }
    return peak;
}

double MemoryResult::balance_error() const noexcept {
    if (input_energy <= 0.0) return 0.0;
    return (input_energy - transmitted_energy - retrieved_energy - dissipated_energy()) / input_energy;
}

MemoryResult simulate_storage(const Waveform& probe, const StorageProtocol& proto, double od,
                              const EnsembleConfig& ens, const SolverGrid& grid) {
    probe.validate();
    proto.validate();
    ens.validate();
    if (!(od >= 0.0) || !std::isfinite(od)) throw std::invalid_argument("simulate_storage: od must be >= 0");
    if (grid.nz < 2) throw std::invalid_argument("simulate_storage: nz must be >= 2");
    if (!(grid.dt_ns > 0.0)) throw std::invalid_argument("simulate_storage: dt must be > 0");
    if (!(probe.energy() > 0.0)) throw std::invalid_argument("simulate_storage: probe carries no energy");

    const double gamma_ns = ens.gamma_e * 1e-9;  // rad/ns
    const double h = grid.dt_ns * gamma_ns;
    const double wc_peak = proto.control_rabi / ens.gamma_e;
    const double g12 = ens.gamma_12 / ens.gamma_e;

    const double stiffness = 0.5 + 0.5 * wc_peak + 0.25 * od;
    if (h * stiffness > kRk4StabilityLimit) {
        std::ostringstream msg;
        msg << "simulate_storage: time step dt=" << grid.dt_ns << " ns exceeds the RK4 stability limit "
            << kRk4StabilityLimit / (stiffness * gamma_ns) << " ns (od=" << od
            << ", control=" << wc_peak << " Gamma)";
        throw numeric_error(msg.str());
    }

    const double t_start = probe.t0_ns;
    const double t_end = proto.switches() ? proto.switch_on_ns + proto.retrieval_window_ns
                                          : probe.end_time() + proto.retrieval_window_ns;
    if (!(t_end > t_start)) throw std::invalid_argument("simulate_storage: protocol ends before the probe starts");
    const auto steps = static_cast<std::size_t>(std::ceil((t_end - t_start) / grid.dt_ns - 1e-9));

    const int nz = grid.nz;
    MaxwellBloch model(nz, od, g12);
    cvec s12(nz + 1), s13(nz + 1);
    cvec k12[4], k13[4];
    for (int s = 0; s < 4; ++s) {
        k12[s].resize(nz + 1);
        k13[s].resize(nz + 1);
    }
    cvec t12(nz + 1), t13(nz + 1);

    MemoryResult res;
    res.input_waveform.t0_ns = t_start;
    res.input_waveform.dt_ns = grid.dt_ns;
    res.input_waveform.samples.resize(steps + 1);
    res.output_waveform.t0_ns = t_start + ens.length_mm / kSpeedOfLightMmPerNs;
    res.output_waveform.dt_ns = grid.dt_ns;
    res.output_waveform.samples.resize(steps + 1);

    std::vector<double> loss(steps + 1);
    auto time_at = [&](std::size_t n) { return t_start + grid.dt_ns * static_cast<double>(n); };
    auto control_at = [&](double t) { return control_envelope(proto, t) / ens.gamma_e; };

    auto record = [&](std::size_t n, cplx input) {
        model.rebuild_field(input, s13);
        const cplx exit = model.field()[nz];
        if (!std::isfinite(exit.real()) || !std::isfinite(exit.imag())) {
            std::ostringstream msg;
            msg << "simulate_storage: field became non-finite at t=" << time_at(n) << " ns (step " << n << ")";
            throw numeric_error(msg.str());
        }
        res.input_waveform.samples[n] = input;
        res.output_waveform.samples[n] = exit;
        loss[n] = model.loss_density(s12, s13);
        if (grid.snapshot_stride > 0 && n % static_cast<std::size_t>(grid.snapshot_stride) == 0) {
            for (int j = 0; j <= nz; ++j) res.snapshot.push_back({time_at(n), j, model.field()[j]});
        }
    };

    for (std::size_t n = 0; n < steps; ++n) {
        const double t = time_at(n);
        // Drive with the linear interpolant of the probe sampled on the solver grid.
        const cplx in0 = probe.value_at(t);
        const cplx in1 = probe.value_at(t + grid.dt_ns);
        const cplx in_mid = 0.5 * (in0 + in1);
        const double c0 = control_at(t);
        const double c_mid = control_at(t + 0.5 * grid.dt_ns);
        const double c1 = control_at(t + grid.dt_ns);

        record(n, in0);

        model.derivatives(in0, c0, s12, s13, k12[0], k13[0]);
        for (int j = 0; j <= nz; ++j) {
            t12[j] = s12[j] + 0.5 * h * k12[0][j];
            t13[j] = s13[j] + 0.5 * h * k13[0][j];
        }
        model.derivatives(in_mid, c_mid, t12, t13, k12[1], k13[1]);
        for (int j = 0; j <= nz; ++j) {
            t12[j] = s12[j] + 0.5 * h * k12[1][j];
            t13[j] = s13[j] + 0.5 * h * k13[1][j];
        }
        model.derivatives(in_mid, c_mid, t12, t13, k12[2], k13[2]);
        for (int j = 0; j <= nz; ++j) {
            t12[j] = s12[j] + h * k12[2][j];
            t13[j] = s13[j] + h * k13[2][j];
        }
        model.derivatives(in1, c1, t12, t13, k12[3], k13[3]);
        for (int j = 0; j <= nz; ++j) {
            s12[j] += h / 6.0 * (k12[0][j] + 2.0 * k12[1][j] + 2.0 * k12[2][j] + k12[3][j]);
            s13[j] += h / 6.0 * (k13[0][j] + 2.0 * k13[1][j] + 2.0 * k13[2][j] + k13[3][j]);
        }
    }
    record(steps, probe.value_at(time_at(steps)));

    // The probe enters as its linear interpolant, so input and exit energies
    // are integrated exactly for that interpolant; losses use trapezoid weights.
    auto segment = [&](const std::vector<cplx>& x, std::size_t n) {
        const cplx a = x[n];
        const cplx b = x[n + 1];
        return grid.dt_ns / 3.0 * (std::norm(a) + std::norm(b) + (a * std::conj(b)).real());
    };
    auto weight = [&](std::size_t n) { return (n == 0 || n == steps) ? 0.5 * grid.dt_ns : grid.dt_ns; };
    const double t_on = proto.switches() ? proto.switch_on_ns : std::numeric_limits<double>::infinity();
    std::size_t first_retrieved = steps + 1;
    double decay = 0.0;
    for (std::size_t n = 0; n <= steps; ++n) {
        if (time_at(n) >= t_on) first_retrieved = std::min(first_retrieved, n);
        decay += weight(n) * loss[n];
        if (n == steps) break;
        res.input_energy += segment(res.input_waveform.samples, n);
        const double out = segment(res.output_waveform.samples, n);
        if (time_at(n) < t_on) {
            res.transmitted_energy += out;
        } else {
            res.retrieved_energy += out;
        }
    }
    res.decay_loss = od * decay;
    res.residual_excitation = od / gamma_ns * model.excitation(s12, s13);
    res.se = res.input_energy > 0.0 ? res.retrieved_energy / res.input_energy : 0.0;

    res.retrieved_waveform.dt_ns = grid.dt_ns;
    if (first_retrieved <= steps) {
        res.retrieved_waveform.t0_ns = res.output_waveform.time(first_retrieved);
        res.retrieved_waveform.samples.assign(res.output_waveform.samples.begin() + static_cast<std::ptrdiff_t>(first_retrieved),
                                              res.output_waveform.samples.end());
    } else {
        res.retrieved_waveform.t0_ns = res.output_waveform.end_time();
    }
    return res;
}

cplx transmission_transfer(double delta, double od, const EnsembleConfig& ens, double omega_c) {
    ens.validate();
    return std::exp(transfer_exponent(delta / ens.gamma_e, od, ens.gamma_12 / ens.gamma_e,
                                      omega_c / ens.gamma_e));
}

double transfer_group_delay_ns(double od, const EnsembleConfig& ens, double omega_c) {
    ens.validate();
    // arg T is the imaginary part of the exponent, so no phase unwrapping is needed.
    const double step = 1e-5;  // in units of Gamma
    const double g12 = ens.gamma_12 / ens.gamma_e;
    const double wc = omega_c / ens.gamma_e;
    const double slope = (transfer_exponent(step, od, g12, wc).imag() -
                          transfer_exponent(-step, od, g12, wc).imag()) / (2.0 * step);
    return slope / ens.gamma_e * 1e9;
}

Waveform apply_transfer(const Waveform& probe, double od, const EnsembleConfig& ens, double omega_c,
                        double span_ns) {
    probe.validate();
    ens.validate();
    const auto needed = std::max<std::size_t>(
        probe.size(), static_cast<std::size_t>(std::ceil(span_ns / probe.dt_ns)) + 1);
    std::size_t n = 1;
    while (n < needed) n <<= 1;

    std::vector<cplx> time(n, cplx{}), freq;
    std::copy(probe.samples.begin(), probe.samples.end(), time.begin());
    Eigen::FFT<double> fft;
    fft.fwd(freq, time);

    const double g12 = ens.gamma_12 / ens.gamma_e;
    const double wc = omega_c / ens.gamma_e;
    const double dw = 2.0 * std::numbers::pi / (static_cast<double>(n) * probe.dt_ns);  // rad/ns
    for (std::size_t k = 0; k < n; ++k) {
        const double omega = dw * (k < n / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(n));
        // Eigen's inverse transform synthesizes exp(+i omega t), i.e. delta = -omega.
        const double delta_over_gamma = -omega * 1e9 / ens.gamma_e;
        freq[k] *= std::exp(transfer_exponent(delta_over_gamma, od, g12, wc));
    }
    fft.inv(time, freq);

    Waveform out;
    out.t0_ns = probe.t0_ns;
    out.dt_ns = probe.dt_ns;
    out.samples = std::move(time);
    return out;
}

QubitStorage store_qubit(const QubitKet& input, const ModeEfficiencies& modes) {
    auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
    if (!in_unit(modes.eta_g) || !in_unit(modes.eta_r)) {
        throw std::invalid_argument("store_qubit: efficiencies must lie in [0, 1]");
    }
    if (modes.eta_g == 0.0 && modes.eta_r == 0.0) {
        throw std::invalid_argument("store_qubit: both mode efficiencies are zero, nothing is retrieved");
    }
    const cplx g = input.amp_g() * std::sqrt(modes.eta_g);
    const cplx r = input.amp_r() * std::sqrt(modes.eta_r) * std::polar(1.0, modes.dphi);
    const double overall = std::norm(input.amp_g()) * modes.eta_g + std::norm(input.amp_r()) * modes.eta_r;
    if (!(overall > 0.0)) {
        throw std::invalid_argument("store_qubit: the populated mode has zero efficiency, nothing is retrieved");
    }
    return {QubitKet::from_amplitudes(g, r), overall};
}

}  // namespace oamem
