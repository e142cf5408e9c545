#include "oamem/photon_stats.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "oamem/errors.hpp"
#include "oamem/format.hpp"
#include "oamem/rng.hpp"

namespace oamem {

namespace {

constexpr double kSeriesTail = 1e-12;
// Largest mean we hand to the Poisson sampler; leaves ~20 sigma of headroom below INT64_MAX.
constexpr double kMaxPoissonMean = 4.0e18;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

void CoherentSource::validate() const {
    if (!(nbar > 0.0) || !std::isfinite(nbar)) throw std::invalid_argument("source: nbar must be > 0");
    if (!(rep_rate > 0.0) || !std::isfinite(rep_rate)) throw std::invalid_argument("source: rep_rate must be > 0");
}

void DetectorModel::validate() const {
    if (!(efficiency > 0.0) || efficiency > 1.0) throw std::invalid_argument("detector: efficiency must be in (0, 1]");
    if (!(background_rate >= 0.0) || !std::isfinite(background_rate)) {
        throw std::invalid_argument("detector: background_rate must be >= 0");
    }
    if (!(gate_width_ns > 0.0)) throw std::invalid_argument("detector: gate_width must be > 0");
}

void CountRecord::validate() const {
    if (counts < 0) throw std::invalid_argument("count record: counts must be >= 0");
    if (!(collection_time_s > 0.0)) throw std::invalid_argument("count record: collection time must be > 0");
}

double poisson_pmf(double nbar, int n) {
    if (!(nbar > 0.0)) throw std::invalid_argument("poisson_pmf: nbar must be > 0");
    if (n < 0) return 0.0;
    return std::exp(n * std::log(nbar) - nbar - std::lgamma(n + 1.0));
}

double coherent_fidelity_threshold(double nbar) {
    if (!(nbar > 0.0) || !std::isfinite(nbar)) {
        throw std::invalid_argument("coherent_fidelity_threshold: nbar must be > 0");
    }
    // p(N)/(1 - p(0)) = nbar^N / (N! (e^nbar - 1)); expm1 keeps small nbar accurate.
    const double log_norm = -std::log(std::expm1(nbar));
    double sum = 0.0;
    double mass = 0.0;  // normalized probability of N >= 1 accounted for so far
    for (int n = 1;; ++n) {
        const double w = std::exp(n * std::log(nbar) - std::lgamma(n + 1.0) + log_norm);
        sum += (n + 1.0) / (n + 2.0) * w;
        mass += w;
        if (n > nbar && 1.0 - mass < kSeriesTail) break;
        if (n > 10000) throw numeric_error("coherent_fidelity_threshold: series did not converge");
    }
    return sum;
}

double expected_counts(double prob, const CoherentSource& source, const DetectorModel& det, double time_s) {
    if (!(prob >= 0.0) || prob > 1.0 + 1e-12) throw std::invalid_argument("counts: probability must be in [0, 1]");
    source.validate();
    det.validate();
    if (!(time_s > 0.0)) throw std::invalid_argument("counts: collection time must be > 0");
    return time_s * (source.rep_rate * source.nbar * det.efficiency * prob + det.background_rate);
}

std::int64_t poisson_draw(double mean, std::uint64_t seed) {
    if (!(mean >= 0.0)) throw std::invalid_argument("poisson_draw: mean must be >= 0");
    if (!std::isfinite(mean) || mean > kMaxPoissonMean) {
        std::ostringstream msg;
        msg << "expected count " << mean << " exceeds the representable range";
        throw numeric_error(msg.str());
    }
    if (mean == 0.0) return 0;
    Engine eng = make_engine(seed);
    std::poisson_distribution<std::int64_t> dist(mean);
    return dist(eng);
}

std::int64_t simulate_counts(double prob, const CoherentSource& source, const DetectorModel& det,
                             double time_s, std::uint64_t seed) {
    return poisson_draw(expected_counts(prob, source, det, time_s), seed);
}

EfficiencyEstimate estimate_se(std::int64_t n_in, std::int64_t n_out) {
    if (n_in <= 0) throw std::invalid_argument("estimate_se: n_in must be > 0");
    if (n_out < 0) throw std::invalid_argument("estimate_se: n_out must be >= 0");
    const double eta = static_cast<double>(n_out) / static_cast<double>(n_in);
    return {eta, std::sqrt(eta * (1.0 + eta) / static_cast<double>(n_in))};
}

void write_counts_csv(std::ostream& os, const std::vector<CountRecord>& records) {
    os << "basis,counts,collection_time_s\n";
    for (const auto& r : records) {
        os << basis_label(r.basis) << ',' << r.counts << ',' << format_double(r.collection_time_s) << '\n';
    }
}

std::vector<CountRecord> read_counts_csv(std::istream& is) {
    std::vector<CountRecord> out;
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    while (std::getline(is, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            if (line == "basis,counts,collection_time_s") continue;
            throw io_error("counts CSV line " + std::to_string(line_no) +
                           ": expected header 'basis,counts,collection_time_s'");
        }
        std::stringstream ss(line);
        std::string basis, counts, time;
        if (!std::getline(ss, basis, ',') || !std::getline(ss, counts, ',') || !std::getline(ss, time)) {
            throw io_error("counts CSV line " + std::to_string(line_no) + ": expected 3 columns");
        }
        CountRecord rec;
        try {
            rec.basis = parse_basis(trim(basis));
            std::size_t used = 0;
            rec.counts = std::stoll(trim(counts), &used);
            if (used != trim(counts).size()) throw std::invalid_argument("counts is not an integer");
            rec.collection_time_s = parse_double(trim(time));
            rec.validate();
        } catch (const std::exception& e) {
            throw io_error("counts CSV line " + std::to_string(line_no) + ": " + e.what());
        }
        out.push_back(rec);
    }
    if (!header_seen) {
        throw io_error("counts CSV line " + std::to_string(line_no + 1) +
                       ": missing header 'basis,counts,collection_time_s'");
    }
    return out;
}

}  // namespace oamem
