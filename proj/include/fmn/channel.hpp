#pragma once

#include <cmath>
#include <vector>

#include "errors.hpp"

namespace fmn {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kPi = 3.141592653589793238462643383279502884;

// How carrier-sense adjacency is decided: by received power against
// cs_threshold_dbm (default), or by reusing the usable-link predicate.
enum class CsMode { Power, UsableLink };

struct RadioParams {
    double tx_power_dbm = 0.0;
    double frequency_hz = 5.25e9;
    double bandwidth_hz = 160e6;
    double noise_figure_db = 7.0;
    double snr_threshold_db = 5.0;    // S: a link is usable iff SNR > S
    double cs_threshold_dbm = -82.0;  // busy-detection power level
    double antenna_gain_tx_db = 0.0;
    double antenna_gain_rx_db = 0.0;
    CsMode cs_mode = CsMode::Power;
};

inline void validate(const RadioParams& p) {
    if (!(p.frequency_hz > 0.0) || !std::isfinite(p.frequency_hz))
        throw ValidationError("radio: frequency_hz must be positive");
    if (!(p.bandwidth_hz > 0.0) || !std::isfinite(p.bandwidth_hz))
        throw ValidationError("radio: bandwidth_hz must be positive");
    if (!std::isfinite(p.tx_power_dbm)) throw ValidationError("radio: tx_power_dbm must be finite");
    if (!std::isfinite(p.noise_figure_db))
        throw ValidationError("radio: noise_figure_db must be finite");
    if (!std::isfinite(p.snr_threshold_db))
        throw ValidationError("radio: snr_threshold_db must be finite");
    if (!std::isfinite(p.cs_threshold_dbm))
        throw ValidationError("radio: cs_threshold_dbm must be finite");
    if (!std::isfinite(p.antenna_gain_tx_db) || !std::isfinite(p.antenna_gain_rx_db))
        throw ValidationError("radio: antenna gains must be finite");
}

// Free-space (Friis) path loss: 20*log10(4*pi*d*f/c).
inline double path_loss_db(double distance_m, double frequency_hz) {
    if (!(distance_m > 0.0)) throw std::domain_error("path_loss_db: distance must be > 0");
    if (!(frequency_hz > 0.0)) throw std::domain_error("path_loss_db: frequency must be > 0");
    return 20.0 * std::log10(4.0 * kPi * distance_m * frequency_hz / kSpeedOfLight);
}

// Thermal noise over the receive bandwidth plus the receiver's noise figure.
inline double noise_floor_dbm(const RadioParams& p) {
    return -174.0 + 10.0 * std::log10(p.bandwidth_hz) + p.noise_figure_db;
}

inline double received_power_dbm(double distance_m, const RadioParams& p) {
    return p.tx_power_dbm + p.antenna_gain_tx_db + p.antenna_gain_rx_db -
           path_loss_db(distance_m, p.frequency_hz);
}

inline double snr_db(double distance_m, const RadioParams& p) {
    return received_power_dbm(distance_m, p) - noise_floor_dbm(p);
}

// Strict threshold: SNR exactly at S is not usable.
inline bool link_usable(double distance_m, const RadioParams& p) {
    return snr_db(distance_m, p) > p.snr_threshold_db;
}

// Inclusive threshold: received power exactly at the level counts as busy.
inline bool in_carrier_sense(double distance_m, const RadioParams& p) {
    if (p.cs_mode == CsMode::UsableLink) return link_usable(distance_m, p);
    return received_power_dbm(distance_m, p) >= p.cs_threshold_dbm;
}

struct RateEntry {
    double min_snr_db;
    double rate_bps;
};

struct RateTable {
    std::vector<RateEntry> entries;  // strictly increasing in SNR and rate
};

// 802.11ac-class single-stream steps for a 160 MHz channel, topping out at
// 780 Mbit/s.
inline RateTable default_rate_table() {
    return RateTable{{
        {5.0, 58.5e6},
        {8.0, 117e6},
        {11.0, 175.5e6},
        {14.0, 234e6},
        {18.0, 351e6},
        {22.0, 468e6},
        {24.0, 526.5e6},
        {26.0, 585e6},
        {30.0, 702e6},
        {32.0, 780e6},
    }};
}

inline void validate(const RateTable& t) {
    if (t.entries.empty()) throw ValidationError("rate table: must have at least one entry");
    for (std::size_t k = 0; k < t.entries.size(); ++k) {
        const RateEntry& e = t.entries[k];
        if (!std::isfinite(e.min_snr_db) || !std::isfinite(e.rate_bps) || e.rate_bps <= 0.0)
            throw ValidationError("rate table: entries must be finite with positive rates");
        if (k > 0 && !(e.min_snr_db > t.entries[k - 1].min_snr_db &&
                       e.rate_bps > t.entries[k - 1].rate_bps))
            throw ValidationError("rate table: entries must be strictly increasing");
    }
}

// Highest rate whose SNR floor is met; 0 below the bottom entry.  A boundary
// SNR (exactly min_snr_db) earns that entry's rate.
inline double phy_rate_bps(double snr, const RateTable& t) {
    double r = 0.0;
    for (const RateEntry& e : t.entries) {
        if (snr >= e.min_snr_db)
            r = e.rate_bps;
        else
            break;
    }
    return r;
}

// Logistic error curve centered one dB above the usability threshold S:
// fer = 1/(1 + exp(2*(snr - (S+1)))).  0.5 at the midpoint, ~0.018 two dB up.
inline double frame_error_rate(double snr, double snr_threshold_db) {
    return 1.0 / (1.0 + std::exp(2.0 * (snr - (snr_threshold_db + 1.0))));
}

}  // namespace fmn
