#pragma once

#include <cmath>

namespace uavnet {

// Power in dBm to milliwatts.
inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

inline double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

// A loss of `db` decibels as a linear gain in (0, 1] for positive losses.
inline double loss_db_to_gain(double db) { return std::pow(10.0, -db / 10.0); }

inline double db_to_ratio(double db) { return std::pow(10.0, db / 10.0); }

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace uavnet
