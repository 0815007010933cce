// units.hpp: physical constants and the unit conversions used by configs.
//
// Frequencies quoted in "THz" are angular: 1 THz here means 1e12 rad/s.

#pragma once

#include <limits>

namespace collfric::units {

inline constexpr double hbar = 1.054571817e-34;            // J s
inline constexpr double electron_volt = 1.602176634e-19;   // J
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg
inline constexpr double speed_of_light = 299792458.0;      // m/s

inline constexpr double nanometre = 1e-9;
inline constexpr double femtosecond = 1e-15;
inline constexpr double picosecond = 1e-12;
inline constexpr double terahertz = 1e12;  // rad/s
inline constexpr double km_per_s = 1e3;
inline constexpr double nano_newton = 1e-9;

inline constexpr double infinity = std::numeric_limits<double>::infinity();

constexpr double ev_to_joule(double ev) { return ev * electron_volt; }
constexpr double joule_to_ev(double j) { return j / electron_volt; }

/// Angular frequency of an energy quantum, E / hbar.
constexpr double energy_to_angular(double joules) { return joules / hbar; }
constexpr double angular_to_energy(double rad_per_s) { return rad_per_s * hbar; }

}  // namespace collfric::units
