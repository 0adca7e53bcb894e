#ifndef TWINLIGHT_ENVLIGHT_SOLAR_H_
#define TWINLIGHT_ENVLIGHT_SOLAR_H_

#include <cstdint>
#include <string>

#include "twinlight/envlight/env_map.h"

namespace twinlight {

struct GeoTime {
  double latitude = 0.0;   // degrees, north positive
  double longitude = 0.0;  // degrees, east positive
  int64_t timestamp = 0;   // UTC seconds since 1970-01-01
};

struct SolarAngles {
  double azimuth = 0.0;    // degrees clockwise from north, [0, 360)
  double elevation = 0.0;  // apparent degrees above the horizon (refracted)
  double geometric_elevation = 0.0;  // same, without refraction
};

// NOAA solar-calculator ephemeris (Meeus-based, ~0.01 deg over 1950-2100),
// including its atmospheric refraction model. Rejects |lat| > 90,
// |lon| > 180 and timestamps outside [1950, 2100).
SolarAngles SolarPosition(const GeoTime& geo);

// Unit vector toward the sun in the world frame (+x east, +y north, +z up).
Vec3 SolarDirection(const GeoTime& geo);
Vec3 DirectionFromAngles(const SolarAngles& angles);

// Parses "YYYY-MM-DDTHH:MM[:SS][Z]" (UTC) into seconds since the epoch.
int64_t ParseUtcTimestamp(const std::string& text);

}  // namespace twinlight

#endif  // TWINLIGHT_ENVLIGHT_SOLAR_H_
