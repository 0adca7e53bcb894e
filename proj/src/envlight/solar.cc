#include "twinlight/envlight/solar.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

namespace twinlight {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr int64_t kFirstValid = -631152000;  // 1950-01-01T00:00:00Z
constexpr int64_t kLastValid = 4102444800;   // 2100-01-01T00:00:00Z

double Sind(double d) { return std::sin(d * kDeg); }
double Cosd(double d) { return std::cos(d * kDeg); }
double Tand(double d) { return std::tan(d * kDeg); }

double Wrap360(double d) {
  d = std::fmod(d, 360.0);
  return d < 0 ? d + 360.0 : d;
}

double RefractionDegrees(double elevation) {
  double arcsec = 0.0;
  if (elevation > 85.0) {
    arcsec = 0.0;
  } else if (elevation > 5.0) {
    const double t = Tand(elevation);
    arcsec = 58.1 / t - 0.07 / (t * t * t) + 0.000086 / std::pow(t, 5);
  } else if (elevation > -0.575) {
    const double e = elevation;
    arcsec = 1735.0 + e * (-518.2 + e * (103.4 + e * (-12.79 + e * 0.711)));
  } else {
    arcsec = -20.772 / Tand(elevation);
  }
  return arcsec / 3600.0;
}

}  // namespace

SolarAngles SolarPosition(const GeoTime& geo) {
  Require(std::isfinite(geo.latitude) && std::abs(geo.latitude) <= 90.0,
          "latitude must lie in [-90, 90]");
  Require(std::isfinite(geo.longitude) && std::abs(geo.longitude) <= 180.0,
          "longitude must lie in [-180, 180]");
  Require(geo.timestamp >= kFirstValid && geo.timestamp < kLastValid,
          "timestamp outside the ephemeris validity range 1950-2100");

  const double jd = static_cast<double>(geo.timestamp) / 86400.0 + 2440587.5;
  const double jc = (jd - 2451545.0) / 36525.0;
  const double mean_long = Wrap360(280.46646 + jc * (36000.76983 + jc * 0.0003032));
  const double mean_anom = 357.52911 + jc * (35999.05029 - 0.0001537 * jc);
  const double ecc = 0.016708634 - jc * (0.000042037 + 0.0000001267 * jc);
  const double center = Sind(mean_anom) * (1.914602 - jc * (0.004817 + 0.000014 * jc)) +
                        Sind(2 * mean_anom) * (0.019993 - 0.000101 * jc) +
                        Sind(3 * mean_anom) * 0.000289;
  const double omega = 125.04 - 1934.136 * jc;
  const double app_long = mean_long + center - 0.00569 - 0.00478 * Sind(omega);
  const double mean_obliq =
      23.0 + (26.0 + (21.448 - jc * (46.815 + jc * (0.00059 - jc * 0.001813))) / 60.0) / 60.0;
  const double obliq = mean_obliq + 0.00256 * Cosd(omega);
  const double decl = std::asin(Sind(obliq) * Sind(app_long)) / kDeg;

  const double y = Tand(obliq / 2) * Tand(obliq / 2);
  const double eq_time =
      4.0 / kDeg *
      (y * Sind(2 * mean_long) - 2 * ecc * Sind(mean_anom) +
       4 * ecc * y * Sind(mean_anom) * Cosd(2 * mean_long) -
       0.5 * y * y * Sind(4 * mean_long) - 1.25 * ecc * ecc * Sind(2 * mean_anom));

  int64_t day_seconds = geo.timestamp % 86400;
  if (day_seconds < 0) day_seconds += 86400;
  const double minutes = static_cast<double>(day_seconds) / 60.0;
  double solar_time = std::fmod(minutes + eq_time + 4.0 * geo.longitude, 1440.0);
  if (solar_time < 0) solar_time += 1440.0;
  const double hour_angle = solar_time / 4.0 - 180.0;

  const double cos_zenith = std::clamp(
      Sind(geo.latitude) * Sind(decl) + Cosd(geo.latitude) * Cosd(decl) * Cosd(hour_angle), -1.0, 1.0);
  const double zenith = std::acos(cos_zenith) / kDeg;

  SolarAngles out;
  const double denom = Cosd(geo.latitude) * Sind(zenith);
  if (std::abs(denom) < 1e-12) {
    // Pole or sun at zenith: azimuth is degenerate; report due south/north.
    out.azimuth = geo.latitude > 0 ? 180.0 : 0.0;
  } else {
    const double a = std::acos(std::clamp((Sind(geo.latitude) * cos_zenith - Sind(decl)) / denom,
                                          -1.0, 1.0)) / kDeg;
    out.azimuth = hour_angle > 0 ? Wrap360(a + 180.0) : Wrap360(540.0 - a);
  }
  const double elevation = 90.0 - zenith;
  out.geometric_elevation = elevation;
  out.elevation = elevation + RefractionDegrees(elevation);
  return out;
}

Vec3 DirectionFromAngles(const SolarAngles& a) {
  const double ce = Cosd(a.elevation);
  return Vec3(ce * Sind(a.azimuth), ce * Cosd(a.azimuth), Sind(a.elevation)).normalized();
}

Vec3 SolarDirection(const GeoTime& geo) { return DirectionFromAngles(SolarPosition(geo)); }

int64_t ParseUtcTimestamp(const std::string& text) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0, used = 0;
  const int n = std::sscanf(text.c_str(), "%d-%d-%dT%d:%d%n", &y, &mo, &d, &h, &mi, &used);
  Require(n == 5, "time must look like YYYY-MM-DDTHH:MM[:SS][Z]: '" + text + "'");
  std::string rest = text.substr(used);
  if (!rest.empty() && rest[0] == ':') {
    int used2 = 0;
    Require(std::sscanf(rest.c_str(), ":%d%n", &s, &used2) == 1, "bad seconds in '" + text + "'");
    rest = rest.substr(used2);
  }
  Require(rest.empty() || rest == "Z", "unexpected trailing text in time '" + text + "'");
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  Require(ymd.ok() && h >= 0 && h < 24 && mi >= 0 && mi < 60 && s >= 0 && s < 61,
          "invalid calendar time '" + text + "'");
  const int64_t days = sys_days(ymd).time_since_epoch().count();
  return days * 86400 + h * 3600 + mi * 60 + s;
}

}  // namespace twinlight
