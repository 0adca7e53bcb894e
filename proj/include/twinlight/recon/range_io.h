#ifndef TWINLIGHT_RECON_RANGE_IO_H_
#define TWINLIGHT_RECON_RANGE_IO_H_

#include <string>
#include <vector>

#include "twinlight/recon/camera.h"
#include "twinlight/recon/fit_sdf.h"

namespace twinlight {

// One sample per line: `ox oy oz dx dy dz depth|sky`. Blank lines and lines
// starting with '#' are skipped; directions are normalised on read.
std::vector<RangeSample> ParseRangeSamples(const std::string& text, const std::string& source);
std::string FormatRangeSamples(const std::vector<RangeSample>& samples);
std::vector<RangeSample> ReadRangeSamples(const std::string& path);
void WriteRangeSamples(const std::string& path, const std::vector<RangeSample>& samples);

// CSV `iter,loss_lidar,loss_eik,loss_free`.
std::string FormatLossTrace(const std::vector<LossTerms>& trace);
void WriteLossTrace(const std::string& path, const std::vector<LossTerms>& trace);

// One camera per line: `w h fx fy cx cy tx ty tz qw qx qy qz`, the pose being
// world-from-camera with the quaternion in (w, x, y, z) order.
std::vector<CameraModel> ParseCameraList(const std::string& text, const std::string& source);
std::string FormatCameraList(const std::vector<CameraModel>& cameras);
std::vector<CameraModel> ReadCameraList(const std::string& path);
void WriteCameraList(const std::string& path, const std::vector<CameraModel>& cameras);

}  // namespace twinlight

#endif  // TWINLIGHT_RECON_RANGE_IO_H_
