#ifndef TWINLIGHT_COMMON_VEC_H_
#define TWINLIGHT_COMMON_VEC_H_

#include <Eigen/Geometry>

namespace twinlight {

using Vec3 = Eigen::Vector3d;

}  // namespace twinlight

#endif  // TWINLIGHT_COMMON_VEC_H_
