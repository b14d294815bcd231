#pragma once

#include <array>

namespace moldopt {

// machine setpoints for one molding cycle; defaults = nominal operating point
struct ProcessParams {
  double v1 = 30, v2 = 30, v3 = 20;     // injection speeds [%]
  double p1 = 130, p2 = 130, p3 = 140;  // packing pressures [bar]
  double x1 = 46, x2 = 38, x3 = 30;     // switchover positions [mm]
  double hold = 1.2;                    // holding time [s]

  std::array<double, 10> to_array() const {
    return {v1, v2, v3, p1, p2, p3, x1, x2, x3, hold};
  }
  static ProcessParams from_array(const std::array<double, 10>& a) {
    return {a[0], a[1], a[2], a[3], a[4], a[5], a[6], a[7], a[8], a[9]};
  }
};

struct EnvConditions {
  double t_machine = 15.0;  // degC
  double t_factory = 15.0;  // degC
  double h_machine = 45.0;  // %RH
  double h_factory = 45.0;  // %RH

  std::array<double, 4> to_array() const {
    return {t_machine, t_factory, h_machine, h_factory};
  }
  static EnvConditions from_array(const std::array<double, 4>& a) {
    return {a[0], a[1], a[2], a[3]};
  }
};

}  // namespace moldopt
