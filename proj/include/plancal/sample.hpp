#pragma once

#include "plancal/kinematics.hpp"

namespace plancal {

// One measurement: commanded joints plus the dial-indicator reading.
struct Sample {
    Joints q = Joints::Zero();
    double dial_mm = 0.0;
};

}  // namespace plancal
