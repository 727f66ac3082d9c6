#pragma once

#include <Eigen/Dense>

namespace holdercover {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

}  // namespace holdercover
