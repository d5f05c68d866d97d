// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include "ddi/chem/molecule.hpp"

namespace ddi::imaging {

//! Deterministic 2D depiction coordinates with unit bond length. Each
//! connected component is laid out by stress majorization against ring-aware
//! target distances; components are placed left to right.
Eigen::MatrixX2d depictionCoordinates(const chem::Molecule& mol);

}  // namespace ddi::imaging
