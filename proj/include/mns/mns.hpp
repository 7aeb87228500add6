#pragma once

// Umbrella header: joint edge-probability estimation for multi-layer networks
// by two-step neighborhood smoothing, with synthetic graphon generators and a
// link-prediction evaluation stack.

#include "mns/data_io.hpp"
#include "mns/distance.hpp"
#include "mns/errors.hpp"
#include "mns/estimator.hpp"
#include "mns/evaluation.hpp"
#include "mns/graphon.hpp"
#include "mns/matrix.hpp"
#include "mns/neighborhood.hpp"
#include "mns/parallel.hpp"
#include "mns/rng.hpp"
#include "mns/tensor.hpp"
