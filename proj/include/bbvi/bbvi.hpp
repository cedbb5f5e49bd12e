#pragma once

#include "bbvi/base_distribution.hpp"
#include "bbvi/block_layout.hpp"
#include "bbvi/common.hpp"
#include "bbvi/diagnostics.hpp"
#include "bbvi/experiments.hpp"
#include "bbvi/gradient_estimator.hpp"
#include "bbvi/optimizer.hpp"
#include "bbvi/rng.hpp"
#include "bbvi/scale_matrix.hpp"
#include "bbvi/sparsity.hpp"
#include "bbvi/target.hpp"
#include "bbvi/variational_family.hpp"
