#pragma once

#include "benchmark.hpp"
#include "classical_estimator.hpp"
#include "coefficients.hpp"
#include "density_model.hpp"
#include "errors.hpp"
#include "evaluation_metrics.hpp"
#include "geometry.hpp"
#include "nn_geometry.hpp"
#include "oracle_checks.hpp"
#include "simulation.hpp"
#include "sqrt_density_estimator.hpp"
#include "wavelet_basis.hpp"
