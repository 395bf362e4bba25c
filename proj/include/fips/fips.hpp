#pragma once

// Umbrella header: spectral quadrature for periodic functions and the direct
// transcription of periodic optimal-control problems it supports.

#include "fips/grid.hpp"
#include "fips/fourier.hpp"
#include "fips/integration.hpp"
#include "fips/error_bounds.hpp"
#include "fips/ocp.hpp"
#include "fips/discretize.hpp"
#include "fips/solver.hpp"
#include "fips/problems.hpp"
#include "fips/serialize.hpp"
