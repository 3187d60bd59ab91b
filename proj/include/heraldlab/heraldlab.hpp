#pragma once

// Umbrella header: heralded non-Gaussian state synthesis from photon-number
// measurement on one mode of a two-mode entangled Gaussian state.

#include "heraldlab/errors.hpp"
#include "heraldlab/gaussian_core.hpp"
#include "heraldlab/heralding.hpp"
#include "heraldlab/nongauss.hpp"
#include "heraldlab/oracle.hpp"
#include "heraldlab/selftest.hpp"
#include "heraldlab/specfun.hpp"
#include "heraldlab/state_synth.hpp"
