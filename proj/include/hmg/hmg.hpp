#pragma once

// Umbrella header: the whole library in one include.

#include "hmg/bgw.hpp"
#include "hmg/canonical.hpp"
#include "hmg/degree_sequence.hpp"
#include "hmg/distribution.hpp"
#include "hmg/errors.hpp"
#include "hmg/experiment.hpp"
#include "hmg/formula.hpp"
#include "hmg/hanf.hpp"
#include "hmg/incidence.hpp"
#include "hmg/model_check.hpp"
#include "hmg/pattern.hpp"
#include "hmg/rng.hpp"
#include "hmg/sampler.hpp"
#include "hmg/stats.hpp"
