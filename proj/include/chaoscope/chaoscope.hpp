#pragma once

#include "chaoscope/classify.hpp"
#include "chaoscope/criteria.hpp"
#include "chaoscope/density.hpp"
#include "chaoscope/errors.hpp"
#include "chaoscope/operators.hpp"
#include "chaoscope/orbit.hpp"
#include "chaoscope/scaled_real.hpp"
#include "chaoscope/spaces.hpp"
#include "chaoscope/spec_io.hpp"
