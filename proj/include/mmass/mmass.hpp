#pragma once

#include "mmass/bayes.hpp"
#include "mmass/distributions.hpp"
#include "mmass/errors.hpp"
#include "mmass/estimators.hpp"
#include "mmass/intervals.hpp"
#include "mmass/io.hpp"
#include "mmass/montecarlo.hpp"
#include "mmass/numerics.hpp"
#include "mmass/parallel.hpp"
#include "mmass/profile.hpp"
#include "mmass/ratematch.hpp"
#include "mmass/rng.hpp"
