#pragma once

#include "betadd/density.hpp"
#include "betadd/error.hpp"
#include "betadd/intervals.hpp"
#include "betadd/quad_ext.hpp"
#include "betadd/real.hpp"
#include "betadd/scalar.hpp"
#include "betadd/serialize.hpp"
#include "betadd/step_fn.hpp"
#include "betadd/system.hpp"
#include "betadd/tower.hpp"
