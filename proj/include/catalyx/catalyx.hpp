// catalyx.hpp — umbrella header

#pragma once

#include "hilbert.hpp"
#include "entropy.hpp"
#include "catalysis.hpp"
#include "constructions.hpp"
#include "scenarios.hpp"
#include "optimize.hpp"
#include "io.hpp"
