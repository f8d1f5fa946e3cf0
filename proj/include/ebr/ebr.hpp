#pragma once

// Umbrella header for the extended Bloch-sphere measurement library.

#include "ebr/bloch.hpp"
#include "ebr/density.hpp"
#include "ebr/engine.hpp"
#include "ebr/generators.hpp"
#include "ebr/membrane.hpp"
#include "ebr/observable.hpp"
#include "ebr/rng.hpp"
#include "ebr/sampling.hpp"
#include "ebr/trajectory.hpp"
#include "ebr/types.hpp"
