#pragma once

// Umbrella header for the qlab sparse quantum circuit simulator.

#include "qlab/algorithms.hpp"
#include "qlab/circuit.hpp"
#include "qlab/dense.hpp"
#include "qlab/errors.hpp"
#include "qlab/gates.hpp"
#include "qlab/grader.hpp"
#include "qlab/histogram.hpp"
#include "qlab/io.hpp"
#include "qlab/noise.hpp"
#include "qlab/numtheory.hpp"
#include "qlab/rng.hpp"
#include "qlab/state.hpp"
#include "qlab/version.hpp"
