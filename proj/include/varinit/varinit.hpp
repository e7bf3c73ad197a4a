#pragma once

// Variance-preserving LSTM initialization: closed-form conditions, samplers,
// Monte-Carlo probes, and a small training loop to compare schemes.

#include "activations.hpp"
#include "bptt.hpp"
#include "conditions.hpp"
#include "data.hpp"
#include "errors.hpp"
#include "lstm.hpp"
#include "matrix.hpp"
#include "orthogonal.hpp"
#include "presets.hpp"
#include "probe.hpp"
#include "rng.hpp"
#include "sampling.hpp"
#include "train.hpp"
#include "variance_config.hpp"
