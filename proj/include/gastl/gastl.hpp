// Umbrella header.

#pragma once

#include "gastl/autoencoder.hpp"
#include "gastl/classifier.hpp"
#include "gastl/dataset.hpp"
#include "gastl/errors.hpp"
#include "gastl/graph.hpp"
#include "gastl/l21solver.hpp"
#include "gastl/lbfgs.hpp"
#include "gastl/numerics.hpp"
#include "gastl/pipeline.hpp"
#include "gastl/random.hpp"
#include "gastl/relevance.hpp"
#include "gastl/transfer.hpp"
