#pragma once

#include "lsdp/causal_graph.hpp"
#include "lsdp/distributions.hpp"
#include "lsdp/experiments.hpp"
#include "lsdp/families.hpp"
#include "lsdp/feature_covariance.hpp"
#include "lsdp/inequality_tests.hpp"
#include "lsdp/io.hpp"
#include "lsdp/latent_model.hpp"
#include "lsdp/linalg.hpp"
#include "lsdp/realization.hpp"
#include "lsdp/rng.hpp"
#include "lsdp/sdp.hpp"
