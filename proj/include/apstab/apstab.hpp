#pragma once

#include "bench.hpp"
#include "config.hpp"
#include "core.hpp"
#include "datasets.hpp"
#include "geometry.hpp"
#include "kmeans.hpp"
#include "parallel.hpp"
#include "perceptron.hpp"
#include "rng.hpp"
#include "robust_kmeans.hpp"
#include "stability.hpp"
#include "stable_kmeans.hpp"
#include "suites.hpp"
#include "synthgen.hpp"
