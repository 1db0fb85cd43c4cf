#pragma once

// Umbrella header.
#include "anng/config.hpp"
#include "anng/dataset.hpp"
#include "anng/edge_model.hpp"
#include "anng/errors.hpp"
#include "anng/experiments.hpp"
#include "anng/geometry.hpp"
#include "anng/graph.hpp"
#include "anng/io.hpp"
#include "anng/random.hpp"
#include "anng/report.hpp"
#include "anng/runner.hpp"
#include "anng/search.hpp"
