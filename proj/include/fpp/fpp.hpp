#pragma once

// Everything except io.hpp, which needs nlohmann/json.

#include "grid.hpp"
#include "symbols.hpp"
#include "multilinear.hpp"
#include "decomposition.hpp"
#include "dyadic.hpp"
#include "size_energy.hpp"
#include "harness.hpp"
#include "corpus.hpp"
