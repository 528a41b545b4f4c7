#pragma once

#include "chlab/christoffel.hpp"
#include "chlab/error.hpp"
#include "chlab/experiments.hpp"
#include "chlab/geometry.hpp"
#include "chlab/greenmap.hpp"
#include "chlab/orthopoly.hpp"
#include "chlab/quadrature.hpp"
