#pragma once

#include "relief/dataset.hpp"
#include "relief/io.hpp"
#include "relief/metric.hpp"
#include "relief/scorers.hpp"
#include "relief/selection.hpp"
#include "relief/simbench.hpp"
#include "relief/wrappers.hpp"
