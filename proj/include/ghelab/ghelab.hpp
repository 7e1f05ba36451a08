#pragma once

#include "ghelab/error.hpp"
#include "ghelab/generators.hpp"
#include "ghelab/ghe.hpp"
#include "ghelab/harness.hpp"
#include "ghelab/io.hpp"
#include "ghelab/msm.hpp"
#include "ghelab/plot.hpp"
#include "ghelab/random.hpp"
#include "ghelab/series.hpp"
#include "ghelab/tables.hpp"
