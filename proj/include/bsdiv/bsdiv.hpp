#pragma once

#include "bayes.hpp"
#include "core.hpp"
#include "dependence.hpp"
#include "distribution.hpp"
#include "estimate.hpp"
#include "extended.hpp"
#include "functional.hpp"
#include "generator.hpp"
#include "measure.hpp"
#include "transport.hpp"
#include "variational.hpp"
