#pragma once

#include "stabpencil/analysis.hpp"
#include "stabpencil/generators.hpp"
#include "stabpencil/manifold.hpp"
#include "stabpencil/objective.hpp"
#include "stabpencil/pencil.hpp"
#include "stabpencil/projection.hpp"
#include "stabpencil/trust_region.hpp"
