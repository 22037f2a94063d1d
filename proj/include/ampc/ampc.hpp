#pragma once

// Umbrella header: the full adaptive-MPC toolkit.

#include "ampc/cftoc.hpp"
#include "ampc/config.hpp"
#include "ampc/controller.hpp"
#include "ampc/csv.hpp"
#include "ampc/errors.hpp"
#include "ampc/estimator.hpp"
#include "ampc/harness.hpp"
#include "ampc/model.hpp"
#include "ampc/strings.hpp"
#include "ampc/svg.hpp"
