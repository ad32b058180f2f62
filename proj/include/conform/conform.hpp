#pragma once

// Umbrella header for the conformity-testing toolkit.

#include "conform/errors.hpp"
#include "conform/digest.hpp"
#include "conform/access_model.hpp"
#include "conform/runtime_model.hpp"
#include "conform/identity_model.hpp"
#include "conform/sut.hpp"
#include "conform/defects.hpp"
#include "conform/simulator.hpp"
#include "conform/fixtures.hpp"
#include "conform/core_model.hpp"
#include "conform/covering_array.hpp"
#include "conform/optimizer.hpp"
#include "conform/method_access.hpp"
#include "conform/method_runtime.hpp"
#include "conform/method_identity.hpp"
#include "conform/plan_file.hpp"
#include "conform/runner.hpp"
