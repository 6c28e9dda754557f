#pragma once

#include "pgap/arrivals.hpp"
#include "pgap/bounds.hpp"
#include "pgap/common.hpp"
#include "pgap/harness.hpp"
#include "pgap/instance.hpp"
#include "pgap/instance_io.hpp"
#include "pgap/lp.hpp"
#include "pgap/lp_builders.hpp"
#include "pgap/matching.hpp"
#include "pgap/oracle.hpp"
#include "pgap/policy.hpp"
#include "pgap/policy_gap.hpp"
#include "pgap/policy_matching.hpp"
