#pragma once

#include "elicit/agent.hpp"
#include "elicit/bounds_network.hpp"
#include "elicit/bundle.hpp"
#include "elicit/elicitation.hpp"
#include "elicit/elicited_clarke.hpp"
#include "elicit/harness.hpp"
#include "elicit/instance_io.hpp"
#include "elicit/oracle.hpp"
#include "elicit/policies.hpp"
#include "elicit/rank_lattice.hpp"
#include "elicit/rng.hpp"
#include "elicit/types.hpp"
#include "elicit/valuation.hpp"
