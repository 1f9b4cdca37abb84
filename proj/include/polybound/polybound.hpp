#pragma once

#include "polybound/dual_lift.hpp"
#include "polybound/errors.hpp"
#include "polybound/flow.hpp"
#include "polybound/flow_bound.hpp"
#include "polybound/instance.hpp"
#include "polybound/instance_json.hpp"
#include "polybound/oracle.hpp"
#include "polybound/proof.hpp"
#include "polybound/rational.hpp"
#include "polybound/reductions.hpp"
#include "polybound/simplex.hpp"
#include "polybound/varset.hpp"
