#pragma once

// Umbrella header: the whole library except the CLI front end (which pulls
// in the vendored argument parser).

#include "rankenum/acyclic.hpp"
#include "rankenum/baseline.hpp"
#include "rankenum/composite.hpp"
#include "rankenum/core.hpp"
#include "rankenum/csv.hpp"
#include "rankenum/engine.hpp"
#include "rankenum/join_tree.hpp"
#include "rankenum/lexi.hpp"
#include "rankenum/oracle.hpp"
#include "rankenum/profile.hpp"
#include "rankenum/query.hpp"
#include "rankenum/reduce.hpp"
#include "rankenum/star.hpp"
#include "rankenum/synthetic.hpp"
