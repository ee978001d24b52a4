#pragma once

#include "cat0bd/rational.hpp"
#include "cat0bd/errors.hpp"
#include "cat0bd/word.hpp"
#include "cat0bd/tree_end.hpp"
#include "cat0bd/word_group.hpp"
#include "cat0bd/tree_space.hpp"
#include "cat0bd/product_space.hpp"
#include "cat0bd/group_action.hpp"
#include "cat0bd/boundary_topology.hpp"
#include "cat0bd/condition_star.hpp"
#include "cat0bd/boundary_map.hpp"
#include "cat0bd/report.hpp"
