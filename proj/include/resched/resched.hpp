#pragma once

#include "resched/bb.hpp"
#include "resched/core.hpp"
#include "resched/fixed_perm.hpp"
#include "resched/heuristics.hpp"
#include "resched/instance_gen.hpp"
#include "resched/io.hpp"
#include "resched/lbbd.hpp"
#include "resched/milp/adapter.hpp"
#include "resched/milp/dfs_solver.hpp"
#include "resched/solve_result.hpp"
#include "resched/verify.hpp"
