#pragma once

#include "scalar.hpp"
#include "types.hpp"
#include "oracle.hpp"
#include "verification.hpp"
#include "numerics.hpp"
#include "report.hpp"
#include "rnm.hpp"
#include "arm.hpp"
#include "newton_cg.hpp"
#include "ippm.hpp"
#include "problems/barrier.hpp"
#include "problems/nmf.hpp"
#include "problems/phase_retrieval.hpp"
#include "problems/polynomial.hpp"
#include "problems/registry.hpp"
