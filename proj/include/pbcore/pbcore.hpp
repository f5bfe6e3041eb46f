#pragma once

// Exact core-stability toolkit for approval-based participatory budgeting:
// exact-rational elections, satisfaction functions with sound interval
// comparison, core membership/emptiness certificates, bundled counterexample
// instances and a counterexample search.

#include "pbcore/core.hpp"
#include "pbcore/election.hpp"
#include "pbcore/errors.hpp"
#include "pbcore/interval.hpp"
#include "pbcore/json_io.hpp"
#include "pbcore/pabulib.hpp"
#include "pbcore/paperlab.hpp"
#include "pbcore/rat.hpp"
#include "pbcore/satisfaction.hpp"
#include "pbcore/search.hpp"
