#pragma once

#include "analysis.hpp"
#include "complexity.hpp"
#include "core.hpp"
#include "mobius.hpp"
#include "parallel.hpp"
#include "rational.hpp"
#include "residues.hpp"
#include "schedule.hpp"
#include "sequences.hpp"
#include "weights.hpp"
