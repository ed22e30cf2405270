#pragma once

#include "cfseries/builtins.hpp"
#include "cfseries/errors.hpp"
#include "cfseries/fliess_operator.hpp"
#include "cfseries/ident.hpp"
#include "cfseries/multipoly.hpp"
#include "cfseries/polynomial.hpp"
#include "cfseries/realization.hpp"
#include "cfseries/series.hpp"
#include "cfseries/signal.hpp"
#include "cfseries/topology.hpp"
#include "cfseries/word.hpp"
