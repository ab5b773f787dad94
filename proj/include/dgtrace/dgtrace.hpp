#pragma once

#include "dgtrace/diagnostics.hpp"
#include "dgtrace/error.hpp"
#include "dgtrace/graph/betweenness.hpp"
#include "dgtrace/graph/centrality.hpp"
#include "dgtrace/graph/community.hpp"
#include "dgtrace/graph/degree.hpp"
#include "dgtrace/graph/digraph.hpp"
#include "dgtrace/graph/quotient.hpp"
#include "dgtrace/graph_io.hpp"
#include "dgtrace/metagraph.hpp"
#include "dgtrace/minifort/ast.hpp"
#include "dgtrace/minifort/coverage.hpp"
#include "dgtrace/minifort/lexer.hpp"
#include "dgtrace/minifort/parser.hpp"
#include "dgtrace/minifort/symbols.hpp"
#include "dgtrace/refinement.hpp"
#include "dgtrace/selection/ensemble.hpp"
#include "dgtrace/selection/lasso.hpp"
#include "dgtrace/selection/select.hpp"
#include "dgtrace/selection/stats.hpp"
#include "dgtrace/slicer.hpp"
