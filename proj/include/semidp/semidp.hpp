#pragma once

#include "algebra.hpp"
#include "cds.hpp"
#include "csp.hpp"
#include "csp_io.hpp"
#include "errors.hpp"
#include "expr.hpp"
#include "expr_io.hpp"
#include "generate.hpp"
#include "graph.hpp"
#include "kexpr_io.hpp"
#include "measures.hpp"
#include "measures_io.hpp"
#include "oracle.hpp"
#include "sexpr.hpp"
