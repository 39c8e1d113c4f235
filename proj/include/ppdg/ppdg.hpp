#pragma once

#include "ppdg/ast.hpp"
#include "ppdg/cfg.hpp"
#include "ppdg/dependence.hpp"
#include "ppdg/dot.hpp"
#include "ppdg/experiment.hpp"
#include "ppdg/interpreter.hpp"
#include "ppdg/localizer.hpp"
#include "ppdg/model.hpp"
#include "ppdg/mutation.hpp"
#include "ppdg/parser.hpp"
#include "ppdg/pdg.hpp"
#include "ppdg/postdom.hpp"
#include "ppdg/statements.hpp"
#include "ppdg/trace.hpp"
#include "ppdg/transform.hpp"
#include "ppdg/unparse.hpp"
