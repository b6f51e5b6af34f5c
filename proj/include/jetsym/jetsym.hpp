#pragma once

#include "jetsym/actions.hpp"
#include "jetsym/coef.hpp"
#include "jetsym/detsolve.hpp"
#include "jetsym/expr.hpp"
#include "jetsym/jetops.hpp"
#include "jetsym/noether.hpp"
#include "jetsym/parse.hpp"
#include "jetsym/pdesys.hpp"
#include "jetsym/structs.hpp"
#include "jetsym/sysdef.hpp"
