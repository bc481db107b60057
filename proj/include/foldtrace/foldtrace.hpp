#pragma once

#include "foldtrace/astroid.hpp"
#include "foldtrace/diagnostics.hpp"
#include "foldtrace/expression.hpp"
#include "foldtrace/field.hpp"
#include "foldtrace/io.hpp"
#include "foldtrace/lubrication.hpp"
#include "foldtrace/rootfind.hpp"
#include "foldtrace/spectral.hpp"
#include "foldtrace/tracer.hpp"
#include "foldtrace/turnpoint.hpp"
#include "foldtrace/types.hpp"
