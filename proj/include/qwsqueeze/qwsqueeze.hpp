#pragma once

// Convenience header for the whole library.

#include "qwsqueeze/errors.hpp"
#include "qwsqueeze/model.hpp"
#include "qwsqueeze/dynamics.hpp"
#include "qwsqueeze/steadystate.hpp"
#include "qwsqueeze/squeezing.hpp"
#include "qwsqueeze/sweep.hpp"
#include "qwsqueeze/config.hpp"
#include "qwsqueeze/output.hpp"
