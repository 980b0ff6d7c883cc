#pragma once

#include "lc_cooldown/config.hpp"
#include "lc_cooldown/constants.hpp"
#include "lc_cooldown/dynamics.hpp"
#include "lc_cooldown/errors.hpp"
#include "lc_cooldown/figures.hpp"
#include "lc_cooldown/params.hpp"
#include "lc_cooldown/sideband.hpp"
#include "lc_cooldown/spectra.hpp"
#include "lc_cooldown/steady_state.hpp"
#include "lc_cooldown/sweep.hpp"
#include "lc_cooldown/working_point.hpp"
