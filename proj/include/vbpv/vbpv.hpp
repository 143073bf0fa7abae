#pragma once

#include "vbpv/angles.hpp"
#include "vbpv/datetime.hpp"
#include "vbpv/errors.hpp"
#include "vbpv/irradiance.hpp"
#include "vbpv/layout.hpp"
#include "vbpv/location.hpp"
#include "vbpv/module.hpp"
#include "vbpv/presets.hpp"
#include "vbpv/simulation.hpp"
#include "vbpv/solar.hpp"
#include "vbpv/sweep.hpp"
