#pragma once

#include "mott/channel_space.hpp"
#include "mott/config.hpp"
#include "mott/errors.hpp"
#include "mott/reference_tables.hpp"
#include "mott/scattering.hpp"
#include "mott/single_spin.hpp"
#include "mott/sweep.hpp"
#include "mott/wave_packet.hpp"
