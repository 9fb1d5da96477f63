#pragma once

#include "evade/config.hpp"
#include "evade/dynamics.hpp"
#include "evade/env.hpp"
#include "evade/geometry.hpp"
#include "evade/net.hpp"
#include "evade/observation.hpp"
#include "evade/policies.hpp"
#include "evade/pursuit.hpp"
#include "evade/replay.hpp"
#include "evade/report.hpp"
#include "evade/reward.hpp"
#include "evade/rng.hpp"
#include "evade/safefilter.hpp"
#include "evade/shield.hpp"
#include "evade/td3.hpp"
#include "evade/trainer.hpp"
#include "evade/version.hpp"
#include "evade/world.hpp"
