// SPDX-License-Identifier: Apache-2.0
//
// Umbrella header.
#pragma once

#include "twosided/closure.hpp"
#include "twosided/cohomology.hpp"
#include "twosided/complex.hpp"
#include "twosided/error.hpp"
#include "twosided/fibre.hpp"
#include "twosided/field.hpp"
#include "twosided/generators.hpp"
#include "twosided/line_bundle.hpp"
#include "twosided/norms.hpp"
#include "twosided/random.hpp"
#include "twosided/recovery.hpp"
#include "twosided/scenarios.hpp"
#include "twosided/smith.hpp"
#include "twosided/telescope.hpp"
