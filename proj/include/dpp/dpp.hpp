#pragma once
// Convenience umbrella: the whole toolkit in one include.

#include "core.hpp"          // IWYU pragma: export
#include "rootfind.hpp"      // IWYU pragma: export
#include "toml_lite.hpp"     // IWYU pragma: export
#include "dispersion.hpp"    // IWYU pragma: export
#include "grating.hpp"       // IWYU pragma: export
#include "phasematch.hpp"    // IWYU pragma: export
#include "biphoton.hpp"      // IWYU pragma: export
#include "report.hpp"        // IWYU pragma: export
