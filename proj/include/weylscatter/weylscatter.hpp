#pragma once

/**
 * @file weylscatter.hpp
 * @brief Umbrella header: the complete library in one include.
 *
 * Layering (each header includes what it needs):
 *   matkit    — dense complex matrices, Hermitian eigensolver, solves
 *   herglotz  — Nevanlinna families, branch conventions, boundary values
 *   sturm     — Sturm–Liouville shooting, Weyl matrices, Dirichlet spectra
 *   relspace  — linear relations: self-adjointness, couplings, dilations
 *   scatter   — scattering matrices, characteristic functions, residuals
 *   harness   — configs, sweeps, verification suites, emission, presets
 */

#include "harness.hpp"
#include "herglotz.hpp"
#include "matkit.hpp"
#include "relspace.hpp"
#include "scatter.hpp"
#include "sturm.hpp"
