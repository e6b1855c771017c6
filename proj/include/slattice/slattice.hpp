#ifndef SLATTICE_SLATTICE_HPP
#define SLATTICE_SLATTICE_HPP

// Umbrella header.
#include "slattice/bessel.hpp"
#include "slattice/brillouin.hpp"
#include "slattice/config.hpp"
#include "slattice/dynamics.hpp"
#include "slattice/hoppings.hpp"
#include "slattice/io.hpp"
#include "slattice/lattice.hpp"
#include "slattice/output.hpp"
#include "slattice/parallel.hpp"
#include "slattice/schema.hpp"
#include "slattice/sweep.hpp"
#include "slattice/topology.hpp"

#endif
